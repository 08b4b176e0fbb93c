"""Colour spaces, the mixed-radix factorization bijection and cycle indexing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class CycleGuessError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(CycleGuessError, ValueError):
    """Invalid arguments (bad parameters, out-of-range colours, wrong parity)."""


class BudgetExceeded(CycleGuessError):
    """A computation would exceed its configured enumeration or memory budget."""

    def __init__(self, what: str, needed: int, budget: int):
        self.what = what
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what}: needs {needed} but budget is {budget}")


@dataclass(frozen=True)
class ColourSpace:
    """``s`` colours with ``s = a * b`` where ``a`` is the largest divisor of s not above sqrt(s)."""

    s: int
    a: int
    b: int

    def phi(self, z: int) -> int:
        _check_colour(self, z)
        return z // self.b

    def psi(self, z: int) -> int:
        _check_colour(self, z)
        return z % self.b

    def pi(self, x: int, y: int) -> int:
        if not 0 <= x < self.a:
            raise UsageError(f"first coordinate {x} not in Z_{self.a}")
        if not 0 <= y < self.b:
            raise UsageError(f"second coordinate {y} not in Z_{self.b}")
        return x * self.b + y

    @property
    def is_square(self) -> bool:
        return self.a == self.b


def factorize(s: int) -> ColourSpace:
    if not isinstance(s, int) or s < 2:
        raise UsageError(f"need an integer s >= 2, got {s!r}")
    a = max(d for d in range(1, math.isqrt(s) + 1) if s % d == 0)
    return ColourSpace(s, a, s // a)


# Free-function forms mirror the methods; handy when mapping over arrays of spaces.
def phi(space: ColourSpace, z: int) -> int:
    return space.phi(z)


def psi(space: ColourSpace, z: int) -> int:
    return space.psi(z)


def pi(space: ColourSpace, x: int, y: int) -> int:
    return space.pi(x, y)


def _check_colour(space: ColourSpace, z: int) -> None:
    if not 0 <= z < space.s:
        raise UsageError(f"colour {z} not in Z_{space.s}")


@dataclass(frozen=True)
class Cycle:
    """The cycle C_n. Public indices are 1-based; ``*_0`` helpers are 0-based."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise UsageError(f"a cycle needs n >= 3 vertices, got {self.n}")

    def wrap(self, i: int) -> int:
        """Map any integer index onto 1..n."""
        return (i - 1) % self.n + 1

    def neighbours(self, i: int) -> tuple[int, int]:
        return self.wrap(i - 1), self.wrap(i + 1)

    def left0(self, i: int) -> int:
        return (i - 1) % self.n

    def right0(self, i: int) -> int:
        return (i + 1) % self.n


def check_colouring(c: Sequence[int], n: int, s: int) -> tuple[int, ...]:
    c = tuple(int(x) for x in c)
    if len(c) != n:
        raise UsageError(f"colouring has {len(c)} entries, expected {n}")
    for x in c:
        if not 0 <= x < s:
            raise UsageError(f"colour {x} not in Z_{s}")
    return c


def parse_colouring(text: str) -> tuple[int, ...]:
    """Parse ``"1,0,2"`` or ``"1 0 2"``."""
    parts = text.replace(",", " ").split()
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"cannot parse colouring {text!r}") from exc


def format_colouring(c: Sequence[int], sep: str = ",") -> str:
    return sep.join(str(int(x)) for x in c)
