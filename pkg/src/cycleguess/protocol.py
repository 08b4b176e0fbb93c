"""Protocols on odd and even cycles: tables, evaluation, fixed-set enumeration.

A protocol stores, for each vertex ``i``, an ``s x s`` table indexed by
``(colour of left neighbour, colour of right neighbour)``. Internally vertex
``i`` (1-based) lives at position ``i - 1`` of the ``(n, s, s)`` array.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import BudgetExceeded, ColourSpace, Cycle, UsageError, check_colouring, factorize

DEFAULT_ENUMERATION_BUDGET = 10**8
PROTOCOL_HEADER = "cycleguess-protocol v1"


@dataclass(frozen=True, eq=False)
class Protocol:
    space: ColourSpace
    cycle: Cycle
    tables: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        n, s = self.cycle.n, self.space.s
        t = np.array(self.tables, dtype=np.int64)
        if t.shape != (n, s, s):
            raise UsageError(f"tables must have shape {(n, s, s)}, got {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= s):
            raise UsageError(f"table entries must lie in [0, {s})")
        t.setflags(write=False)
        object.__setattr__(self, "tables", t)

    @property
    def n(self) -> int:
        return self.cycle.n

    @property
    def s(self) -> int:
        return self.space.s

    def guess(self, i: int, left: int, right: int) -> int:
        """f_i(left, right) for 1-based vertex ``i``."""
        return int(self.tables[i - 1, left, right])

    def __eq__(self, other):
        if not isinstance(other, Protocol):
            return NotImplemented
        return self.space == other.space and self.cycle == other.cycle and np.array_equal(self.tables, other.tables)

    def __hash__(self):
        return hash((self.space, self.cycle, self.tables.tobytes()))


@dataclass(frozen=True, eq=False)
class FixedSet:
    protocol: Protocol
    members: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return int(self.members.shape[0])

    def __len__(self) -> int:
        return self.count

    def __iter__(self):
        for row in self.members:
            yield tuple(int(x) for x in row)

    def __contains__(self, c) -> bool:
        c = np.asarray(c, dtype=np.int64)
        if self.count == 0:
            return False
        return bool(np.any(np.all(self.members == c, axis=1)))

    def as_set(self) -> set[tuple[int, ...]]:
        return set(iter(self))


@dataclass(frozen=True)
class RoundDownSpec:
    m: int
    t: int

    def __post_init__(self):
        if self.t < 0:
            raise UsageError("t must be non-negative")
        if self.s < 2:
            raise UsageError(f"m^2 - t = {self.s} must be >= 2")

    @property
    def s(self) -> int:
        return self.m * self.m - self.t


def make_protocol(n: int, s: int, tables, name: str = "custom") -> Protocol:
    return Protocol(factorize(s), Cycle(n), np.asarray(tables), name)


def constant_protocol(n: int, s: int, value: int = 0) -> Protocol:
    if not 0 <= value < s:
        raise UsageError(f"constant {value} not in Z_{s}")
    return make_protocol(n, s, np.full((n, s, s), value, dtype=np.int64), name=f"constant-{value}")


def random_protocol(n: int, s: int, rng: np.random.Generator) -> Protocol:
    return make_protocol(n, s, rng.integers(0, s, size=(n, s, s)), name="random")


def random_nontrivial_protocols(n: int, s: int, count: int, seed: int = 0) -> list[Protocol]:
    """``count`` uniformly random protocols with non-empty fixed sets (fixed seed)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        p = random_protocol(n, s, rng)
        if enumerate_fixed_set(p).count:
            out.append(p)
    return out


def build_fcp(n: int, s: int) -> Protocol:
    """The fractional-clique-partition protocol on the odd cycle C_n."""
    if n < 3 or n % 2 == 0:
        raise UsageError(f"the fractional-clique-partition protocol needs odd n >= 3, got n={n}")
    space = factorize(s)
    a, b = space.a, space.b
    z = np.arange(s)
    ph, ps = z // b, z % b
    L, R = np.meshgrid(z, z, indexing="ij")  # L = left neighbour, R = right neighbour
    tables = np.empty((n, s, s), dtype=np.int64)
    for i in range(1, n + 1):
        if i == 1:
            # second coordinate of v_1 copies the first coordinate of v_n (embedded in Z_b)
            t = ph[R] * b + ph[L]
        elif i == n:
            t = (ps[R] % a) * b + ps[L]
        elif i % 2 == 0:
            t = ph[L] * b + ps[R]
        else:
            t = ph[R] * b + ps[L]
        tables[i - 1] = t
    return Protocol(space, Cycle(n), tables, name="fcp")


def fcp_fixed_count(n: int, s: int) -> int:
    """Closed-form fixed number a * s^((n-1)/2) of the fractional-clique-partition protocol."""
    if n < 3 or n % 2 == 0:
        raise UsageError(f"need odd n >= 3, got {n}")
    return factorize(s).a * s ** ((n - 1) // 2)


def evaluate(p: Protocol, c: Sequence[int]) -> tuple[int, ...]:
    c = check_colouring(c, p.n, p.s)
    n = p.n
    return tuple(int(p.tables[i, c[(i - 1) % n], c[(i + 1) % n]]) for i in range(n))


def evaluate_many(p: Protocol, colourings: np.ndarray) -> np.ndarray:
    """Vectorised :func:`evaluate` over the rows of an ``(m, n)`` array."""
    c = np.asarray(colourings, dtype=np.int64)
    idx = np.arange(p.n)
    left = np.roll(c, 1, axis=1)
    right = np.roll(c, -1, axis=1)
    return p.tables[idx[None, :], left, right]


def _extend_fixed(p: Protocol, first: int) -> np.ndarray:
    # Grow lexicographically ordered prefixes one vertex at a time. Once c_{k+1} is known
    # the guess of vertex k is checkable, so inconsistent prefixes are dropped early.
    n, s, T = p.n, p.s, p.tables
    pref = np.array([[first]], dtype=np.int64)
    colours = np.arange(s, dtype=np.int64)
    for k in range(1, n):
        m = pref.shape[0]
        if m == 0:
            break
        pref = np.hstack([np.repeat(pref, s, axis=0), np.tile(colours, m)[:, None]])
        if k >= 2:
            ok = T[k - 1, pref[:, k - 2], pref[:, k]] == pref[:, k - 1]
            pref = pref[ok]
    if pref.shape[0]:
        ok = T[n - 1, pref[:, n - 2], pref[:, 0]] == pref[:, n - 1]
        ok &= T[0, pref[:, n - 1], pref[:, 1]] == pref[:, 0]
        pref = pref[ok]
    return pref.reshape(-1, n)


def enumerate_fixed_set(p: Protocol, budget: int = DEFAULT_ENUMERATION_BUDGET, threads: int = 1) -> FixedSet:
    """All colourings ``c`` with ``evaluate(p, c) == c``, in lexicographic order.

    Refuses (``BudgetExceeded``) when the candidate space ``s**n`` is larger than
    ``budget``. The search is split by the colour of vertex 1; with ``threads > 1``
    the parts run concurrently and are concatenated in order, so the result does not
    depend on the thread count.
    """
    total = p.s**p.n
    if total > budget:
        raise BudgetExceeded(f"enumerating {p.s}^{p.n} colourings", total, budget)
    firsts = range(p.s)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda v: _extend_fixed(p, v), firsts))
    else:
        parts = [_extend_fixed(p, v) for v in firsts]
    members = np.concatenate(parts, axis=0) if parts else np.empty((0, p.n), dtype=np.int64)
    members.setflags(write=False)
    return FixedSet(p, members)


def restrict(p: Protocol, s_prime: int) -> Protocol:
    """Forget colours ``>= s_prime``: keep in-range guesses, send everything else to 0."""
    if not 2 <= s_prime <= p.s:
        raise UsageError(f"s' must satisfy 2 <= s' <= {p.s}, got {s_prime}")
    t = p.tables[:, :s_prime, :s_prime]
    t = np.where(t < s_prime, t, 0)
    return Protocol(factorize(s_prime), p.cycle, t, name=f"{p.name}|{s_prime}")


def round_down_protocol(rd: RoundDownSpec, n: int) -> Protocol:
    """The fractional-clique-partition protocol for m^2 colours restricted to s = m^2 - t."""
    return restrict(build_fcp(n, rd.m * rd.m), rd.s)


def round_down_bound(rd: RoundDownSpec, n: int) -> float:
    """Lower bound s^(n/2) (1 - t n / s) on the fixed number reachable with s = m^2 - t colours.

    The value may be non-positive, in which case the bound says nothing.
    """
    if n < 3 or n % 2 == 0:
        raise UsageError(f"need odd n >= 3, got {n}")
    s = rd.s
    return s ** (n / 2) * (1 - rd.t * n / s)


def cycle_upper_bound(n: int, s: int) -> float:
    """s^(n/2): no protocol on C_n (n >= 4) fixes more colourings."""
    return s ** (n / 2)


def is_perfect_square(s: int) -> bool:
    r = math.isqrt(s)
    return r * r == s


# -- text formats -----------------------------------------------------------------


def dumps_protocol(p: Protocol) -> str:
    lines = [PROTOCOL_HEADER, f"n={p.n} s={p.s}"]
    for i in range(p.n):
        for row in p.tables[i]:
            lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def loads_protocol(text: str) -> Protocol:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0] != PROTOCOL_HEADER:
        raise UsageError(f"not a protocol file: expected header {PROTOCOL_HEADER!r}")
    try:
        fields = dict(tok.split("=", 1) for tok in lines[1].split())
        n, s = int(fields["n"]), int(fields["s"])
    except (IndexError, KeyError, ValueError) as exc:
        raise UsageError("protocol file: second line must be 'n=<n> s=<s>'") from exc
    body = lines[2:]
    if len(body) != n * s:
        raise UsageError(f"protocol file: expected {n * s} table rows, found {len(body)}")
    try:
        rows = [[int(x) for x in ln.split()] for ln in body]
    except ValueError as exc:
        raise UsageError("protocol file: non-integer table entry") from exc
    if any(len(r) != s for r in rows):
        raise UsageError(f"protocol file: every table row needs {s} entries")
    return make_protocol(n, s, np.array(rows).reshape(n, s, s))


def save_protocol(p: Protocol, path) -> None:
    Path(path).write_text(dumps_protocol(p))


def load_protocol(path) -> Protocol:
    return loads_protocol(Path(path).read_text())


def dumps_fixed_set(fs: FixedSet | Iterable[Sequence[int]]) -> str:
    rows = fs.members if isinstance(fs, FixedSet) else fs
    return "".join(" ".join(str(int(x)) for x in row) + "\n" for row in rows)
