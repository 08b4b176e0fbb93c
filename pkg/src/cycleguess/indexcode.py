"""Broadcast index code for odd cycles built from the factorization s = a * b.

The sender broadcasts (n-1)/2 residues mod a (sums of first coordinates of the
pairs v_1v_2, v_3v_4, ...), (n-1)/2 residues mod b (sums of second coordinates of
v_2v_3, v_4v_5, ...) and one seam residue psi(c_1) + phi(c_n) mod b. Every
receiver subtracts what it sees from the residues covering its own coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BudgetExceeded, ColourSpace, UsageError, check_colouring, factorize


def _check_n(n: int) -> int:
    if n < 3 or n % 2 == 0:
        raise UsageError(f"the cycle index code needs odd n >= 3, got n={n}")
    return (n - 1) // 2


def _space(space: ColourSpace | int) -> ColourSpace:
    return factorize(space) if isinstance(space, int) else space


@dataclass(frozen=True)
class Broadcast:
    n: int
    space: ColourSpace
    phi_residues: tuple[int, ...]
    psi_residues: tuple[int, ...]
    seam_residue: int

    def __post_init__(self):
        k = _check_n(self.n)
        a, b = self.space.a, self.space.b
        if len(self.phi_residues) != k or len(self.psi_residues) != k:
            raise UsageError(f"need {k} residues of each kind")
        if any(not 0 <= r < a for r in self.phi_residues):
            raise UsageError(f"first-coordinate residues must lie in Z_{a}")
        if any(not 0 <= r < b for r in self.psi_residues) or not 0 <= self.seam_residue < b:
            raise UsageError(f"second-coordinate and seam residues must lie in Z_{b}")

    def pack(self) -> int:
        """Mixed-radix integer in [0, m); the first phi residue is the least significant digit."""
        a, b = self.space.a, self.space.b
        digits = [(r, a) for r in self.phi_residues] + [(r, b) for r in self.psi_residues] + [(self.seam_residue, b)]
        code, scale = 0, 1
        for r, radix in digits:
            code += r * scale
            scale *= radix
        return code

    @classmethod
    def unpack(cls, code: int, n: int, space: ColourSpace | int) -> "Broadcast":
        space = _space(space)
        k = _check_n(n)
        m = message_space_size(n, space)
        if not 0 <= code < m:
            raise UsageError(f"packed broadcast {code} outside [0, {m})")
        out = []
        for radix in [space.a] * k + [space.b] * (k + 1):
            code, r = divmod(code, radix)
            out.append(r)
        return cls(n, space, tuple(out[:k]), tuple(out[k : 2 * k]), out[2 * k])

    def residues(self) -> list[int]:
        return [*self.phi_residues, *self.psi_residues, self.seam_residue]

    def __str__(self) -> str:
        return f"phi={list(self.phi_residues)} psi={list(self.psi_residues)} seam={self.seam_residue}"


def message_space_size(n: int, space: ColourSpace | int) -> int:
    """b * s^((n-1)/2) = a^((n-1)/2) * b^((n+1)/2)."""
    space = _space(space)
    k = _check_n(n)
    return space.b * space.s**k


def encode(c: Sequence[int], space: ColourSpace | int, n: int) -> Broadcast:
    space = _space(space)
    k = _check_n(n)
    c = check_colouring(c, n, space.s)
    a, b = space.a, space.b
    ph = [space.phi(x) for x in c]
    ps = [space.psi(x) for x in c]
    # 0-based: pair (v_{2i-1}, v_{2i}) is (2i-2, 2i-1); pair (v_{2i}, v_{2i+1}) is (2i-1, 2i)
    phi_res = tuple((ph[2 * i - 2] + ph[2 * i - 1]) % a for i in range(1, k + 1))
    psi_res = tuple((ps[2 * i - 1] + ps[2 * i]) % b for i in range(1, k + 1))
    seam = (ps[0] + ph[n - 1]) % b
    return Broadcast(n, space, phi_res, psi_res, seam)


def decode(i: int, left: int, right: int, msg: Broadcast) -> int:
    """Colour of vertex ``i`` (1-based) from its neighbours' colours and the broadcast."""
    n, sp = msg.n, msg.space
    if not 1 <= i <= n:
        raise UsageError(f"vertex {i} outside 1..{n}")
    a, b = sp.a, sp.b
    if i == 1:  # left = c_n, right = c_2
        x = (msg.phi_residues[0] - sp.phi(right)) % a
        y = (msg.seam_residue - sp.phi(left)) % b
    elif i == n:  # left = c_{n-1}, right = c_1
        x = (msg.seam_residue - sp.psi(right)) % b
        y = (msg.psi_residues[-1] - sp.psi(left)) % b
    elif i % 2 == 0:
        m = i // 2
        x = (msg.phi_residues[m - 1] - sp.phi(left)) % a
        y = (msg.psi_residues[m - 1] - sp.psi(right)) % b
    else:
        m = (i - 1) // 2
        x = (msg.phi_residues[m] - sp.phi(right)) % a
        y = (msg.psi_residues[m - 1] - sp.psi(left)) % b
    if x >= a:
        raise UsageError("broadcast is inconsistent with the side information at vertex n")
    return sp.pi(x, y)


def decode_all(c_side: Sequence[int], msg: Broadcast) -> tuple[int, ...]:
    """Every receiver's decoded colour, reading side information from ``c_side``."""
    n = msg.n
    return tuple(decode(i, c_side[(i - 2) % n], c_side[i % n], msg) for i in range(1, n + 1))


# -- vectorised forms for exhaustive checks ------------------------------------------------


def encode_packed_many(colourings: np.ndarray, space: ColourSpace | int) -> np.ndarray:
    """Packed broadcasts for each row of an ``(m, n)`` colouring array."""
    space = _space(space)
    c = np.asarray(colourings, dtype=np.int64)
    n = c.shape[1]
    k = _check_n(n)
    a, b = space.a, space.b
    ph, ps = c // b, c % b
    code = np.zeros(c.shape[0], dtype=np.int64)
    scale = 1
    for i in range(1, k + 1):
        code += ((ph[:, 2 * i - 2] + ph[:, 2 * i - 1]) % a) * scale
        scale *= a
    for i in range(1, k + 1):
        code += ((ps[:, 2 * i - 1] + ps[:, 2 * i]) % b) * scale
        scale *= b
    code += ((ps[:, 0] + ph[:, n - 1]) % b) * scale
    return code


def decode_many(colourings: np.ndarray, codes: np.ndarray, space: ColourSpace | int) -> np.ndarray:
    """Decoded colourings: row r, column i is receiver i's guess from its neighbours in row r."""
    space = _space(space)
    c = np.asarray(colourings, dtype=np.int64)
    n = c.shape[1]
    k = _check_n(n)
    a, b = space.a, space.b
    rem = np.asarray(codes, dtype=np.int64).copy()
    phi_res, psi_res = [], []
    for _ in range(k):
        phi_res.append(rem % a)
        rem //= a
    for _ in range(k):
        psi_res.append(rem % b)
        rem //= b
    seam = rem % b
    ph, ps = c // b, c % b
    out = np.empty_like(c)
    for i in range(1, n + 1):
        L, R = (i - 2) % n, i % n
        if i == 1:
            x = (phi_res[0] - ph[:, R]) % a
            y = (seam - ph[:, L]) % b
        elif i == n:
            x = (seam - ps[:, R]) % b
            y = (psi_res[-1] - ps[:, L]) % b
        elif i % 2 == 0:
            m = i // 2
            x = (phi_res[m - 1] - ph[:, L]) % a
            y = (psi_res[m - 1] - ps[:, R]) % b
        else:
            m = (i - 1) // 2
            x = (phi_res[m] - ph[:, R]) % a
            y = (psi_res[m - 1] - ps[:, L]) % b
        out[:, i - 1] = x * b + y
    return out


@dataclass
class RoundtripReport:
    n: int
    s: int
    colourings: int
    failures: int
    distinct_messages: int
    message_space: int

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.distinct_messages == self.message_space

    def line(self) -> str:
        return (
            f"{self.s}^{self.n} = {self.colourings} colourings, {self.failures} failures, "
            f"{self.distinct_messages} distinct messages"
        )

    def to_dict(self) -> dict:
        return {
            "kind": "index-roundtrip",
            "n": self.n,
            "s": self.s,
            "colourings": self.colourings,
            "failures": self.failures,
            "distinct_messages": self.distinct_messages,
            "message_space": self.message_space,
            "verdict": "PASS" if self.ok else "FAIL",
        }


def exhaustive_roundtrip(n: int, s: int, budget: int = 10**8, chunk: int = 1 << 20) -> RoundtripReport:
    """Encode and decode every colouring of C_n with s colours."""
    space = factorize(s)
    _check_n(n)
    total = s**n
    if total > budget:
        raise BudgetExceeded(f"roundtrip over {s}^{n} colourings", total, budget)
    seen = np.zeros(message_space_size(n, space), dtype=bool)
    failures = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        cols = np.stack(np.unravel_index(idx, (s,) * n), axis=1).astype(np.int64)
        codes = encode_packed_many(cols, space)
        seen[codes] = True
        failures += int(np.count_nonzero(np.any(decode_many(cols, codes, space) != cols, axis=1)))
    return RoundtripReport(n, s, total, failures, int(seen.sum()), message_space_size(n, space))
