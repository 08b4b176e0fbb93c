"""Local functions f: Z_s^2 -> Z_s: flat / semi-perfect / perfect classification,
(k, eps)-uniformity, and the certified constants eps, delta_1, delta_2, delta, N."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .core import ColourSpace, CycleGuessError, UsageError, factorize
from .entropy import DEFAULT_TOLERANCE, entropy_from_counts

CONSTANTS_MAX_S = 3


class InfeasibleError(CycleGuessError):
    """An exhaustive computation is too large to run."""


@dataclass(frozen=True, eq=False)
class LocalFunction:
    space: ColourSpace
    table: np.ndarray

    def __post_init__(self):
        s = self.space.s
        t = np.array(self.table, dtype=np.int64)
        if t.shape != (s, s):
            raise UsageError(f"table must be {s}x{s}, got {t.shape}")
        if t.min() < 0 or t.max() >= s:
            raise UsageError(f"table entries must lie in [0, {s})")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def s(self) -> int:
        return self.space.s

    @classmethod
    def from_callable(cls, s: int, fn: Callable[[int, int], int]) -> "LocalFunction":
        return cls(factorize(s), np.array([[fn(x, y) for y in range(s)] for x in range(s)]))

    def preimage(self, z: int) -> set[tuple[int, int]]:
        xs, ys = np.nonzero(self.table == z)
        return set(zip(xs.tolist(), ys.tolist()))


def builtin_function(name: str, s: int) -> LocalFunction:
    """``xor`` (x + y mod s), ``xnor`` (x - y mod s), ``proj`` (x), ``pi`` (pi(phi(x), psi(y))), ``zero``."""
    space = factorize(s)
    makers = {
        "xor": lambda x, y: (x + y) % s,
        "xnor": lambda x, y: (x - y) % s,
        "proj": lambda x, y: x,
        "pi": lambda x, y: space.pi(space.phi(x), space.psi(y)),
        "zero": lambda x, y: 0,
    }
    if name not in makers:
        raise UsageError(f"unknown builtin function {name!r}; choose from {sorted(makers)}")
    return LocalFunction.from_callable(s, makers[name])


@dataclass
class FunctionClass:
    is_flat: bool
    is_semi_perfect: bool
    is_perfect: bool
    cond_mi: float
    preimage_sizes: list[int]
    L_sizes: list[int]
    R_sizes: list[int]

    def label(self) -> str:
        if self.is_perfect:
            return "perfect"
        if self.is_semi_perfect:
            return "semi-perfect"
        if self.is_flat:
            return "flat"
        return "not-flat"

    def to_dict(self) -> dict:
        return {
            "kind": "function-class",
            "class": self.label(),
            "flat": self.is_flat,
            "semi_perfect": self.is_semi_perfect,
            "perfect": self.is_perfect,
            "cond_mi": self.cond_mi,
            "preimage_sizes": list(self.preimage_sizes),
            "L_sizes": list(self.L_sizes),
            "R_sizes": list(self.R_sizes),
        }


def conditional_mi(table: np.ndarray, s: int) -> float:
    """I(U_1; U_2 | f(U)) in base s for U uniform on Z_s^2."""
    t = np.asarray(table)
    z = t.ravel()
    x = np.repeat(np.arange(s), s)
    y = np.tile(np.arange(s), s)
    h_xz = entropy_from_counts(np.unique(x * s + z, return_counts=True)[1], s)
    h_yz = entropy_from_counts(np.unique(y * s + z, return_counts=True)[1], s)
    h_z = entropy_from_counts(np.unique(z, return_counts=True)[1], s)
    # (U_1, U_2, f(U)) is a relabelling of U, so its entropy is exactly 2.
    return h_xz + h_yz - 2.0 - h_z


def lr_sets(f: LocalFunction, z: int) -> tuple[set[int], set[int]]:
    if not 0 <= z < f.s:
        raise UsageError(f"colour {z} not in Z_{f.s}")
    hit = f.table == z
    return set(np.nonzero(hit.any(axis=1))[0].tolist()), set(np.nonzero(hit.any(axis=0))[0].tolist())


def classify(f: LocalFunction, tol: float = DEFAULT_TOLERANCE) -> FunctionClass:
    s = f.s
    sizes = np.bincount(f.table.ravel(), minlength=s)
    flat = bool(np.all(sizes == s))
    cmi = conditional_mi(f.table, s)
    L = [len(lr_sets(f, z)[0]) for z in range(s)]
    R = [len(lr_sets(f, z)[1]) for z in range(s)]
    semi = flat and abs(cmi) <= tol
    perfect = semi and len(set(L)) == 1 and len(set(R)) == 1
    return FunctionClass(flat, semi, perfect, cmi, sizes.tolist(), L, R)


def is_k_eps_uniform(probs: Sequence[float], k: int, eps: float) -> bool:
    """True iff every one of the k outcome probabilities is within eps of 1/k."""
    probs = list(probs)
    if len(probs) != k:
        raise UsageError(f"distribution declares {len(probs)} outcomes but k={k}")
    return all(abs(p - 1.0 / k) <= eps for p in probs)


def uniformity_bound(k: int, eps: float, s: int) -> float:
    """log_s k - (k eps^2 / 3) / ln s: entropy ceiling for a k-outcome variable that is
    not (k, eps)-uniform, valid while 7 k eps < 1."""
    return math.log(k) / math.log(s) - (k * eps * eps / 3.0) / math.log(s)


# -- exhaustive enumeration ----------------------------------------------------------


def iter_flat_tables(s: int) -> Iterator[np.ndarray]:
    """Every flat table, generated by splitting the s^2 cells into s labelled blocks of size s."""
    cells = tuple(range(s * s))

    def split(remaining: tuple[int, ...], z: int, table: list[int]):
        if z == s - 1:
            for c in remaining:
                table[c] = z
            yield np.array(table).reshape(s, s)
            return
        # labels are distinguishable: any s-subset of the free cells may take label z
        for block in itertools.combinations(remaining, s):
            left = tuple(c for c in remaining if c not in block)
            for c in block:
                table[c] = z
            yield from split(left, z + 1, table)

    yield from split(cells, 0, [0] * (s * s))


def iter_all_tables(s: int) -> Iterator[np.ndarray]:
    for entries in itertools.product(range(s), repeat=s * s):
        yield np.array(entries).reshape(s, s)


def flat_function_count(s: int) -> int:
    return math.factorial(s * s) // math.factorial(s) ** s


@dataclass
class ConstantsReport:
    s: int
    epsilon: float
    delta1: float
    delta2: float
    delta: float
    N: int
    candidate_count: int
    non_semi_perfect_count: int
    argmin_table: list[list[int]]
    min_cond_mi: float
    epsilon_cap: float
    epsilon_cont: float
    epsilon_trace: list[dict] = field(default_factory=list)
    delta2_alt: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": "constants-report",
            "s": self.s,
            "epsilon": self.epsilon,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta": self.delta,
            "N": self.N,
            "flat_candidates": self.candidate_count,
            "flat_non_semi_perfect": self.non_semi_perfect_count,
            "min_cond_mi": self.min_cond_mi,
            "argmin_table": self.argmin_table,
            "epsilon_cap": self.epsilon_cap,
            "epsilon_cont": self.epsilon_cont,
            "epsilon_trace": self.epsilon_trace,
            "delta2_reading_log_s_e": self.delta2,
            "delta2_reading_ln_s": self.delta2_alt,
        }


def _binary_entropy_nats(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


def mi_continuity_bound(s: int, eps: float) -> float:
    """Upper bound on |I(Y_1;Y_3|Y_2) - I(U_1;U_2|f(U))| when (Y_1, Y_3) is (s^2, eps)-uniform.

    Each of the four entropies in the conditional MI is a function of (Y_1, Y_3); its
    change is bounded by tau log_s D + h(tau)/ln s with tau = s^2 eps and D the size
    of that entropy's outcome space (s^2 for the three joint terms, s for f alone).
    Returns inf when tau > 1/2, where the binary-entropy term stops being monotone.
    """
    tau = s * s * eps
    if tau > 0.5:
        return math.inf
    ln_s = math.log(s)

    def term(D: int) -> float:
        return tau * math.log(D) / ln_s + _binary_entropy_nats(tau) / ln_s

    return 3 * term(s * s) + term(s)


def compute_constants(s: int, tol: float = DEFAULT_TOLERANCE, max_j: int = 200) -> ConstantsReport:
    if s < 2:
        raise UsageError("need s >= 2")
    if s > CONSTANTS_MAX_S:
        raise InfeasibleError(
            f"constants enumeration infeasible for s={s}: {s}^{s * s} = {s ** (s * s)} functions "
            f"({flat_function_count(s)} flat); supported s <= {CONSTANTS_MAX_S}"
        )
    best, arg, count, bad = math.inf, None, 0, 0
    for t in iter_flat_tables(s):
        count += 1
        cmi = conditional_mi(t, s)
        if cmi > tol:
            bad += 1
            if cmi < best - 1e-15:
                best, arg = cmi, t
    delta1 = best / 2

    cap = 1.0 / (s * s * (2 * s + 1))
    trace = []
    eps_cont = 0.0
    for j in range(1, max_j + 1):
        e = 2.0**-j
        bound = mi_continuity_bound(s, e)
        trace.append({"j": j, "eps": e, "bound": bound, "ok": bound <= delta1})
        if bound <= delta1:
            eps_cont = e
            break
    # 7 k eps < 1 with k = s^2 keeps the uniformity bound valid for both k = s and k = s^2.
    taylor_cap = 1.0 / (7 * s * s)
    epsilon = min(cap, eps_cont)
    if not epsilon < taylor_cap:
        epsilon = min(epsilon, taylor_cap / 2)
    delta2 = (s * epsilon**2 / 3) / math.log(s)
    delta2_alt = (s * epsilon**2 / 3) * math.log(s)
    delta = min(delta1, delta2)
    N = math.ceil(7 * (1 / delta + 2))
    return ConstantsReport(
        s=s,
        epsilon=epsilon,
        delta1=delta1,
        delta2=delta2,
        delta=delta,
        N=N,
        candidate_count=count,
        non_semi_perfect_count=bad,
        argmin_table=arg.tolist() if arg is not None else [],
        min_cond_mi=best,
        epsilon_cap=cap,
        epsilon_cont=eps_cont,
        epsilon_trace=trace,
        delta2_alt=delta2_alt,
    )
