"""Exact base-s entropies of X drawn uniformly from a fixed set, and lemma audits.

Every entropy is computed from integer multiplicities over the fixed set; floats
only appear at the final logarithm.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import CycleGuessError, UsageError
from .protocol import FixedSet, Protocol, enumerate_fixed_set

DEFAULT_TOLERANCE = 1e-9
EXHAUSTIVE_MAX_N = 9
SAMPLE_PER_INEQUALITY = 1000


class TrivialProtocolError(CycleGuessError):
    """X is undefined because the fixed set is empty."""


def entropy_from_counts(counts: Iterable[int], base: float) -> float:
    """Entropy (log base ``base``) of the distribution proportional to integer ``counts``."""
    counts = [int(c) for c in counts if c > 0]
    total = sum(counts)
    if total == 0:
        raise ValueError("empty distribution")
    if len(counts) == 1:
        return 0.0
    nats = math.log(total) - math.fsum(c * math.log(c) for c in counts) / total
    return nats / math.log(base)


class EmpiricalDistribution:
    """The uniform distribution of X = (X_1, ..., X_n) over a set of colourings."""

    def __init__(self, members: np.ndarray, s: int):
        members = np.asarray(members, dtype=np.int64)
        if members.ndim != 2 or members.shape[0] == 0:
            raise TrivialProtocolError("entropy is only defined for non-trivial protocols (empty fixed set)")
        self.members = members
        self.s = int(s)
        self.n = members.shape[1]
        self._cache: dict[frozenset, float] = {frozenset(): 0.0}
        self._weights = self.s ** np.arange(self.n, dtype=np.int64)

    @classmethod
    def from_fixed_set(cls, fs: FixedSet) -> "EmpiricalDistribution":
        return cls(fs.members, fs.protocol.s)

    @classmethod
    def from_protocol(cls, p: Protocol, **kw) -> "EmpiricalDistribution":
        return cls.from_fixed_set(enumerate_fixed_set(p, **kw))

    @property
    def support_size(self) -> int:
        return self.members.shape[0]

    def _key(self, indices: Iterable[int]) -> frozenset:
        key = set()
        for i in indices:
            i = int(i)
            if not 1 <= i <= self.n:
                raise UsageError(f"vertex index {i} outside 1..{self.n}")
            key.add(i - 1)
        return frozenset(key)

    def counts(self, indices: Iterable[int]) -> np.ndarray:
        """Multiplicities of each observed value of the projection onto ``indices``."""
        cols = sorted(self._key(indices))
        if not cols:
            return np.array([self.support_size])
        codes = self.members[:, cols] @ self._weights[: len(cols)]
        return np.unique(codes, return_counts=True)[1]

    def h(self, indices: Iterable[int]) -> float:
        key = self._key(indices)
        if key not in self._cache:
            self._cache[key] = entropy_from_counts(self.counts(i + 1 for i in key), self.s)
        return self._cache[key]


def joint_entropy(d: EmpiricalDistribution, indices: Iterable[int]) -> float:
    return d.h(indices)


def mutual_information(d: EmpiricalDistribution, I: Sequence[int], J: Sequence[int]) -> float:
    return d.h(I) + d.h(J) - d.h([*I, *J])


def conditional_mutual_information(
    d: EmpiricalDistribution, I: Sequence[int], J: Sequence[int], B: Sequence[int]
) -> float:
    return d.h([*I, *B]) + d.h([*J, *B]) - d.h([*I, *J, *B]) - d.h(B)


def _window(n: int, j: int, k: int) -> list[int]:
    """1-based cyclic run j, j+1, ..., k."""
    return [(i - 1) % n + 1 for i in range(j, k + 1)]


def _H(d: EmpiricalDistribution, j: int, k: int) -> float:
    return d.h(_window(d.n, j, k - 1)) + d.h(_window(d.n, j + 1, k))


def H_range(d: EmpiricalDistribution, j: int, k: int) -> float:
    """h(j..k-1) + h(j+1..k) for 1 <= j < k <= n."""
    if not 1 <= j < k <= d.n:
        raise UsageError(f"need 1 <= j < k <= {d.n}, got j={j}, k={k}")
    return _H(d, j, k)


# -- audits -------------------------------------------------------------------------


@dataclass
class InequalityRecord:
    name: str
    lhs: float
    rhs: float
    relation: str  # "<=" or "=="
    tolerance: float

    @property
    def slack(self) -> float:
        if self.relation == "==":
            return -abs(self.rhs - self.lhs)
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.slack >= -self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "relation": self.relation,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "verdict": "PASS" if self.ok else "FAIL",
        }


@dataclass
class EntropyReport:
    protocol: str
    n: int
    s: int
    fix: int
    H_X: float
    h: list[float]
    joint: dict[str, float]
    H_ranges: dict[str, float]
    checks: list[InequalityRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[InequalityRecord]:
        return [c for c in self.checks if not c.ok]

    def min_slack(self, prefix: str = "") -> float:
        slacks = [c.slack for c in self.checks if c.name.startswith(prefix)]
        return min(slacks) if slacks else math.inf

    def summary(self) -> dict[str, dict]:
        groups: dict[str, dict] = {}
        for c in self.checks:
            family = c.name.split("[", 1)[0]
            g = groups.setdefault(family, {"checked": 0, "failed": 0, "min_slack": math.inf})
            g["checked"] += 1
            g["failed"] += 0 if c.ok else 1
            g["min_slack"] = min(g["min_slack"], c.slack)
        return groups

    def to_dict(self, include_records: bool = True) -> dict:
        out = {
            "kind": "entropy-report",
            "protocol": self.protocol,
            "n": self.n,
            "s": self.s,
            "fix": self.fix,
            "H_X": self.H_X,
            "h": {str(i + 1): v for i, v in enumerate(self.h)},
            "joint": dict(self.joint),
            "H_ranges": dict(self.H_ranges),
            "verdict": "PASS" if self.ok else "FAIL",
            "summary": self.summary(),
        }
        if include_records:
            out["inequalities"] = [c.to_dict() for c in self.checks]
        return out


def _segmentations(n: int) -> list[list[int]]:
    """All sequences 1 = d_1 < ... < d_k = n with k >= 2 and d_{i+1} >= d_i + 2."""
    out = []

    def grow(seq):
        last = seq[-1]
        if last == n:
            out.append(list(seq))
            return
        for nxt in range(last + 2, n + 1):
            if n - nxt == 1:  # a final gap of one cannot be closed
                continue
            grow(seq + [nxt])

    grow([1])
    return out


def _limit(items: list, rng: random.Random, exhaustive: bool, sample: int) -> list:
    if exhaustive or len(items) <= sample:
        return items
    return rng.sample(items, sample)


def audit_distribution(
    d: EmpiricalDistribution,
    name: str = "custom",
    tol: float = DEFAULT_TOLERANCE,
    seed: int = 0,
    exhaustive_max_n: int = EXHAUSTIVE_MAX_N,
    sample: int = SAMPLE_PER_INEQUALITY,
) -> EntropyReport:
    """Check the entropy identities and inequalities that hold for every non-trivial
    protocol on C_n, using ``d`` as the distribution of X."""
    n, s = d.n, d.s
    rng = random.Random(seed)
    exhaustive = n <= exhaustive_max_n
    checks: list[InequalityRecord] = []

    def rec(label, lhs, rhs, rel="<="):
        checks.append(InequalityRecord(label, float(lhs), float(rhs), rel, tol))

    everything = list(range(1, n + 1))
    HX = d.h(everything)
    fix = d.support_size
    hs = [d.h([i]) for i in everything]

    rec("log-fix[H(X)=log_s fix]", HX, math.log(fix) / math.log(s), "==")
    for i in everything:
        rec(f"h-le-1[{i}]", hs[i - 1], 1.0)

    # Non-negativity of MI and conditional MI between neighbours-of-neighbours.
    for i, j in itertools.combinations(everything, 2):
        rec(f"mi-nonneg[{i};{j}]", 0.0, mutual_information(d, [i], [j]))
    for i in everything:
        left, right = (i - 2) % n + 1, i % n + 1
        rec(f"cmi-nonneg[{left};{right}|{i}]", 0.0, conditional_mutual_information(d, [left], [right], [i]))

    # Determinism: X_i is a function of X_{i-1}, X_{i+1}, so it can be dropped from any
    # index set that keeps both neighbours.
    drops = []
    for i in everything:
        left, right = (i - 2) % n, i % n
        others = [v for v in range(n) if v not in (i - 1, left, right)]
        if exhaustive:
            for r in range(len(others) + 1):
                for extra in itertools.combinations(others, r):
                    drops.append((i, {left, right, *extra}))
        else:
            for _ in range(max(1, sample // n)):
                extra = [v for v in others if rng.random() < 0.5]
                drops.append((i, {left, right, *extra}))
    for i, base in drops:
        with_i = sorted(v + 1 for v in base | {i - 1})
        without = sorted(v + 1 for v in base)
        rec(f"drop-vertex[{i} from {','.join(map(str, with_i))}]", d.h(with_i), d.h(without), "==")

    # Sub-additivity of H over split ranges.
    triples = [(i, j, k) for i in everything for j in everything for k in everything if i < j and j + 1 < k]
    for i, j, k in _limit(triples, rng, exhaustive, sample):
        rec(f"H-split[{i},{j},{k}]", _H(d, i, k), _H(d, i, j) + _H(d, j + 1, k))

    pairs = [(j, k) for j in everything for k in everything if j + 3 <= k]
    for j, k in _limit(pairs, rng, exhaustive, sample):
        rec(f"H-le-sum-h[{j},{k}]", _H(d, j, k), math.fsum(hs[j - 1 : k]))

    rec(f"H-full[H_1^{n}=2H(X)]", _H(d, 1, n), 2 * HX, "==")
    segs = [seq for seq in _segmentations(n) if len(seq) > 2]
    for seq in _limit(segs, rng, exhaustive, sample):
        total = _H(d, seq[0], seq[1]) + math.fsum(_H(d, a + 1, b) for a, b in zip(seq[1:], seq[2:]))
        rec(f"H-segments[{','.join(map(str, seq))}]", 2 * HX, total)

    if n >= 5:
        for j in everything:
            w = _window(n, j, j + 4)
            x1, x2, x3, x4, x5 = w
            cmi = conditional_mutual_information(d, [x2], [x4], [x3])
            tag = ",".join(map(str, w))
            H15 = _H(d, j, j + 4)
            rec(f"five-window[{tag}]", H15, 3 + d.h([x2, x4]) - cmi)
            rec(f"five-window-strong[{tag}]", H15, d.h([x1]) + d.h([x3]) + d.h([x5]) + d.h([x2, x4]) - cmi)
            # the individual steps that add up to the five-window bound
            rec(f"step-cmi[{tag}]", d.h([x2, x3, x4]) + d.h([x3]), d.h([x2, x3]) + d.h([x3, x4]) - cmi, "==")
            rec(f"step-shannon-left[{tag}]", d.h([x1, x2, x3, x4]) + d.h([x2, x3]), d.h([x1, x2, x3]) + d.h([x2, x3, x4]))
            rec(f"step-shannon-right[{tag}]", d.h([x2, x3, x4, x5]) + d.h([x3, x4]), d.h([x2, x3, x4]) + d.h([x3, x4, x5]))
            rec(f"step-func-left[{tag}]", d.h([x1, x2, x3]), d.h([x1, x3]), "==")
            rec(f"step-subadd-left[{tag}]", d.h([x1, x3]), d.h([x1]) + d.h([x3]))
            rec(f"step-func-mid[{tag}]", d.h([x2, x3, x4]), d.h([x2, x4]), "==")
            rec(f"step-func-right[{tag}]", d.h([x3, x4, x5]), d.h([x3, x5]), "==")
            rec(f"step-subadd-right[{tag}]", d.h([x3, x5]), d.h([x3]) + d.h([x5]))

    joint = {",".join(map(str, _window(n, i, i + 1))): d.h(_window(n, i, i + 1)) for i in everything}
    joint.update({",".join(map(str, (i, (i + 1) % n + 1))): d.h([i, (i + 1) % n + 1]) for i in everything})
    joint["all"] = HX
    H_ranges = {f"{j},{k}": _H(d, j, k) for j in everything for k in everything if j < k}
    return EntropyReport(name, n, s, fix, HX, hs, joint, H_ranges, checks)


def audit_lemmas(p: Protocol, tol: float = DEFAULT_TOLERANCE, seed: int = 0, **kw) -> EntropyReport:
    budget = kw.pop("budget", None)
    fs = enumerate_fixed_set(p) if budget is None else enumerate_fixed_set(p, budget=budget)
    if fs.count == 0:
        raise TrivialProtocolError("audit needs a non-trivial protocol (empty fixed set)")
    return audit_distribution(EmpiricalDistribution.from_fixed_set(fs), name=p.name, tol=tol, seed=seed, **kw)
