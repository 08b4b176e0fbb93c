"""Confusion graphs of side-information graphs, and exact alpha / chi on them.

Vertices of the confusion graph are the s^n colourings, encoded as mixed-radix
integers with vertex 1 as the most significant digit (so integer order is
lexicographic order). Two colourings are adjacent when some vertex i sees the
same colours on its neighbours in both, yet its own colour differs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import solvers
from .core import BudgetExceeded, UsageError, factorize
from .protocol import Protocol, build_fcp, enumerate_fixed_set, fcp_fixed_count, make_protocol

DEFAULT_EXPLICIT_BUDGET = 2**14
DEFAULT_CHI_EXACT_LIMIT = 256
DEFAULT_TIME_BUDGET = 300.0


@dataclass(frozen=True)
class SideInfoGraph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]  # 0-based neighbour lists
    name: str = "graph"

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise UsageError("adjacency must list neighbours for every vertex")
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise UsageError(f"vertex {u + 1} out of range 1..{self.n}")
                if u == v:
                    raise UsageError(f"self-loop at vertex {v + 1}")
                if v not in self.adjacency[u]:
                    raise UsageError(f"adjacency not symmetric at {v + 1}-{u + 1}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "graph") -> "SideInfoGraph":
        """Build from 1-based edges."""
        nb: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise UsageError(f"edge {u} {v} out of range 1..{n}")
            if u == v:
                raise UsageError(f"self-loop at vertex {u}")
            nb[u - 1].add(v - 1)
            nb[v - 1].add(u - 1)
        return cls(n, tuple(tuple(sorted(x)) for x in nb), name)

    def edges(self) -> list[tuple[int, int]]:
        return [(v + 1, u + 1) for v in range(self.n) for u in self.adjacency[v] if v < u]

    def cycle_length(self) -> int | None:
        """n if this is C_n labelled 1-2-...-n-1, else None."""
        n = self.n
        if n < 3:
            return None
        want = {(i, i % n + 1) if i < i % n + 1 else (i % n + 1, i) for i in range(1, n + 1)}
        return n if set(self.edges()) == want else None


def cycle_graph(n: int) -> SideInfoGraph:
    if n < 3:
        raise UsageError("a cycle needs n >= 3")
    return SideInfoGraph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)], name=f"C_{n}")


def complete_graph(n: int) -> SideInfoGraph:
    return SideInfoGraph.from_edges(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)], name=f"K_{n}")


def loads_graph(text: str, name: str = "graph") -> SideInfoGraph:
    """Edge-list format: first line ``n`` (or ``n=<n>``), then one 1-based ``u v`` per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise UsageError("empty graph file")
    head = lines[0].replace("n=", "").replace("n ", "").strip()
    try:
        n = int(head)
        edges = [tuple(int(x) for x in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise UsageError("graph file: expected 'n' header then 'u v' lines") from exc
    if any(len(e) != 2 for e in edges):
        raise UsageError("graph file: every edge line needs exactly two vertices")
    return SideInfoGraph.from_edges(n, edges, name=name)


def load_graph(path) -> SideInfoGraph:
    return loads_graph(Path(path).read_text(), name=Path(path).stem)


def dumps_graph(g: SideInfoGraph) -> str:
    return f"{g.n}\n" + "".join(f"{u} {v}\n" for u, v in g.edges())


# -- the confusion graph ----------------------------------------------------------------


class ConfusionGraph:
    """Implicit adjacency oracle over Z_s^n, with an optional explicit bitset form."""

    def __init__(self, graph: SideInfoGraph, s: int):
        if s < 2:
            raise UsageError("need s >= 2")
        self.graph = graph
        self.s = s
        self.n = graph.n
        self.vertex_count = s**graph.n
        self._adj: list[int] | None = None

    def encode(self, c: Sequence[int]) -> int:
        code = 0
        for x in c:
            if not 0 <= x < self.s:
                raise UsageError(f"colour {x} not in Z_{self.s}")
            code = code * self.s + int(x)
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n):
            code, r = divmod(code, self.s)
            out.append(r)
        return tuple(reversed(out))

    def adjacent(self, c: Sequence[int], d: Sequence[int]) -> bool:
        """Direct test of the definition, O(n * max degree)."""
        nb = self.graph.adjacency
        for i in range(self.n):
            if c[i] != d[i] and all(c[j] == d[j] for j in nb[i]):
                return True
        return False

    @property
    def is_explicit(self) -> bool:
        return self._adj is not None

    def build(self, budget: int = DEFAULT_EXPLICIT_BUDGET) -> list[int]:
        """Materialise bitset adjacency (cached)."""
        if self._adj is not None:
            return self._adj
        N = self.vertex_count
        if N > budget:
            raise BudgetExceeded(f"explicit confusion graph with {self.s}^{self.n} vertices", N, budget)
        s, n = self.s, self.n
        digits = np.stack(np.unravel_index(np.arange(N), (s,) * n), axis=1) if n else np.zeros((1, 0), int)
        adj = [0] * N
        for i in range(n):
            nbrs = list(self.graph.adjacency[i])
            key = np.zeros(N, dtype=np.int64)
            for j in nbrs:
                key = key * s + digits[:, j]
            own = digits[:, i]
            for k in np.unique(key):
                in_group = key == k
                group = _mask(in_group)
                same = [_mask(in_group & (own == x)) for x in range(s)]
                for v in np.nonzero(in_group)[0].tolist():
                    adj[v] |= group & ~same[own[v]]
        self._adj = adj
        return adj

    def explicit_adjacent(self, u: int, v: int) -> bool:
        return bool(self.build()[u] >> v & 1)

    def is_independent(self, colourings: Iterable[Sequence[int]]) -> bool:
        """Checks pairwise non-adjacency with the direct definition (no bitsets)."""
        cs = [tuple(c) for c in colourings]
        return all(not self.adjacent(cs[x], cs[y]) for x in range(len(cs)) for y in range(x + 1, len(cs)))


def _mask(flags: np.ndarray) -> int:
    return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")


def build_confusion(g: SideInfoGraph, s: int, budget: int | None = DEFAULT_EXPLICIT_BUDGET) -> ConfusionGraph:
    """Confusion graph of (g, s). Builds the explicit form when within ``budget``;
    otherwise only the implicit oracle is available."""
    cg = ConfusionGraph(g, s)
    if budget is not None and cg.vertex_count <= budget:
        cg.build(budget)
    return cg


def is_codeable(g: SideInfoGraph, s: int, colourings: Iterable[Sequence[int]]) -> bool:
    """True iff each vertex's colour is a function of its neighbours' colours on the set."""
    seen: list[dict] = [dict() for _ in range(g.n)]
    for c in colourings:
        for i in range(g.n):
            key = tuple(c[j] for j in g.adjacency[i])
            if seen[i].setdefault(key, c[i]) != c[i]:
                return False
    return True


def protocol_from_codebook(n: int, s: int, colourings: Iterable[Sequence[int]]) -> Protocol:
    """A cycle protocol whose fixed set contains every colouring of a codeable set.

    Unconstrained table entries are 0.
    """
    tables = np.zeros((n, s, s), dtype=np.int64)
    for c in colourings:
        for i in range(n):
            tables[i, c[(i - 1) % n], c[(i + 1) % n]] = c[i]
    return make_protocol(n, s, tables, name="codebook")


# -- alpha and chi ------------------------------------------------------------------------


@dataclass
class MISResult:
    alpha: int
    witness: list[tuple[int, ...]]
    exact: bool
    nodes: int


def max_independent_set(cg: ConfusionGraph, time_budget: float | None = DEFAULT_TIME_BUDGET) -> MISResult:
    """Exact alpha of the confusion graph, or the best lower bound with ``exact=False``."""
    if not cg.is_explicit:
        raise BudgetExceeded("max_independent_set needs the explicit confusion graph", cg.vertex_count, 0)
    res = solvers.max_independent_set(cg.build(), time_budget)
    return MISResult(res.size, [cg.decode(v) for v in res.members], res.exact, res.nodes)


def chromatic_number(
    cg: ConfusionGraph,
    time_budget: float | None = DEFAULT_TIME_BUDGET,
    exact_limit: int = DEFAULT_CHI_EXACT_LIMIT,
    alpha: int | None = None,
) -> solvers.ChromaticResult:
    """Exact chi when small enough, else a labelled interval.

    With an exact ``alpha`` the counting bound ceil(s^n / alpha) joins the lower bound.
    """
    if not cg.is_explicit:
        raise BudgetExceeded("chromatic_number needs the explicit confusion graph", cg.vertex_count, 0)
    extra = solvers.ceil_div(cg.vertex_count, alpha) if alpha else 0
    return solvers.chromatic_number(cg.build(), time_budget, exact_limit, extra_lower=extra)


@dataclass
class ConfusionGraphStats:
    graph: str
    n: int
    s: int
    vertex_count: int
    alpha: int | None = None
    alpha_exact: bool = False
    witness: list[tuple[int, ...]] = field(default_factory=list)
    chi_lower: int | None = None
    chi_upper: int | None = None
    chi_exact: bool = False
    chi_reason: str = ""
    fcp_fix: int | None = None
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def chi(self) -> int | None:
        return self.chi_lower if self.chi_exact else None

    @property
    def gn(self) -> float | None:
        return math.log(self.alpha) / math.log(self.s) if self.alpha else None

    @property
    def beta(self) -> float | None:
        return math.log(self.chi) / math.log(self.s) if self.chi else None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self, witness_path: str | None = None) -> dict:
        out: dict = {
            "kind": "confusion-stats",
            "graph": self.graph,
            "n": self.n,
            "s": self.s,
            "vertex_count": self.vertex_count,
        }
        if self.alpha is not None:
            out["alpha"] = self.alpha
            out["alpha_status"] = "exact" if self.alpha_exact else "lower-bound"
            out["gn"] = self.gn
            out["gn_status"] = "exact" if self.alpha_exact else "lower-bound"
        if self.chi_lower is not None:
            if self.chi_exact:
                out["chi"] = self.chi
                out["beta"] = self.beta
            else:
                out["chi_interval"] = [self.chi_lower, self.chi_upper]
                out["beta_interval"] = [math.log(self.chi_lower) / math.log(self.s), math.log(self.chi_upper) / math.log(self.s)]
            out["chi_status"] = "exact" if self.chi_exact else "interval"
            out["chi_reason"] = self.chi_reason
        if self.fcp_fix is not None:
            out["fcp_fix"] = self.fcp_fix
        out["checks"] = {k: ("PASS" if v else "FAIL") for k, v in self.checks.items()}
        if witness_path:
            out["witness_path"] = witness_path
        return out


def gn_beta_report(
    g: SideInfoGraph,
    s: int,
    want_alpha: bool = True,
    want_chi: bool = True,
    time_budget: float | None = DEFAULT_TIME_BUDGET,
    explicit_budget: int = DEFAULT_EXPLICIT_BUDGET,
    chi_exact_limit: int = DEFAULT_CHI_EXACT_LIMIT,
) -> ConfusionGraphStats:
    cg = ConfusionGraph(g, s)
    cg.build(explicit_budget)
    st = ConfusionGraphStats(g.name, g.n, s, cg.vertex_count)
    N = cg.vertex_count
    if want_alpha or want_chi:
        mis = max_independent_set(cg, time_budget)
        st.alpha, st.alpha_exact, st.witness = mis.alpha, mis.exact, mis.witness
        st.checks["witness-independent"] = cg.is_independent(mis.witness)
        st.checks["witness-codeable"] = is_codeable(g, s, mis.witness)
        cyc = g.cycle_length()
        if cyc is not None and cyc >= 4:
            # alpha <= s^(n/2), compared exactly as alpha^2 <= s^n
            st.checks["alpha-le-s^(n/2)"] = mis.alpha**2 <= N
        if cyc is not None and cyc % 2 == 1:
            st.fcp_fix = fcp_fixed_count(cyc, s)
            st.checks["alpha-ge-fcp-fix"] = mis.alpha >= st.fcp_fix
    if want_chi:
        chi = chromatic_number(cg, time_budget, chi_exact_limit, alpha=st.alpha if st.alpha_exact else None)
        st.chi_lower, st.chi_upper, st.chi_exact, st.chi_reason = chi.lower, chi.upper, chi.exact, chi.reason
        st.checks["colouring-proper"] = solvers.is_proper_colouring(cg.build(), chi.colouring)
        if chi.exact and st.alpha_exact:
            st.checks["alpha*chi>=s^n"] = st.alpha * chi.lower >= N
            st.checks["gn+beta>=n"] = st.gn + st.beta >= g.n - 1e-9
    if not want_alpha:
        st.alpha = None
    return st
