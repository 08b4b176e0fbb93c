"""Exact maximum-clique / independent-set and chromatic-number search on bitset graphs.

Graphs are lists of Python ints: bit ``u`` of ``adj[v]`` is set iff u ~ v.
Both searches are single-threaded and deterministic (ties broken by vertex index).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass


class SearchTimeout(Exception):
    pass


def popcount(x: int) -> int:
    return bin(x).count("1")


def iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def complement(adj: list[int]) -> list[int]:
    full = (1 << len(adj)) - 1
    return [full & ~a & ~(1 << v) for v, a in enumerate(adj)]


def degeneracy_order(adj: list[int]) -> list[int]:
    """Smallest-last ordering; returned with the last-removed (densest core) vertex first."""
    n = len(adj)
    alive = (1 << n) - 1
    deg = [popcount(a) for a in adj]
    removed = []
    for _ in range(n):
        v = min(iter_bits(alive), key=lambda u: (deg[u], u))
        removed.append(v)
        alive &= ~(1 << v)
        for u in iter_bits(adj[v] & alive):
            deg[u] -= 1
    return removed[::-1]


@dataclass
class CliqueResult:
    size: int
    members: list[int]
    exact: bool
    nodes: int


def max_clique(adj: list[int], time_budget: float | None = None, lower: list[int] | None = None) -> CliqueResult:
    """Branch and bound maximum clique with greedy-colouring bounds (bitset MCQ style).

    On timeout the best clique found so far is returned with ``exact=False``.
    """
    n = len(adj)
    if n == 0:
        return CliqueResult(0, [], True, 0)
    order = degeneracy_order(adj)
    pos = {v: i for i, v in enumerate(order)}
    # relabel so bit order follows the degeneracy order
    radj = [0] * n
    for v in range(n):
        m = 0
        for u in iter_bits(adj[v]):
            m |= 1 << pos[u]
        radj[pos[v]] = m

    best = [list(pos[v] for v in lower)] if lower else [[]]
    nodes = [0]
    deadline = None if time_budget is None else time.monotonic() + time_budget

    def colour_sort(P: int):
        # greedy colour classes; returns vertices in class order with their class numbers
        verts, cols = [], []
        k = 0
        U = P
        while U:
            k += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~low & ~radj[v]
                U &= ~low
                verts.append(v)
                cols.append(k)
        return verts, cols

    def expand(R: list[int], P: int):
        nodes[0] += 1
        if deadline is not None and nodes[0] % 256 == 0 and time.monotonic() > deadline:
            raise SearchTimeout
        verts, cols = colour_sort(P)
        for idx in range(len(verts) - 1, -1, -1):
            if len(R) + cols[idx] <= len(best[0]):
                return
            v = verts[idx]
            R.append(v)
            NP = P & radj[v]
            if NP:
                expand(R, NP)
            elif len(R) > len(best[0]):
                best[0] = list(R)
            R.pop()
            P &= ~(1 << v)

    exact = True
    try:
        expand([], (1 << n) - 1)
    except SearchTimeout:
        exact = False
    members = sorted(order[v] for v in best[0])
    return CliqueResult(len(members), members, exact, nodes[0])


def max_independent_set(adj: list[int], time_budget: float | None = None) -> CliqueResult:
    return max_clique(complement(adj), time_budget)


def greedy_clique(adj: list[int], starts: int = 64) -> list[int]:
    """Best maximal clique grown greedily from each of the ``starts`` highest-degree vertices."""
    n = len(adj)
    best: list[int] = []
    for start in sorted(range(n), key=lambda v: (-popcount(adj[v]), v))[:starts]:
        R = [start]
        P = adj[start]
        while P:
            v = max(iter_bits(P), key=lambda u: (popcount(adj[u] & P), -u))
            R.append(v)
            P &= adj[v]
        if len(R) > len(best):
            best = R
    return sorted(best)


def dsatur_colouring(adj: list[int]) -> list[int]:
    """Greedy DSATUR colouring (upper bound)."""
    n = len(adj)
    colour = [-1] * n
    nbr_cols = [0] * n
    deg = [popcount(a) for a in adj]
    for _ in range(n):
        v = max((u for u in range(n) if colour[u] < 0), key=lambda u: (popcount(nbr_cols[u]), deg[u], -u))
        forbidden = nbr_cols[v]
        c = 0
        while forbidden >> c & 1:
            c += 1
        colour[v] = c
        for u in iter_bits(adj[v]):
            nbr_cols[u] |= 1 << c
    return colour


def is_proper_colouring(adj: list[int], colour: list[int]) -> bool:
    return all(colour[u] != colour[v] for v in range(len(adj)) for u in iter_bits(adj[v]))


def k_colourable(adj: list[int], k: int, deadline: float | None = None, seed_clique: list[int] | None = None):
    """Exact DSATUR backtracking: a proper colouring with at most k colours, or None.

    Raises ``SearchTimeout`` past ``deadline``.
    """
    n = len(adj)
    colour = [-1] * n
    nbr_count = [[0] * k for _ in range(n)]  # neighbours of v holding each colour
    sat = [0] * n
    deg = [popcount(a) for a in adj]
    nodes = [0]

    def assign(v, c):
        colour[v] = c
        for u in iter_bits(adj[v]):
            if nbr_count[u][c] == 0:
                sat[u] += 1
            nbr_count[u][c] += 1

    def unassign(v, c):
        colour[v] = -1
        for u in iter_bits(adj[v]):
            nbr_count[u][c] -= 1
            if nbr_count[u][c] == 0:
                sat[u] -= 1

    seed_clique = seed_clique or []
    if len(seed_clique) > k:
        return None
    for c, v in enumerate(seed_clique):
        assign(v, c)

    def search(left: int, used: int) -> bool:
        nodes[0] += 1
        if deadline is not None and nodes[0] % 512 == 0 and time.monotonic() > deadline:
            raise SearchTimeout
        if left == 0:
            return True
        v = -1
        key = None
        for u in range(n):
            if colour[u] < 0:
                kk = (sat[u], deg[u], -u)
                if key is None or kk > key:
                    key, v = kk, u
        if sat[v] >= k:
            return False
        # any unused colour is interchangeable with the others, so try just one of them
        for c in range(min(used + 1, k)):
            if nbr_count[v][c]:
                continue
            assign(v, c)
            if search(left - 1, max(used, c + 1)):
                return True
            unassign(v, c)
        return False

    if search(n - len(seed_clique), len(seed_clique)):
        return list(colour)
    return None


@dataclass
class ChromaticResult:
    lower: int
    upper: int
    colouring: list[int]
    exact: bool
    reason: str

    @property
    def value(self) -> int | None:
        return self.lower if self.exact else None


def chromatic_number(
    adj: list[int],
    time_budget: float | None = None,
    exact_limit: int = 256,
    extra_lower: int = 0,
) -> ChromaticResult:
    """Chromatic number by iterative deepening on the colour count.

    The lower bound is the larger of a greedy clique and ``extra_lower`` (e.g. the
    counting bound ceil(|V| / alpha)); the upper bound is DSATUR. Above
    ``exact_limit`` vertices, or after ``time_budget`` seconds, the interval is returned.
    """
    n = len(adj)
    if n == 0:
        return ChromaticResult(0, 0, [], True, "empty graph")
    clique = greedy_clique(adj)
    lower = max(len(clique), extra_lower, 1)
    colouring = dsatur_colouring(adj)
    upper = max(colouring) + 1
    if lower >= upper:
        return ChromaticResult(upper, upper, colouring, True, "bounds meet")
    if n > exact_limit:
        return ChromaticResult(lower, upper, colouring, False, f"more than {exact_limit} vertices: interval only")
    deadline = None if time_budget is None else time.monotonic() + time_budget
    k = lower
    try:
        while k < upper:
            found = k_colourable(adj, k, deadline, seed_clique=clique)
            if found is not None:
                why = "meets the lower bound" if k == lower else f"{k - 1} colours ruled out"
                return ChromaticResult(k, k, found, True, f"{k}-colouring found; {why}")
            k += 1
    except SearchTimeout:
        return ChromaticResult(k, upper, colouring, False, f"time budget {time_budget}s exhausted")
    return ChromaticResult(upper, upper, colouring, True, f"{upper - 1} colours ruled out")


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def log_base(x: int, s: int) -> float:
    return math.log(x) / math.log(s)
