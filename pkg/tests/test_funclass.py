import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import entropy as scipy_entropy

from cycleguess.core import UsageError, factorize
from cycleguess.entropy import EmpiricalDistribution
from cycleguess.funclass import (
    InfeasibleError,
    LocalFunction,
    builtin_function,
    classify,
    compute_constants,
    conditional_mi,
    flat_function_count,
    is_k_eps_uniform,
    iter_all_tables,
    iter_flat_tables,
    lr_sets,
    mi_continuity_bound,
    uniformity_bound,
)
from cycleguess.protocol import build_fcp


def oracle_cmi(table, s):
    """I(U1;U2|f(U)) straight from the definition: sum over z of P(z) I(U1;U2 | f=z)."""
    total = 0.0
    for z in range(s):
        cells = [(x, y) for x in range(s) for y in range(s) if table[x][y] == z]
        if not cells:
            continue
        hx = scipy_entropy(list(Counter(x for x, _ in cells).values()), base=s)
        hy = scipy_entropy(list(Counter(y for _, y in cells).values()), base=s)
        hxy = math.log(len(cells), s)
        total += len(cells) / s**2 * (hx + hy - hxy)
    return total


# -- classification ---------------------------------------------------------------------


def test_s2_census():
    flat, non_semi = [], []
    tables = list(iter_all_tables(2))
    assert len(tables) == 16
    for t in tables:
        c = classify(LocalFunction(factorize(2), t))
        if c.is_flat:
            flat.append(t)
            if not c.is_semi_perfect:
                non_semi.append((t.tolist(), c.cond_mi))
    assert len(flat) == 6
    assert sorted(t for t, _ in non_semi) == [[[0, 1], [1, 0]], [[1, 0], [0, 1]]]
    for _, cmi in non_semi:
        assert cmi == pytest.approx(1.0, abs=1e-12)


def test_builtin_examples():
    assert classify(builtin_function("xor", 2)).label() == "flat"
    assert classify(builtin_function("zero", 4)).label() == "not-flat"
    proj = classify(builtin_function("proj", 5))
    assert proj.is_perfect and proj.L_sizes == [1] * 5 and proj.R_sizes == [5] * 5
    pi6 = classify(builtin_function("pi", 6))
    assert pi6.is_perfect
    # a = 2, b = 3: each phi-fibre has b members and each psi-fibre has a
    assert pi6.L_sizes == [3] * 6 and pi6.R_sizes == [2] * 6
    with pytest.raises(UsageError):
        builtin_function("nand", 2)


def test_lr_sets_examples():
    f = builtin_function("pi", 6)
    L, R = lr_sets(f, 5)
    # z = 5 = pi(1, 2): L is the phi-fibre {x : x // 3 = 1}, R the psi-fibre {y : y % 3 = 2}
    assert L == {3, 4, 5} and R == {2, 5}
    assert f.preimage(5) == {(x, y) for x in L for y in R}
    x = builtin_function("xor", 2)
    L, R = lr_sets(x, 0)
    assert L == R == {0, 1}
    assert x.preimage(0) == {(0, 0), (1, 1)}
    with pytest.raises(UsageError):
        lr_sets(x, 2)


def test_local_function_validation():
    with pytest.raises(UsageError):
        LocalFunction(factorize(2), np.zeros((3, 3), dtype=int))
    with pytest.raises(UsageError):
        LocalFunction(factorize(2), np.full((2, 2), 2))


@pytest.mark.parametrize("s", [2, 3])
def test_cond_mi_matches_oracle_on_every_flat_table(s):
    for t in iter_flat_tables(s):
        assert conditional_mi(t, s) == pytest.approx(oracle_cmi(t.tolist(), s), abs=1e-12)


def test_flat_enumeration_counts():
    assert flat_function_count(2) == 6 and flat_function_count(3) == 1680
    tables = [t.tobytes() for t in iter_flat_tables(3)]
    assert len(tables) == len(set(tables)) == 1680


@pytest.mark.parametrize("s", [2, 3])
def test_prop_5_2_and_hierarchy_exhaustive(s):
    for t in iter_all_tables(s):
        f = LocalFunction(factorize(s), t)
        c = classify(f)
        assert not c.is_semi_perfect or c.is_flat
        assert not c.is_perfect or c.is_semi_perfect
        if c.is_semi_perfect:
            for z in range(s):
                L, R = lr_sets(f, z)
                assert len(L) * len(R) == s
                assert f.preimage(z) == {(x, y) for x in L for y in R}


@pytest.mark.parametrize("s", range(2, 13))
def test_pi_family_product_structure(s):
    f = builtin_function("pi", s)
    for z in range(s):
        L, R = lr_sets(f, z)
        assert f.preimage(z) == {(x, y) for x in L for y in R}
        assert len(L) * len(R) == s


@pytest.mark.parametrize("s", range(2, 13))
def test_fcp_interior_functions_are_perfect(s):
    p = build_fcp(7, s)
    for i in range(2, 7):
        assert classify(LocalFunction(p.space, p.tables[i - 1])).is_perfect


# -- uniformity ---------------------------------------------------------------------------


def test_k_eps_uniform_examples():
    assert is_k_eps_uniform([0.25] * 4, 4, 0.0)
    e = 0.01
    assert not is_k_eps_uniform([0.5 + 2 * e, 0.5 - 2 * e], 2, e)
    with pytest.raises(UsageError):
        is_k_eps_uniform([0.5, 0.5], 3, 0.1)


def test_marginal_of_fcp_76():
    d = EmpiricalDistribution.from_protocol(build_fcp(7, 6))
    counts = np.bincount(d.members[:, 0], minlength=6)
    assert counts.sum() == 432
    probs = counts / 432
    assert is_k_eps_uniform(probs, 6, np.max(np.abs(probs - 1 / 6)))
    if np.ptp(probs) > 0:
        assert not is_k_eps_uniform(probs, 6, np.max(np.abs(probs - 1 / 6)) / 2)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3]), st.booleans(), st.integers(0, 2**32 - 1))
def test_uniformity_bound_property(s, square, seed):
    k = s * s if square else s
    eps = 1.0 / (7 * k) * 0.99
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(k))
    if np.max(np.abs(p - 1 / k)) < eps:
        i = int(rng.integers(k))
        p = np.full(k, (1 - (1 / k + eps)) / (k - 1))
        p[i] = 1 / k + eps
    h = float(scipy_entropy(p, base=s))
    assert h <= uniformity_bound(k, eps, s) + 1e-12


# -- constants ---------------------------------------------------------------------------


def test_constants_s2():
    r = compute_constants(2)
    assert r.delta1 == 0.5
    assert r.epsilon <= 1 / 20
    assert r.epsilon == 2.0**-9
    assert r.delta == min(r.delta1, r.delta2)
    assert r.N == math.ceil(7 * (1 / r.delta + 2))
    assert r.delta2 == pytest.approx(3.6690e-6, rel=1e-4)
    assert r.N == 1907910
    assert mi_continuity_bound(2, r.epsilon) <= r.delta1


def test_constants_s3_against_brute_force():
    best = math.inf
    flat = bad = 0
    for entries in itertools.product(range(3), repeat=9):
        if Counter(entries) != Counter({0: 3, 1: 3, 2: 3}):
            continue
        flat += 1
        t = [entries[0:3], entries[3:6], entries[6:9]]
        cmi = oracle_cmi(t, 3)
        if cmi > 1e-9:
            bad += 1
            best = min(best, cmi)
    r = compute_constants(3)
    assert (r.candidate_count, r.non_semi_perfect_count) == (flat, bad) == (1680, 1668)
    assert r.delta1 == pytest.approx(best / 2, abs=1e-12)
    assert r.min_cond_mi == pytest.approx(0.10584021904759355, abs=1e-12)
    assert r.epsilon == 2.0**-13
    assert r.epsilon <= 1 / (9 * 7)
    assert r.N == 516086373
    assert r.delta2_alt == pytest.approx(r.delta2 * math.log(3) ** 2)


def test_continuity_bound_shape():
    assert mi_continuity_bound(2, 0.2) == math.inf
    assert mi_continuity_bound(3, 2.0**-14) < mi_continuity_bound(3, 2.0**-13)


def test_constants_refuse_large_s():
    with pytest.raises(InfeasibleError, match="4\\^16"):
        compute_constants(4)
