import itertools
import math
from collections import Counter

import numpy as np
import pytest
from scipy.stats import entropy as scipy_entropy

from cycleguess.core import UsageError
from cycleguess.entropy import (
    EmpiricalDistribution,
    TrivialProtocolError,
    _segmentations,
    audit_distribution,
    audit_lemmas,
    conditional_mutual_information,
    entropy_from_counts,
    joint_entropy,
    mutual_information,
    H_range,
)
from cycleguess.protocol import (
    build_fcp,
    constant_protocol,
    enumerate_fixed_set,
    make_protocol,
    random_nontrivial_protocols,
)


def oracle_h(members, indices, s):
    """Projection entropy via Counter and scipy, independent of the package's tallies."""
    counts = Counter(tuple(row[i - 1] for i in indices) for row in members)
    return float(scipy_entropy(list(counts.values()), base=s))


@pytest.fixture(scope="module")
def fcp76():
    return EmpiricalDistribution.from_protocol(build_fcp(7, 6))


@pytest.fixture(scope="module")
def fcp74():
    return EmpiricalDistribution.from_protocol(build_fcp(7, 4))


def test_entropy_from_counts():
    assert entropy_from_counts([1, 1, 1, 1], 2) == pytest.approx(2.0)
    assert entropy_from_counts([5], 3) == 0.0
    assert entropy_from_counts([0, 3, 0, 3], 2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        entropy_from_counts([0, 0], 2)


def test_joint_entropy_matches_oracle(fcp76):
    members = [tuple(r) for r in fcp76.members]
    for r in range(1, 8):
        for idx in itertools.combinations(range(1, 8), r):
            assert joint_entropy(fcp76, idx) == pytest.approx(oracle_h(members, idx, 6), abs=1e-12)


def test_full_entropy_is_log_fix():
    d = EmpiricalDistribution.from_protocol(build_fcp(5, 6))
    assert d.support_size == 72
    assert joint_entropy(d, range(1, 6)) == pytest.approx(math.log(72, 6), abs=1e-12)


def test_perfect_square_marginals_are_uniform(fcp74):
    for i in range(1, 8):
        assert fcp74.h([i]) == pytest.approx(1.0, abs=1e-12)


def test_constant_protocol_has_zero_entropy():
    d = EmpiricalDistribution.from_protocol(constant_protocol(5, 3))
    assert d.h([1, 2, 3]) == 0.0
    assert H_range(d, 1, 5) == 0.0


def test_duplicates_collapse_and_order_is_irrelevant(fcp76):
    assert fcp76.h([3, 1, 3]) == fcp76.h([1, 3])


def test_index_validation(fcp76):
    with pytest.raises(UsageError):
        fcp76.h([0])
    with pytest.raises(UsageError):
        fcp76.h([8])
    with pytest.raises(UsageError):
        H_range(fcp76, 3, 3)
    with pytest.raises(UsageError):
        H_range(fcp76, 1, 8)


def test_trivial_protocol_rejected():
    # every vertex guesses "not my left neighbour" on Z_2, which nothing satisfies on C_3
    t = np.array([[[1, 1], [0, 0]]] * 3)
    p = make_protocol(3, 2, t)
    assert enumerate_fixed_set(p).count == 0
    with pytest.raises(TrivialProtocolError):
        EmpiricalDistribution.from_protocol(p)
    with pytest.raises(TrivialProtocolError):
        audit_lemmas(p)


def test_mutual_information_basics(fcp74, fcp76):
    assert conditional_mutual_information(fcp74, [2], [4], [3]) == pytest.approx(0.0, abs=1e-12)
    for i in range(1, 8):
        assert mutual_information(fcp76, [i], [i]) == pytest.approx(fcp76.h([i]), abs=1e-12)
    d = EmpiricalDistribution.from_protocol(constant_protocol(5, 2))
    assert mutual_information(d, [1], [3]) == 0.0


def test_H_range_values(fcp74, fcp76):
    assert H_range(fcp74, 1, 7) == pytest.approx(7.0, abs=1e-12)
    assert H_range(fcp76, 1, 7) == pytest.approx(2 * math.log(432, 6), abs=1e-12)
    assert H_range(fcp76, 1, 7) == pytest.approx(6.774, abs=5e-4)


def test_segmentations_small():
    assert _segmentations(5) == [[1, 3, 5], [1, 5]]
    for seq in _segmentations(9):
        assert seq[0] == 1 and seq[-1] == 9
        assert all(b - a >= 2 for a, b in zip(seq, seq[1:]))


def test_segment_sum_can_exceed_twice_H():
    """The segment decomposition is an upper bound on 2H(X); it need not be tight."""
    slacks = []
    for p in random_nontrivial_protocols(7, 2, 30, seed=5):
        rep = audit_lemmas(p)
        assert rep.ok
        slacks.append(rep.min_slack("H-segments"))
    assert min(slacks) >= -1e-9
    assert max(slacks) > 0.1


def test_fcp_audits(fcp76, fcp74):
    rep = audit_distribution(fcp76, "fcp76")
    assert rep.ok, rep.failures()
    assert rep.min_slack() >= -1e-9
    rep4 = audit_distribution(fcp74, "fcp74")
    assert rep4.ok
    for rec in rep4.checks:
        if rec.name.startswith("h-le-1"):
            assert abs(rec.slack) <= 1e-9


def test_audit_covers_every_family():
    rep = audit_lemmas(build_fcp(7, 3))
    prefixes = {r.name.split("[")[0] for r in rep.checks}
    for need in ["log-fix", "h-le-1", "mi-nonneg", "cmi-nonneg", "drop-vertex", "H-split", "H-le-sum-h",
                 "H-full", "H-segments", "five-window", "step-func-mid"]:
        assert need in prefixes


def test_random_protocol_audits_c5_s3():
    ps = random_nontrivial_protocols(5, 3, 100, seed=11)
    assert len(ps) == 100
    for p in ps:
        rep = audit_lemmas(p)
        assert rep.ok, (p.name, rep.failures()[:3])


def test_large_n_is_sampled_reproducibly():
    p = build_fcp(11, 2)
    a = audit_lemmas(p, seed=3)
    b = audit_lemmas(p, seed=3)
    assert [r.name for r in a.checks] == [r.name for r in b.checks]
    assert a.ok
    assert sum(r.name.startswith("drop-vertex") for r in a.checks) <= 1000 + 11


def test_report_serialisation(fcp74):
    rep = audit_distribution(fcp74, "fcp74")
    doc = rep.to_dict()
    assert doc["fix"] == 128
    rec = doc["inequalities"][0]
    assert set(rec) >= {"name", "lhs", "rhs", "slack", "verdict"}
    assert "inequalities" not in rep.to_dict(include_records=False)
