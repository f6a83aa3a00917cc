"""Observed distributions, count tables, estimands and point functionals."""

import csv
from fractions import Fraction as Q

import pytest

from medbounds.dists import (
    CountTable,
    Estimand,
    EstimandKind,
    Interval,
    ObservedDistI,
    ObservedDistII,
    dist_from_counts,
    marginalize_L,
    mediation_point_estimate,
    random_dist1,
    random_dist2,
    read_counts_csv,
    total_effect,
    write_counts_csv,
)
from medbounds.errors import EmptyArm, UndefinedConditional


def dist1(probs):
    return ObservedDistI.from_probs(probs)


def dist2(probs):
    return ObservedDistII.from_probs(probs)


D0 = dist1({(0, 0, 0): Q(1, 2), (1, 1, 0): Q(1, 2),
            (0, 0, 1): Q(1, 2), (1, 1, 1): Q(1, 2)})
DET_YA = dist1({(0, 0, 0): 1, (1, 0, 1): 1})  # Y = A, M = 0


def test_normalization_enforced():
    with pytest.raises(ValueError):
        dist1({(0, 0, 0): Q(1, 2), (0, 0, 1): 1})
    with pytest.raises(ValueError):
        dist1({(0, 0, 0): Q(3, 2), (0, 0, 1): 1})


def test_float_cells_renormalized_exactly():
    thirds = [1 / 3, 1 / 3, 1 - 2 / 3]
    probs = {(0, 0, a): thirds[0] for a in (0, 1)}
    probs.update({(0, 1, a): thirds[1] for a in (0, 1)})
    probs.update({(1, 0, a): thirds[2] for a in (0, 1)})
    d = dist1(probs)
    assert sum(d.cell(c, 0) for c in range(4)) == 1


def test_accessors_setting1():
    d = dist1({(0, 0, 0): Q(3, 4), (1, 1, 0): Q(1, 4),
               (0, 0, 1): Q(1, 2), (1, 0, 1): Q(1, 2)})
    assert d.pr_m(1, 0) == Q(1, 4)
    assert d.pr_m(1, 1) == 0
    assert d.pr_y1(1) == Q(1, 2)
    assert d.pr_y1_given_m(0, 1) == 1
    assert d.pr_y1_given_m(1, 1) is None  # empty conditioning event
    assert d.p(1, 0, 1) == Q(1, 2)


def test_accessors_setting2():
    d = dist2({(0, 0, 0, 0): Q(1, 2), (1, 1, 1, 0): Q(1, 2),
               (0, 0, 0, 1): 1})
    assert d.pr_l(1, 0) == Q(1, 2)
    assert d.pr_ml(1, 1, 0) == Q(1, 2)
    assert d.pr_m_given_l(1, 0, 1) == 1
    assert d.pr_m_given_l(1, 1, 1) is None
    assert d.pr_y1_given_ml(0, 1, 1) == 1
    assert d.pr_y1_given_ml(0, 0, 1) is None  # no mass at (m,l)=(0,1) in arm 0
    assert d.pr_y1_given_ml(0, 0, 0) == 0


def test_marginalize_L():
    d = dist2({(0, 0, 0, a): Q(1, 4) for a in (0, 1)}
              | {(0, 0, 1, a): Q(1, 4) for a in (0, 1)}
              | {(1, 1, 0, a): Q(1, 2) for a in (0, 1)})
    m = marginalize_L(d)
    assert m.p(0, 0, 0) == Q(1, 2)
    assert m.p(1, 1, 0) == Q(1, 2)
    # degenerate point mass collapses cleanly
    point = dist2({(0, 0, 0, a): 1 for a in (0, 1)})
    assert marginalize_L(point).p(0, 0, 0) == 1
    # random tables stay normalized after collapsing
    for seed in range(20):
        m = marginalize_L(random_dist2(seed))
        for a in (0, 1):
            assert sum(m.cell(c, a) for c in range(4)) == 1


def test_count_table_and_proportions():
    t = CountTable.from_mapping(
        1, {(0, 0, 0): 30, (1, 1, 0): 10, (0, 0, 1): 5, (1, 0, 1): 5}
    )
    d = dist_from_counts(t)
    assert d.p(0, 0, 0) == Q(3, 4)
    assert d.p(1, 1, 0) == Q(1, 4)
    assert d.p(0, 0, 1) == Q(1, 2)
    assert d.p(1, 0, 1) == Q(1, 2)
    degenerate = CountTable.from_mapping(1, {(0, 0, 0): 7, (0, 0, 1): 9})
    dd = dist_from_counts(degenerate)
    assert dd.p(0, 0, 0) == 1 and dd.p(0, 0, 1) == 1
    uniform2 = CountTable(2, (1,) * 16)
    du = dist_from_counts(uniform2)
    assert all(du.cell(c, a) == Q(1, 8) for c in range(8) for a in (0, 1))


def test_empty_arm_rejected():
    t = CountTable.from_mapping(1, {(0, 0, 0): 10})
    with pytest.raises(EmptyArm):
        dist_from_counts(t)
    with pytest.raises(ValueError):
        CountTable(1, (0,) * 7)
    with pytest.raises(ValueError):
        CountTable(1, (-1,) + (1,) * 7)


def test_csv_round_trip(tmp_path):
    t = CountTable.from_mapping(
        2, {(y, m, l, a): 1 + y + 2 * m + 3 * l + a
            for y in (0, 1) for m in (0, 1) for l in (0, 1) for a in (0, 1)}
    )
    path = tmp_path / "counts.csv"
    write_counts_csv(str(path), t)
    assert read_counts_csv(str(path), 2) == t
    header = path.read_text().splitlines()[0]
    assert header == "a,l,m,y,n"


def test_csv_rejects_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,m,y,n\n0,0,0,2,9\n")
    with pytest.raises(ValueError):
        read_counts_csv(str(path), 1)
    path.write_text("a,m,y\n0,0,0\n")
    with pytest.raises(ValueError):
        read_counts_csv(str(path), 1)
    path.write_text("a,m,y,n\n0,0,0,5\n0,0,0,6\n")
    with pytest.raises(ValueError):  # duplicate cell
        read_counts_csv(str(path), 1)
    path.write_text("a,m,y,n\n0,0,2,5\n")
    with pytest.raises(ValueError):  # non-binary level
        read_counts_csv(str(path), 1)


def test_random_dists_deterministic_and_distinct():
    assert random_dist1(3).cells == random_dist1(3).cells
    assert random_dist2(3).cells == random_dist2(3).cells
    for seed in range(100):
        assert random_dist1(seed).cells != random_dist1(seed + 1).cells
        assert random_dist2(seed).cells != random_dist2(seed + 1).cells


def test_total_effect():
    assert total_effect(DET_YA) == 1
    sym = dist1({(0, 0, 0): Q(1, 3), (1, 1, 0): Q(2, 3),
                 (0, 0, 1): Q(1, 3), (1, 1, 1): Q(2, 3)})
    assert total_effect(sym) == 0
    assert total_effect(D0) == 0


def test_estimand_validation():
    with pytest.raises(ValueError):
        Estimand(EstimandKind.TE, 1, arm=0)
    with pytest.raises(ValueError):
        Estimand(EstimandKind.SDE, 1)
    with pytest.raises(ValueError):
        Estimand(EstimandKind.NDE_TCHETGEN, 1, arm=1, mediator_arm=0)
    with pytest.raises(ValueError):
        Estimand(EstimandKind.NDE_TCHETGEN, 2, arm=1, mediator_arm=1)
    est = Estimand(EstimandKind.NDE_TCHETGEN, 2, arm=1, mediator_arm=0)
    assert est.label == "NDE(a_y=1,a_m=0)"


def test_mediation_point_estimates():
    nde0 = Estimand(EstimandKind.MEDIATION_POINT_NDE, 1, arm=0)
    assert mediation_point_estimate(DET_YA, nde0) == 1
    assert mediation_point_estimate(D0, nde0) == 0
    # the empty M=1 cell matters for the formula -> undefined, or widened
    lop = dist1({(0, 0, 0): Q(1, 2), (0, 1, 0): Q(1, 2), (0, 0, 1): 1})
    with pytest.raises(UndefinedConditional):
        mediation_point_estimate(lop, nde0)
    widened = mediation_point_estimate(lop, nde0, widen=True)
    assert isinstance(widened, Interval)
    assert widened.width > 0


def test_interval_type():
    iv = Interval(Q(-1, 2), Q(1, 2))
    assert iv.width == 1
    assert iv.contains(Q(1, 2)) and not iv.contains(Q(3, 5))
    assert iv.is_exact()
    assert Interval(0.25, 0.75).as_floats() == (0.25, 0.75)
    with pytest.raises(ValueError):
        Interval(Q(1), Q(0))
    # tiny float inversions are tolerated (round-off at interval collapse)
    Interval(1.0 + 1e-13, 1.0)
