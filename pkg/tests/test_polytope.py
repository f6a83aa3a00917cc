"""Sharp LP bounds, symbolic derivation, and coupling LPs."""

from fractions import Fraction as Q

import pytest

from medbounds.catalog import n_combos, objective_vector
from medbounds.closed_forms import (
    BoundFamily,
    closed_bound_expr,
    frechet_nde000,
    rr_frechet_nde1,
    sde1_bounds,
)
from medbounds.dists import (
    Estimand,
    EstimandKind,
    ObservedDistI,
    random_dist1,
    random_dist2,
    sde,
    sie,
    te,
    total_effect,
)
from medbounds.errors import UnsupportedEstimand
from medbounds.polytope import (
    build_system,
    coupling_bounds,
    evaluate,
    lp_endpoint,
    numeric_bounds,
    symbolic_bounds,
)

D0 = ObservedDistI.from_probs(
    {(0, 0, 0): Q(1, 2), (1, 1, 0): Q(1, 2),
     (0, 0, 1): Q(1, 2), (1, 1, 1): Q(1, 2)}
)
DET_YA = ObservedDistI.from_probs({(0, 0, 0): 1, (1, 0, 1): 1})
NULL1 = ObservedDistI.from_probs({(0, 0, 0): 1, (0, 0, 1): 1})


def test_combo_counts():
    assert n_combos(1) == 64
    assert n_combos(2) == 16384


def test_objective_vector_te_matches_counterfactuals():
    from medbounds.catalog import f_m1, f_y1, split_combo

    vec = objective_vector(1, te(1))
    for combo in range(64):
        mt, yt = split_combo(1, combo)
        want = f_y1(yt, 1, f_m1(mt, 1)) - f_y1(yt, 0, f_m1(mt, 0))
        assert vec[combo] == want


def test_build_system_rejects_cross_world():
    with pytest.raises(UnsupportedEstimand):
        build_system(1, Estimand(EstimandKind.NDE_FRECHET, 1, arm=0))


def test_numeric_bounds_on_anchors():
    sys1 = build_system(1, sde(1, 1))
    assert numeric_bounds(sys1, D0).as_floats() == (-0.5, 0.5)
    assert numeric_bounds(sys1, DET_YA).as_floats() == (1.0, 1.0)
    assert numeric_bounds(sys1, NULL1).as_floats() == (0.0, 0.0)


def test_te_is_point_identified():
    sys_te = build_system(1, te(1))
    for seed in range(10):
        d = random_dist1(seed, denominator=2**10)
        iv = numeric_bounds(sys_te, d)
        assert iv.lower == iv.upper == total_effect(d)


def test_lp_witness_is_consistent():
    sys1 = build_system(1, sde(1, 1))
    end = lp_endpoint(sys1, D0, maximize=True)
    assert end.value == Q(1, 2)
    mass = sum(end.witness.values())
    assert mass == 1
    vec = objective_vector(1, sde(1, 1))
    assert sum(m * vec[combo] for combo, m in end.witness.items()) == end.value


def test_symbolic_terms_match_frozen_forms_setting1():
    for kind, family in (
        ("sde", BoundFamily.SJOLANDER_SDE),
        ("sie", BoundFamily.SJOLANDER_SIE),
    ):
        for arm in (0, 1):
            est = sde(1, arm) if kind == "sde" else sie(1, arm)
            derived = symbolic_bounds(build_system(1, est))
            frozen = closed_bound_expr(family, arm)
            assert set(derived.lower_terms) == set(frozen.lower_terms)
            assert set(derived.upper_terms) == set(frozen.upper_terms)
            assert len(derived.lower_terms) == 3
            assert len(derived.upper_terms) == 3


def test_symbolic_te_single_expression():
    expr = symbolic_bounds(build_system(1, te(1)))
    assert len(expr.lower_terms) == 1
    assert len(expr.upper_terms) == 1
    assert expr.lower_terms[0] == expr.upper_terms[0]
    from medbounds.exprs import LinearExpr

    want = LinearExpr.parse("p10_1 + p11_1 - p10_0 - p11_0", 1)
    assert expr.lower_terms[0] == want


def test_symbolic_evaluate_agrees_with_lp():
    expr = symbolic_bounds(build_system(1, sde(1, 1)))
    sys1 = build_system(1, sde(1, 1))
    for seed in range(40):
        d = random_dist1(seed, denominator=2**12)
        assert evaluate(expr, d) == numeric_bounds(sys1, d)


def test_coupling_bounds_inside_closed_frechet():
    # setting 1: the closed formula coincides with the coupling LP
    for seed in range(15):
        d = random_dist1(seed, denominator=2**10)
        for arm in (0, 1):
            est = Estimand(EstimandKind.NDE_FRECHET, 1, arm=arm)
            lp = coupling_bounds(d, est)
            closed = rr_frechet_nde1(d, arm)
            assert lp.lower == closed.lower
            assert lp.upper == closed.upper
    # setting 2: the closed formula is an outer bound, sometimes strictly
    strict = 0
    for seed in range(8):
        d = random_dist2(seed, denominator=2**8)
        est = Estimand(EstimandKind.NDE_FRECHET, 2, arm=0)
        lp = coupling_bounds(d, est)
        closed = frechet_nde000(d, 0)
        assert closed.lower <= lp.lower
        assert lp.upper <= closed.upper
        if closed.lower < lp.lower or lp.upper < closed.upper:
            strict += 1
    assert strict > 0


def test_coupling_bounds_null_outcome():
    est = Estimand(EstimandKind.NDE_FRECHET, 1, arm=0)
    assert coupling_bounds(NULL1, est).as_floats() == (0.0, 0.0)
    with pytest.raises(UnsupportedEstimand):
        coupling_bounds(NULL1, sde(1, 0))
