"""Bootstrap confidence intervals: determinism, nesting, degeneracy, scaling."""

import math

import pytest

from medbounds.bootstrap import CiReport, bootstrap_ci
from medbounds.closed_forms import BoundFamily
from medbounds.dists import CountTable
from medbounds.errors import EmptyArm, UndefinedConditional


def table1(counts):
    return CountTable.from_mapping(1, counts)


# D0 proportions: M = Y, split half/half in both arms
def d0_counts(per_arm):
    half = per_arm // 2
    return {
        (0, 0, 0): half, (1, 1, 0): per_arm - half,
        (0, 0, 1): half, (1, 1, 1): per_arm - half,
    }


def test_determinism():
    t = table1({(0, 0, 0): 30, (1, 0, 0): 20, (0, 1, 0): 25, (1, 1, 0): 25,
                (0, 0, 1): 10, (1, 0, 1): 35, (0, 1, 1): 30, (1, 1, 1): 25})
    a = bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1, B=150, seed=9)
    b = bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1, B=150, seed=9)
    assert a == b
    assert isinstance(a, CiReport)
    assert a.replicates == 150 and a.seed == 9 and a.n_undefined == 0
    c = bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1, B=150, seed=10)
    assert c != a


def test_nested_alpha():
    t = table1({(0, 0, 0): 30, (1, 0, 0): 20, (0, 1, 0): 25, (1, 1, 0): 25,
                (0, 0, 1): 10, (1, 0, 1): 35, (0, 1, 1): 30, (1, 1, 1): 25})
    wide = bootstrap_ci(t, BoundFamily.SJOLANDER_SIE, arm=0, B=400, alpha=0.05, seed=1)
    narrow = bootstrap_ci(t, BoundFamily.SJOLANDER_SIE, arm=0, B=400, alpha=0.5, seed=1)
    # same replicate stream, so tighter alpha nests inside
    assert wide.lower_ci[0] <= narrow.lower_ci[0] <= narrow.lower_ci[1] <= wide.lower_ci[1]
    assert wide.upper_ci[0] <= narrow.upper_ci[0] <= narrow.upper_ci[1] <= wide.upper_ci[1]


def test_degenerate_table_zero_width():
    # Y = A, M = 0 deterministically: every resample is the same table
    t = table1({(0, 0, 0): 50, (1, 0, 1): 60})
    rep = bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1, B=100, seed=0)
    assert rep.point.lower == rep.point.upper == 1
    assert rep.lower_ci == (1.0, 1.0)
    assert rep.upper_ci == (1.0, 1.0)
    assert rep.n_undefined == 0


def test_undefined_replicates_counted():
    # arm 1 sees M=1 exactly once among 30: many resamples miss the cell
    # entirely, making the m=1 outcome conditional (with positive weight
    # in arm 0) undefined in those replicates
    t = table1({(0, 0, 0): 15, (0, 1, 0): 15, (0, 0, 1): 29, (1, 1, 1): 1})
    rep = bootstrap_ci(t, BoundFamily.RR_FRECHET_NDE, arm=0, B=120, seed=2)
    assert 0 < rep.n_undefined < 120
    assert rep.lower_ci[0] <= rep.lower_ci[1]


def test_validation_errors():
    t = table1(d0_counts(40))
    with pytest.raises(ValueError):
        bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1, B=99)
    with pytest.raises(ValueError):
        bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1, alpha=0.0)
    with pytest.raises(ValueError):
        bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1, alpha=1.0)
    with pytest.raises(ValueError):
        bootstrap_ci(t, BoundFamily.GABRIEL_SDE, arm=1)  # setting mismatch
    with pytest.raises(ValueError):
        bootstrap_ci(t, BoundFamily.RR_FRECHET_NDE, arm=1, mediator_arm=0)


def test_empty_arm():
    t = table1({(0, 0, 0): 10, (1, 1, 0): 10})
    with pytest.raises(EmptyArm):
        bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1)


def test_all_replicates_undefined():
    # the conditional is undefined in the full data too: every replicate
    # is undefined and the report cannot be formed
    t = table1({(0, 0, 0): 15, (0, 1, 0): 15, (0, 0, 1): 30})
    with pytest.raises(UndefinedConditional):
        bootstrap_ci(t, BoundFamily.RR_FRECHET_NDE, arm=0, B=100, seed=0)


def test_width_shrinks_with_n():
    reps = {}
    for n in (100, 10000):
        t = table1(d0_counts(n))
        reps[n] = bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1, B=300, seed=4)
    for rep in reps.values():
        # true lower endpoint at the D0 law is -1/2
        assert rep.lower_ci[0] <= -0.5 <= rep.lower_ci[1]
        assert float(rep.point.lower) == -0.5
    w_small = reps[100].lower_ci[1] - reps[100].lower_ci[0]
    w_big = reps[10000].lower_ci[1] - reps[10000].lower_ci[0]
    ratio = w_small / w_big
    assert 5 < ratio < 20, f"expected ~sqrt(100)=10, got {ratio} ({w_small}/{w_big})"
    assert not math.isnan(ratio)


def test_as_dict():
    t = table1(d0_counts(60))
    rep = bootstrap_ci(t, BoundFamily.SJOLANDER_SDE, arm=1, B=120, seed=3)
    d = rep.as_dict()
    assert d["family"] == "sjolander-sde"
    assert d["estimand"] == "SDE(1)"
    assert d["point"] == [-0.5, 0.5]
    assert d["replicates"] == 120 and d["seed"] == 3
    assert set(d) == {
        "family", "estimand", "arm", "mediator_arm", "point",
        "lower_ci", "upper_ci", "replicates", "alpha", "seed", "n_undefined",
    }
