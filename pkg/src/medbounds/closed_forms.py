"""Closed-form bound families for mediation effects under partial identification.

Two kinds of formulas live here:

* Randomization-only envelopes for the separable direct/indirect effects:
  max-of-affine lower and min-of-affine upper term lists over the observed
  cell probabilities (setting 1 and, with a post-treatment covariate L,
  setting 2).  Every term list below is cross-validated, term by term, against
  the exact LP/vertex-enumeration oracle in :mod:`medbounds.polytope`; the
  lists are kept in display order rather than canonical order.

* Frechet-style bounds for cross-world natural direct effects under an
  additional single-world ignorability assumption: sums of cellwise
  max{0, . } / min{ . } brackets built from identified conditionals.  These
  evaluate through exact interval propagation so that empty conditioning
  cells only matter when the answer actually depends on them (see
  ``widen`` in the individual functions).
"""

from __future__ import annotations

import enum
from fractions import Fraction

from .dists import (
    Interval,
    ObservedDist,
    ObservedDistI,
    ObservedDistII,
    _PV,
    pv_conditional,
    pv_max,
    pv_min,
)
from .errors import EmptyIntersection, UndefinedConditional
from .exprs import BoundExpr, parse_terms

Q = Fraction


class BoundFamily(enum.Enum):
    SJOLANDER_SDE = "SJOLANDER_SDE"
    SJOLANDER_SIE = "SJOLANDER_SIE"
    RR_FRECHET_NDE = "RR_FRECHET_NDE"
    GABRIEL_SDE = "GABRIEL_SDE"
    GABRIEL_SIE = "GABRIEL_SIE"
    FRECHET_NDE000 = "FRECHET_NDE000"
    TCHETGEN_NDE = "TCHETGEN_NDE"

    @property
    def setting(self) -> int:
        return 1 if self in (
            BoundFamily.SJOLANDER_SDE,
            BoundFamily.SJOLANDER_SIE,
            BoundFamily.RR_FRECHET_NDE,
        ) else 2

    @property
    def assumptions(self) -> str:
        if self in (
            BoundFamily.RR_FRECHET_NDE,
            BoundFamily.FRECHET_NDE000,
            BoundFamily.TCHETGEN_NDE,
        ):
            return "randomization+swi"
        return "randomization"


# -- randomization-only term lists ---------------------------------------------
#
# Display-order term lists.  Where a published rendering of a term disagreed
# with the LP/vertex oracle, the oracle's term is recorded here; the term
# lists below reproduce the oracle's envelopes exactly on every valid
# distribution (asserted in the test suite).

_SDE1_TERMS = {
    1: (
        (
            "-2*p00_1 + p01_0 - p01_1 - p10_1",
            "-1 + p00_0 - p01_1 + p10_1",
            "-p00_1 - p01_1",
        ),
        (
            "p00_0 + p01_0 - p01_1 + p10_0 + p10_1",
            "1 - p00_1 - p01_1",
            "2 - 2*p00_1 - p01_1 - p10_0 - p10_1",
        ),
    ),
    0: (
        (
            "-p00_1 + p01_0 - p01_1 - p10_0 - p10_1",
            "-2 + 2*p00_0 + p01_0 + p10_0 + p10_1",
            "-1 + p00_0 + p01_0",
        ),
        (
            "2*p00_0 + p01_0 - p01_1 + p10_0",
            "p00_0 + p01_0",
            "1 - p00_1 + p01_0 - p10_0",
        ),
    ),
}

_SIE1_TERMS = {
    1: (
        (
            "-p00_1 - p01_1",
            "-p00_0 - p00_1 - p10_0",
            "-1 + p00_0 - p01_1 + p10_0",
        ),
        (
            "2 - p00_0 - p00_1 - p01_1 - p10_0 - p10_1",
            "1 - p00_1 - p01_1",
            "p00_0 + p10_0 + p10_1",
        ),
    ),
    0: (
        (
            "-p00_1 - p10_0 - p10_1",
            "-2 + p00_0 + p00_1 + p01_0 + p10_0 + p10_1",
            "-1 + p00_0 + p01_0",
        ),
        (
            "1 - p00_1 + p01_0 - p10_1",
            "p00_0 + p01_0",
            "p00_0 + p00_1 + p10_1",
        ),
    ),
}

_SDE2_TERMS = {
    1: (
        (
            "-2*p000_1 - 2*p010_1 - p100_1 - p110_1 - 2*p001_1 + p011_0 - p011_1 - p101_1",
            "-1 - p000_1 - p010_1 + p001_0 - p011_1 + p101_1",
            "-1 - p000_1 + p010_0 + p110_1 - p001_1 - p011_1",
            "-1 + p000_0 - p010_1 + p100_1 - p001_1 - p011_1",
            "-p000_1 - p010_1 - p001_1 - p011_1",
        ),
        (
            "2 - p000_1 - 2*p010_1 - p110_0 - p110_1 - p001_1 - p011_1",
            "2 - p000_1 - p010_1 - 2*p001_1 - p011_1 - p101_0 - p101_1",
            "p000_0 + p010_0 + p100_0 + p100_1 + p110_0 + p110_1 + p001_0 + p011_0 - p011_1 + p101_0 + p101_1",
            "1 - p000_1 - p010_1 - p001_1 - p011_1",
            "2 - 2*p000_1 - p010_1 - p100_0 - p100_1 - p001_1 - p011_1",
        ),
    ),
    0: (
        (
            "-p000_1 - p010_1 - p100_0 - p100_1 - p110_0 - p110_1 - p001_1 + p011_0 - p011_1 - p101_0 - p101_1",
            "-2 + p000_0 + p010_0 + 2*p001_0 + p011_0 + p101_0 + p101_1",
            "-2 + p000_0 + 2*p010_0 + p110_0 + p110_1 + p001_0 + p011_0",
            "-2 + 2*p000_0 + p010_0 + p100_0 + p100_1 + p001_0 + p011_0",
            "-1 + p000_0 + p010_0 + p001_0 + p011_0",
        ),
        (
            "1 + p000_0 - p010_1 - p110_0 + p001_0 + p011_0",
            "1 + p000_0 + p010_0 - p001_1 + p011_0 - p101_0",
            "2*p000_0 + 2*p010_0 + p100_0 + p110_0 + 2*p001_0 + p011_0 - p011_1 + p101_0",
            "p000_0 + p010_0 + p001_0 + p011_0",
            "1 - p000_1 + p010_0 - p100_0 + p001_0 + p011_0",
        ),
    ),
}

_SIE2_TERMS = {
    1: (
        (
            "-p000_1 - p001_1 - p010_1 - p011_1",
            "-p000_0 - p000_1 - p001_0 - p001_1 - p010_0 - p010_1 - p100_0 - p101_0 - p110_0",
            "-1 - p000_1 - p001_1 + p010_0 - p011_1 + p110_0",
            "-1 - p000_1 + p001_0 - p010_1 - p011_1 + p101_0",
            "-1 + p000_0 - p001_1 - p010_1 - p011_1 + p100_0",
        ),
        (
            "2 - p000_0 - p000_1 - p001_1 - p010_1 - p011_1 - p100_0 - p100_1",
            "1 - p000_1 - p001_1 - p010_1 - p011_1",
            "2 - p000_1 - p001_0 - p001_1 - p010_1 - p011_1 - p101_0 - p101_1",
            "2 - p000_1 - p001_1 - p010_0 - p010_1 - p011_1 - p110_0 - p110_1",
            "p000_0 + p001_0 + p010_0 + p100_0 + p100_1 + p101_0 + p101_1 + p110_0 + p110_1",
        ),
    ),
    0: (
        (
            "-p000_1 - p001_1 - p010_1 - p100_0 - p100_1 - p101_0 - p101_1 - p110_0 - p110_1",
            "-2 + p000_0 + p001_0 + p010_0 + p010_1 + p011_0 + p110_0 + p110_1",
            "-2 + p000_0 + p001_0 + p001_1 + p010_0 + p011_0 + p101_0 + p101_1",
            "-2 + p000_0 + p000_1 + p001_0 + p010_0 + p011_0 + p100_0 + p100_1",
            "-1 + p000_0 + p001_0 + p010_0 + p011_0",
        ),
        (
            "1 - p000_1 + p001_0 + p010_0 + p011_0 - p100_1",
            "p000_0 + p001_0 + p010_0 + p011_0",
            "1 + p000_0 - p001_1 + p010_0 + p011_0 - p101_1",
            "1 + p000_0 + p001_0 - p010_1 + p011_0 - p110_1",
            "p000_0 + p000_1 + p001_0 + p001_1 + p010_0 + p010_1 + p100_1 + p101_1 + p110_1",
        ),
    ),
}


def _term_expr(setting: int, label: str, table, arm: int) -> BoundExpr:
    lower, upper = table[arm]
    return BoundExpr(
        setting=setting,
        estimand_label=label,
        lower_terms=parse_terms(lower, setting),
        upper_terms=parse_terms(upper, setting),
    )


def closed_bound_expr(family: BoundFamily, arm: int) -> BoundExpr:
    """Display-ordered term lists for the randomization-only families."""
    if family is BoundFamily.SJOLANDER_SDE:
        return _term_expr(1, f"SDE({arm})", _SDE1_TERMS, arm)
    if family is BoundFamily.SJOLANDER_SIE:
        return _term_expr(1, f"SIE({arm})", _SIE1_TERMS, arm)
    if family is BoundFamily.GABRIEL_SDE:
        return _term_expr(2, f"SDE({arm})", _SDE2_TERMS, arm)
    if family is BoundFamily.GABRIEL_SIE:
        return _term_expr(2, f"SIE({arm})", _SIE2_TERMS, arm)
    raise ValueError(f"{family.value} has no affine term list")


def _eval_terms(dist: ObservedDist, expr: BoundExpr) -> Interval:
    lo, hi = expr.evaluate(dist.cells)
    return Interval(lo, hi)


def sde1_bounds(dist: ObservedDistI, arm: int) -> Interval:
    """Randomization-only bounds on the separable direct effect, setting 1."""
    return _eval_terms(dist, closed_bound_expr(BoundFamily.SJOLANDER_SDE, arm))


def sie1_bounds(dist: ObservedDistI, arm: int) -> Interval:
    """Randomization-only bounds on the separable indirect effect, setting 1."""
    return _eval_terms(dist, closed_bound_expr(BoundFamily.SJOLANDER_SIE, arm))


def gabriel_sde2_bounds(dist: ObservedDistII, arm: int) -> Interval:
    """Randomization-only bounds on the separable direct effect, setting 2."""
    return _eval_terms(dist, closed_bound_expr(BoundFamily.GABRIEL_SDE, arm))


def gabriel_sie2_bounds(dist: ObservedDistII, arm: int) -> Interval:
    """Randomization-only bounds on the separable indirect effect, setting 2."""
    return _eval_terms(dist, closed_bound_expr(BoundFamily.GABRIEL_SIE, arm))


# -- Frechet-style cross-world bounds -------------------------------------------


def _finalize_interval(lower: _PV, upper: _PV, widen: bool, what: str) -> Interval:
    if lower.exact and upper.exact:
        return Interval(lower.lo, upper.hi)
    if widen:
        return Interval(lower.lo, upper.hi)
    raise UndefinedConditional(
        f"{what} depends on a conditional with an empty conditioning event"
    )


def rr_frechet_nde1(
    dist: ObservedDistI, arm: int, widen: bool = False
) -> Interval:
    """Frechet bounds on the natural direct effect NDE(arm), setting 1.

    Randomization plus single-world ignorability identify Pr{M(arm)=m} and
    Pr{Y(a,m)=1}; the cross-world term Pr{Y(1-arm', M(arm))} is bracketed
    cellwise in m.  The arm-1 version mirrors the arm-0 construction with
    the roles of the treatment arms exchanged.
    """
    a_star = arm
    a_y = 1 - arm
    low = _PV(0)
    up = _PV(0)
    for m in (0, 1):
        q = dist.pr_m(m, a_star)
        r = pv_conditional(dist.p(1, m, a_y), dist.pr_m(m, a_y))
        low = low + pv_max(_PV(0), r + _PV(q) - _PV(1))
        up = up + pv_min(r, _PV(q))
    if arm == 0:
        base = dist.pr_y1(0)
        return _finalize_interval(low - base, up - base, widen, "NDE(0) bounds")
    base = dist.pr_y1(1)
    return _finalize_interval(base - up, base - low, widen, "NDE(1) bounds")


def frechet_nde000(
    dist: ObservedDistII, arm: int = 0, widen: bool = False
) -> Interval:
    """Frechet bounds on NDE(a,a,a) in setting 2, treating L as a second,
    upstream mediator.  The cross-world term couples three component events
    per (m, l) cell, hence the three-way brackets and the min{1, .} clamps.
    """
    a_star = arm
    a_y = 1 - arm
    low = _PV(0)
    up = _PV(0)
    for l in (0, 1):
        w = dist.pr_l(l, a_star)
        if w == 0:
            # cell carries no mass: both brackets vanish identically
            continue
        for m in (0, 1):
            q = pv_conditional(dist.pr_ml(m, l, a_star), w)
            r = pv_conditional(dist.p(1, m, l, a_y), dist.pr_ml(m, l, a_y))
            low = low + pv_max(_PV(0), r + q + _PV(w) - _PV(2))
            up = up + pv_min(r, q, _PV(w))
    low = pv_min(_PV(1), low)
    up = pv_min(_PV(1), up)
    if arm == 0:
        base = dist.pr_y1(0)
        return _finalize_interval(
            low - base, up - base, widen, "NDE(0,0,0) bounds"
        )
    base = dist.pr_y1(1)
    return _finalize_interval(base - up, base - low, widen, "NDE(1,1,1) bounds")


def tchetgen_nde2(
    dist: ObservedDistII, arm_y: int, arm_m: int, widen: bool = False
) -> Interval:
    """Frechet bounds on the natural direct effect in setting 2 treating L as
    a treatment-induced confounder of the mediator-outcome relation.

    The identified outcome margin is T_a(m) = sum_l Pr(Y=1|A=a,M=m,L=l)
    Pr(L=l|A=a); the mediator margin is Q(m) = Pr(M=m|A=arm_m).  arm_y picks
    which side of the natural contrast is the cross-world term; the printed
    construction is arm_y=1, the other arm follows by exchanging arm roles.
    """
    if arm_y == arm_m:
        raise ValueError("arm_y must differ from arm_m (see Estimand rules)")
    low = _PV(0)
    up = _PV(0)
    for m in (0, 1):
        q = dist.pr_m(m, arm_m)
        t = _PV(0)
        for l in (0, 1):
            w = dist.pr_l(l, arm_y)
            if w == 0:
                continue
            r = pv_conditional(dist.p(1, m, l, arm_y), dist.pr_ml(m, l, arm_y))
            t = t + _PV(w) * r
        low = low + pv_max(_PV(0), _PV(q) + t - _PV(1))
        up = up + pv_min(_PV(q), t)
    if arm_y == 1:
        base = dist.pr_y1(0)
        return _finalize_interval(
            low - base, up - base, widen, "L-confounded NDE bounds"
        )
    base = dist.pr_y1(1)
    return _finalize_interval(
        base - up, base - low, widen, "L-confounded NDE bounds"
    )


def family_bounds(
    dist: ObservedDist,
    family: BoundFamily,
    arm: int,
    mediator_arm: int | None = None,
    widen: bool = False,
) -> Interval:
    """Evaluate any closed-form family on a distribution.

    ``mediator_arm`` applies only to ``TCHETGEN_NDE`` and defaults to the
    arm opposite ``arm``; ``widen`` applies only to the Frechet families.
    """
    if dist.setting != family.setting:
        raise ValueError(
            f"{family.value} is a setting-{family.setting} family, "
            f"distribution is setting {dist.setting}"
        )
    if family is BoundFamily.SJOLANDER_SDE:
        return sde1_bounds(dist, arm)
    if family is BoundFamily.SJOLANDER_SIE:
        return sie1_bounds(dist, arm)
    if family is BoundFamily.GABRIEL_SDE:
        return gabriel_sde2_bounds(dist, arm)
    if family is BoundFamily.GABRIEL_SIE:
        return gabriel_sie2_bounds(dist, arm)
    if family is BoundFamily.RR_FRECHET_NDE:
        return rr_frechet_nde1(dist, arm, widen=widen)
    if family is BoundFamily.FRECHET_NDE000:
        return frechet_nde000(dist, arm, widen=widen)
    if mediator_arm is None:
        mediator_arm = 1 - arm
    return tchetgen_nde2(dist, arm_y=arm, arm_m=mediator_arm, widen=widen)


def intersect(first: Interval, second: Interval, tol: float = 1e-12) -> Interval:
    """Intersection of two bound intervals for the same estimand."""
    lo = max(first.lower, second.lower, key=float)
    hi = min(first.upper, second.upper, key=float)
    if float(lo) > float(hi) + tol:
        raise EmptyIntersection(
            f"[{float(first.lower)}, {float(first.upper)}] and "
            f"[{float(second.lower)}, {float(second.upper)}] do not overlap"
        )
    return Interval(lo, hi)
