"""Nonparametric bootstrap confidence intervals for bound endpoints.

Resampling is stratified by treatment arm with the per-arm totals held
fixed, matching a randomized design; each replicate recomputes the bound
endpoints from exact resampled proportions, and the confidence intervals
are percentile intervals per endpoint.  Replicates where the bound is
undefined (an empty conditioning cell that matters) are counted and
excluded rather than silently dropped.

Caveat: percentile intervals lean on the max/min terms inside the bounds
being well separated; with small samples or near-ties among terms the
coverage can degrade.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .closed_forms import BoundFamily, family_bounds
from .dists import CountTable, Interval, dist_from_counts
from .errors import UndefinedConditional
from .exprs import flat_index, n_cells

Q = Fraction


@dataclass(frozen=True)
class CiReport:
    """Bootstrap output: the full-data interval plus per-endpoint CIs."""

    family: BoundFamily
    estimand: str
    arm: int
    mediator_arm: int | None
    point: Interval
    lower_ci: tuple[float, float]
    upper_ci: tuple[float, float]
    replicates: int
    alpha: float
    seed: int
    n_undefined: int

    def as_dict(self) -> dict:
        return {
            "family": _FAMILY_NAMES[self.family],
            "estimand": self.estimand,
            "arm": self.arm,
            "mediator_arm": self.mediator_arm,
            "point": list(self.point.as_floats()),
            "lower_ci": list(self.lower_ci),
            "upper_ci": list(self.upper_ci),
            "replicates": self.replicates,
            "alpha": self.alpha,
            "seed": self.seed,
            "n_undefined": self.n_undefined,
        }


_FAMILY_NAMES = {
    BoundFamily.SJOLANDER_SDE: "sjolander-sde",
    BoundFamily.SJOLANDER_SIE: "sjolander-sie",
    BoundFamily.RR_FRECHET_NDE: "rr-frechet-nde",
    BoundFamily.GABRIEL_SDE: "gabriel-sde",
    BoundFamily.GABRIEL_SIE: "gabriel-sie",
    BoundFamily.FRECHET_NDE000: "frechet-nde000",
    BoundFamily.TCHETGEN_NDE: "tchetgen-nde",
}


def _estimand_label(family: BoundFamily, arm: int, mediator_arm: int | None) -> str:
    if family in (BoundFamily.SJOLANDER_SDE, BoundFamily.GABRIEL_SDE):
        return f"SDE({arm})"
    if family in (BoundFamily.SJOLANDER_SIE, BoundFamily.GABRIEL_SIE):
        return f"SIE({arm})"
    if family is BoundFamily.RR_FRECHET_NDE:
        return f"NDE({arm})"
    if family is BoundFamily.FRECHET_NDE000:
        return f"NDE({arm},{arm},{arm})"
    return f"NDE(a_y={arm},a_m={mediator_arm})"


def bootstrap_ci(
    table: CountTable,
    family: BoundFamily,
    arm: int,
    mediator_arm: int | None = None,
    B: int = 2000,
    alpha: float = 0.05,
    seed: int = 0,
) -> CiReport:
    """Stratified multinomial bootstrap of the bound endpoints.

    Per replicate each arm's counts are redrawn multinomially at the
    observed per-arm total, the bounds are recomputed on the exact
    resampled proportions, and the (alpha/2, 1-alpha/2) percentile
    interval is reported per endpoint.  Deterministic per seed: a single
    generator drives all replicates, so nested-alpha calls on the same
    seed see the same replicate stream.
    """
    if B < 100:
        raise ValueError("B must be at least 100")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if table.setting != family.setting:
        raise ValueError(
            f"{family.value} is a setting-{family.setting} family, "
            f"table is setting {table.setting}"
        )
    if family is BoundFamily.TCHETGEN_NDE:
        if mediator_arm is None:
            mediator_arm = 1 - arm
    elif mediator_arm is not None:
        raise ValueError(f"{family.value} takes no mediator arm")

    point = family_bounds(
        dist_from_counts(table), family, arm, mediator_arm=mediator_arm
    )

    ncells = n_cells(table.setting)
    arm_counts = {
        a: np.array(
            [table.counts[flat_index(table.setting, c, a)] for c in range(ncells)],
            dtype=np.int64,
        )
        for a in (0, 1)
    }
    arm_totals = {a: int(arm_counts[a].sum()) for a in (0, 1)}
    # resample individuals, not float cell probabilities: a uniform index
    # into the stacked arm is an exact multinomial draw at the observed
    # proportions
    arm_cum = {a: np.cumsum(arm_counts[a]) for a in (0, 1)}

    rng = np.random.default_rng(seed)
    lowers: list[float] = []
    uppers: list[float] = []
    n_undefined = 0
    for _ in range(B):
        vec = [0] * (2 * ncells)
        for a in (0, 1):
            idx = rng.integers(0, arm_totals[a], size=arm_totals[a])
            cells = np.searchsorted(arm_cum[a], idx, side="right")
            draw = np.bincount(cells, minlength=ncells)
            for c in range(ncells):
                vec[flat_index(table.setting, c, a)] = int(draw[c])
        rep = dist_from_counts(CountTable(table.setting, tuple(vec)))
        try:
            iv = family_bounds(rep, family, arm, mediator_arm=mediator_arm)
        except UndefinedConditional:
            n_undefined += 1
            continue
        lowers.append(float(iv.lower))
        uppers.append(float(iv.upper))

    if not lowers:
        raise UndefinedConditional(
            "every bootstrap replicate left the bound undefined"
        )
    qs = [alpha / 2, 1 - alpha / 2]
    lo_ci = np.quantile(np.array(lowers), qs)
    up_ci = np.quantile(np.array(uppers), qs)
    return CiReport(
        family=family,
        estimand=_estimand_label(family, arm, mediator_arm),
        arm=arm,
        mediator_arm=mediator_arm,
        point=point,
        lower_ci=(float(lo_ci[0]), float(lo_ci[1])),
        upper_ci=(float(up_ci[0]), float(up_ci[1])),
        replicates=B,
        alpha=alpha,
        seed=seed,
        n_undefined=n_undefined,
    )
