"""Canonical response-type (principal-stratum) catalogs.

Every latent-confounding model over binary (A, M, Y) — and (A, L, M, Y) in
setting 2 — is a mixture of deterministic response-function combinations:

    setting 1:  fM: a -> M            4 types, bit a of the type id
                fY: (a, m) -> Y      16 types, bit (a*2 + m)
                combo id = mt * 16 + yt                 (64 combos)

    setting 2:  fL: a -> L            4 types, bit a
                fM: (a, l) -> M      16 types, bit (a*2 + l)
                fY: (a, l, m) -> Y  256 types, bit (a*4 + l*2 + m)
                combo id = (lt * 16 + mt) * 256 + yt (16384 combos)

The arm-a observed cell of a combo follows by composing the functions along
the realized path; counterfactual contrasts compose them along intervened
paths.  Randomization-only bound systems and ground-truth effect evaluation
both reduce to linear functionals over the combo simplex.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .dists import Estimand, EstimandKind
from .errors import UnsupportedEstimand
from .exprs import cell_of, check_setting


def n_combos(setting: int) -> int:
    check_setting(setting)
    return 64 if setting == 1 else 16384


def split_combo(setting: int, combo: int) -> tuple[int, ...]:
    """Component type ids: (mt, yt) in setting 1, (lt, mt, yt) in setting 2."""
    if setting == 1:
        return (combo >> 4, combo & 15)
    return (combo >> 12, (combo >> 8) & 15, combo & 255)


def join_combo(setting: int, *types: int) -> int:
    if setting == 1:
        mt, yt = types
        return mt * 16 + yt
    lt, mt, yt = types
    return (lt * 16 + mt) * 256 + yt


def f_m1(mt: int, a: int) -> int:
    return (mt >> a) & 1


def f_y1(yt: int, a: int, m: int) -> int:
    return (yt >> (a * 2 + m)) & 1


def f_l2(lt: int, a: int) -> int:
    return (lt >> a) & 1


def f_m2(mt: int, a: int, l: int) -> int:
    return (mt >> (a * 2 + l)) & 1


def f_y2(yt: int, a: int, l: int, m: int) -> int:
    return (yt >> (a * 4 + l * 2 + m)) & 1


def realized_cell(setting: int, combo: int, a: int) -> int:
    """Observed within-arm cell this combo lands in under arm a."""
    if setting == 1:
        mt, yt = split_combo(1, combo)
        m = f_m1(mt, a)
        return cell_of(1, f_y1(yt, a, m), m)
    lt, mt, yt = split_combo(2, combo)
    l = f_l2(lt, a)
    m = f_m2(mt, a, l)
    return cell_of(2, f_y2(yt, a, l, m), m, l)


def _cross_world_y(setting: int, combo: int, y_arm: int, path_arm: int) -> int:
    """Y under outcome-arm ``y_arm`` with (L,) M at their ``path_arm`` values."""
    if setting == 1:
        mt, yt = split_combo(1, combo)
        return f_y1(yt, y_arm, f_m1(mt, path_arm))
    lt, mt, yt = split_combo(2, combo)
    l = f_l2(lt, path_arm)
    m = f_m2(mt, path_arm, l)
    return f_y2(yt, y_arm, l, m)


def counterfactual_value(setting: int, combo: int, estimand: Estimand) -> int:
    """The estimand's contrast evaluated at one deterministic combo.

    Separable effects fix the outcome-arm and path-arm independently, which
    is exactly what the component response functions express; cross-world
    natural effects take the identical form on combos, with the mediator
    path routed through the mediator arm.
    """
    k = estimand.kind
    if k is EstimandKind.TE:
        return _cross_world_y(setting, combo, 1, 1) - _cross_world_y(
            setting, combo, 0, 0
        )
    if k in (EstimandKind.SDE, EstimandKind.MEDIATION_POINT_NDE):
        a = estimand.arm
        return _cross_world_y(setting, combo, 1, a) - _cross_world_y(
            setting, combo, 0, a
        )
    if k in (EstimandKind.SIE, EstimandKind.MEDIATION_POINT_NIE):
        a = estimand.arm
        return _cross_world_y(setting, combo, a, 1) - _cross_world_y(
            setting, combo, a, 0
        )
    if k is EstimandKind.NDE_FRECHET:
        a = estimand.arm
        return _cross_world_y(setting, combo, 1, a) - _cross_world_y(
            setting, combo, 0, a
        )
    if k is EstimandKind.NDE_TCHETGEN:
        # Y(1, M(a_m)) - Y(0, M(a_m)) with L at its natural per-arm value
        # inside each Y term: the natural contrast when L confounds the
        # mediator-outcome relation.  The arm field only selects which side
        # is the cross-world term in the bounding construction.
        am = estimand.mediator_arm
        lt, mt, yt = split_combo(2, combo)
        m_star = f_m2(mt, am, f_l2(lt, am))
        hi = f_y2(yt, 1, f_l2(lt, 1), m_star)
        lo = f_y2(yt, 0, f_l2(lt, 0), m_star)
        return hi - lo
    raise UnsupportedEstimand(f"no combo contrast for {k.value}")


_RANDOMIZATION_KINDS = (EstimandKind.SDE, EstimandKind.SIE, EstimandKind.TE)


def randomization_only(estimand: Estimand) -> bool:
    """Whether the estimand is point-defined per combo without cross-world
    coupling assumptions beyond randomization (SDE/SIE/TE)."""
    return estimand.kind in _RANDOMIZATION_KINDS


@lru_cache(maxsize=None)
def cells_by_arm(setting: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized realized-cell lookup: arrays over combo ids, one per arm."""
    n = n_combos(setting)
    out = []
    for a in (0, 1):
        out.append(
            np.fromiter(
                (realized_cell(setting, c, a) for c in range(n)),
                dtype=np.int64,
                count=n,
            )
        )
    return tuple(out)  # type: ignore[return-value]


@lru_cache(maxsize=None)
def objective_vector(setting: int, estimand: Estimand) -> tuple[int, ...]:
    """Per-combo contrast values in {-1, 0, 1}."""
    return tuple(
        counterfactual_value(setting, combo, estimand)
        for combo in range(n_combos(setting))
    )


@lru_cache(maxsize=None)
def objective_array(setting: int, estimand: Estimand) -> np.ndarray:
    return np.array(objective_vector(setting, estimand), dtype=np.float64)
