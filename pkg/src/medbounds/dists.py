"""Observed-data distributions, estimands and intervals.

Two randomized-experiment layouts are supported, both with a binary
treatment A, binary mediator M and binary outcome Y:

    setting 1:  per-arm joint law of (Y, M);          cells p_{ym.a}
    setting 2:  per-arm joint law of (Y, M, L) where  cells p_{yml.a}
                L is a post-treatment covariate observed before M.

All probabilities are held as exact ``fractions.Fraction`` values; floats
only appear when results are formatted for reporting.  Cell storage order is
lexicographic in (y, m[, l], a), matching :mod:`medbounds.exprs`.
"""

from __future__ import annotations

import csv
import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

from .errors import EmptyArm, UndefinedConditional
from .exprs import cell_of, check_setting, flat_index, n_cells

Q = Fraction

_NORM_TOL = Q(1, 10**12)


def _to_fraction(x: Union[int, float, Fraction, str]) -> Fraction:
    # Fraction(float) is exact: binary floats are dyadic rationals.
    return Q(x)


def _validated_cells(
    setting: int, cells: Sequence[Union[int, float, Fraction]]
) -> tuple[Fraction, ...]:
    """Coerce to Fraction, check per-arm normalization, renormalize exactly."""
    want = 2 * n_cells(setting)
    if len(cells) != want:
        raise ValueError(f"expected {want} cells, got {len(cells)}")
    vec = [_to_fraction(c) for c in cells]
    for v in vec:
        if v < 0 or v > 1:
            raise ValueError(f"cell probability {v} outside [0, 1]")
    for a in (0, 1):
        idx = [flat_index(setting, cell, a) for cell in range(n_cells(setting))]
        total = sum(vec[i] for i in idx)
        if abs(total - 1) > _NORM_TOL:
            raise ValueError(
                f"arm {a} cell probabilities sum to {float(total)!r}, not 1"
            )
        if total != 1:  # exact renormalization of float round-off
            for i in idx:
                vec[i] /= total
    return tuple(vec)


class _DistBase:
    """Shared accessors for both settings (mixin over ``cells``)."""

    setting: int
    cells: tuple[Fraction, ...]

    # -- generic access ------------------------------------------------------

    def cell(self, cell: int, a: int) -> Fraction:
        return self.cells[flat_index(self.setting, cell, a)]

    def arm_cells(self, a: int) -> tuple[Fraction, ...]:
        return tuple(
            self.cell(c, a) for c in range(n_cells(self.setting))
        )

    def pr_y1(self, a: int) -> Fraction:
        """Pr(Y=1 | A=a)."""
        total = Q(0)
        for c in range(n_cells(self.setting)):
            y = c >> (1 if self.setting == 1 else 2)
            if y == 1:
                total += self.cell(c, a)
        return total

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.cells)


@dataclass(frozen=True)
class ObservedDistI(_DistBase):
    """Setting-1 observed law: p_{ym.a} = Pr(Y=y, M=m | A=a)."""

    cells: tuple[Fraction, ...]
    setting: int = 1

    def __post_init__(self) -> None:
        if self.setting != 1:
            raise ValueError("ObservedDistI is setting 1")
        object.__setattr__(self, "cells", _validated_cells(1, self.cells))

    @classmethod
    def from_probs(
        cls, probs: Mapping[tuple[int, int, int], Union[int, float, Fraction]]
    ) -> "ObservedDistI":
        """Build from {(y, m, a): probability}; omitted cells are zero."""
        vec = [Q(0)] * 8
        for (y, m, a), v in probs.items():
            vec[flat_index(1, cell_of(1, y, m), a)] = _to_fraction(v)
        return cls(tuple(vec))

    def p(self, y: int, m: int, a: int) -> Fraction:
        return self.cell(cell_of(1, y, m), a)

    def pr_m(self, m: int, a: int) -> Fraction:
        """Pr(M=m | A=a)."""
        return self.p(0, m, a) + self.p(1, m, a)

    def pr_y1_given_m(self, a: int, m: int) -> Fraction | None:
        """Pr(Y=1 | A=a, M=m); None when Pr(M=m | A=a) = 0."""
        denom = self.pr_m(m, a)
        if denom == 0:
            return None
        return self.p(1, m, a) / denom


@dataclass(frozen=True)
class ObservedDistII(_DistBase):
    """Setting-2 observed law: p_{yml.a} = Pr(Y=y, M=m, L=l | A=a)."""

    cells: tuple[Fraction, ...]
    setting: int = 2

    def __post_init__(self) -> None:
        if self.setting != 2:
            raise ValueError("ObservedDistII is setting 2")
        object.__setattr__(self, "cells", _validated_cells(2, self.cells))

    @classmethod
    def from_probs(
        cls,
        probs: Mapping[tuple[int, int, int, int], Union[int, float, Fraction]],
    ) -> "ObservedDistII":
        """Build from {(y, m, l, a): probability}; omitted cells are zero."""
        vec = [Q(0)] * 16
        for (y, m, l, a), v in probs.items():
            vec[flat_index(2, cell_of(2, y, m, l), a)] = _to_fraction(v)
        return cls(tuple(vec))

    def p(self, y: int, m: int, l: int, a: int) -> Fraction:
        return self.cell(cell_of(2, y, m, l), a)

    def pr_l(self, l: int, a: int) -> Fraction:
        """Pr(L=l | A=a)."""
        return sum(self.p(y, m, l, a) for y in (0, 1) for m in (0, 1))

    def pr_m(self, m: int, a: int) -> Fraction:
        """Pr(M=m | A=a)."""
        return sum(self.p(y, m, l, a) for y in (0, 1) for l in (0, 1))

    def pr_ml(self, m: int, l: int, a: int) -> Fraction:
        """Pr(M=m, L=l | A=a)."""
        return self.p(0, m, l, a) + self.p(1, m, l, a)

    def pr_m_given_l(self, m: int, a: int, l: int) -> Fraction | None:
        """Pr(M=m | A=a, L=l); None when Pr(L=l | A=a) = 0."""
        denom = self.pr_l(l, a)
        if denom == 0:
            return None
        return self.pr_ml(m, l, a) / denom

    def pr_y1_given_ml(self, a: int, m: int, l: int) -> Fraction | None:
        """Pr(Y=1 | A=a, M=m, L=l); None when the conditioning cell is empty."""
        denom = self.pr_ml(m, l, a)
        if denom == 0:
            return None
        return self.p(1, m, l, a) / denom


ObservedDist = Union[ObservedDistI, ObservedDistII]


def marginalize_L(dist: ObservedDistII) -> ObservedDistI:
    """Collapse L: p_{ym.a} = sum_l p_{yml.a}."""
    vec = [Q(0)] * 8
    for y in (0, 1):
        for m in (0, 1):
            for a in (0, 1):
                vec[flat_index(1, cell_of(1, y, m), a)] = sum(
                    dist.p(y, m, l, a) for l in (0, 1)
                )
    return ObservedDistI(tuple(vec))


# -- count tables and CSV I/O -------------------------------------------------

_CSV_HEADERS = {1: ["a", "m", "y", "n"], 2: ["a", "l", "m", "y", "n"]}


@dataclass(frozen=True)
class CountTable:
    """Integer cell counts; key order matches the distribution cell order."""

    setting: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        check_setting(self.setting)
        want = 2 * n_cells(self.setting)
        if len(self.counts) != want:
            raise ValueError(f"expected {want} counts, got {len(self.counts)}")
        for n in self.counts:
            if not isinstance(n, int) or n < 0:
                raise ValueError(f"counts must be nonnegative integers, got {n!r}")

    @classmethod
    def from_mapping(
        cls, setting: int, counts: Mapping[tuple, int]
    ) -> "CountTable":
        """Keys are (y, m, a) in setting 1 and (y, m, l, a) in setting 2."""
        vec = [0] * (2 * n_cells(setting))
        for key, n in counts.items():
            *yml, a = key
            vec[flat_index(setting, cell_of(setting, *yml), a)] = n
        return cls(setting, tuple(vec))

    def arm_total(self, a: int) -> int:
        return sum(
            self.counts[flat_index(self.setting, c, a)]
            for c in range(n_cells(self.setting))
        )


def dist_from_counts(table: CountTable) -> ObservedDist:
    """Exact sample proportions per arm."""
    for a in (0, 1):
        if table.arm_total(a) == 0:
            raise EmptyArm(f"arm a={a} has zero total count")
    vec: list[Fraction] = []
    for i, n in enumerate(table.counts):
        a = i % 2
        vec.append(Q(n, table.arm_total(a)))
    cls = ObservedDistI if table.setting == 1 else ObservedDistII
    return cls(tuple(vec))


def read_counts_csv(path: str, setting: int) -> CountTable:
    """Read a count table; header must be exactly ``a,m,y,n`` (setting 1) or
    ``a,l,m,y,n`` (setting 2).  One row per cell; duplicate cells are an error.
    """
    check_setting(setting)
    header = _CSV_HEADERS[setting]
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if [h.strip() for h in first] != header:
            raise ValueError(
                f"{path}: expected header {','.join(header)!r}, "
                f"got {','.join(first)!r}"
            )
        vec = [0] * (2 * n_cells(setting))
        seen: set[int] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields")
            try:
                vals = [int(x) for x in row]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer field") from None
            *levels, n = vals
            for v in levels:
                if v not in (0, 1):
                    raise ValueError(f"{path}:{lineno}: levels must be 0 or 1")
            if n < 0:
                raise ValueError(f"{path}:{lineno}: negative count")
            if setting == 1:
                a, m, y = levels
                idx = flat_index(1, cell_of(1, y, m), a)
            else:
                a, l, m, y = levels
                idx = flat_index(2, cell_of(2, y, m, l), a)
            if idx in seen:
                raise ValueError(f"{path}:{lineno}: duplicate cell")
            seen.add(idx)
            vec[idx] = n
    return CountTable(setting, tuple(vec))


def write_counts_csv(path: str, table: CountTable) -> None:
    """Write nonzero cells, UTF-8 with LF line endings."""
    header = _CSV_HEADERS[table.setting]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for cell in range(n_cells(table.setting)):
            for a in (0, 1):
                n = table.counts[flat_index(table.setting, cell, a)]
                if n == 0:
                    continue
                if table.setting == 1:
                    y, m = cell >> 1, cell & 1
                    writer.writerow([a, m, y, n])
                else:
                    y, m, l = cell >> 2, (cell >> 1) & 1, cell & 1
                    writer.writerow([a, l, m, y, n])


# -- estimands -----------------------------------------------------------------


class EstimandKind(enum.Enum):
    SDE = "SDE"
    SIE = "SIE"
    TE = "TE"
    NDE_FRECHET = "NDE_FRECHET"
    NDE_TCHETGEN = "NDE_TCHETGEN"
    MEDIATION_POINT_NDE = "MEDIATION_POINT_NDE"
    MEDIATION_POINT_NIE = "MEDIATION_POINT_NIE"


_ARMLESS = {EstimandKind.TE}
_NEED_MEDIATOR_ARM = {EstimandKind.NDE_TCHETGEN}


@dataclass(frozen=True)
class Estimand:
    """Target quantity; ``arm`` is the held-fixed arm of the contrast.

    For ``NDE_TCHETGEN`` the ``arm`` is the arm a at which the outcome arm
    contrast is anchored on the Y side and ``mediator_arm`` is the arm a*
    whose mediator law enters the cross-world term.
    """

    kind: EstimandKind
    setting: int
    arm: int | None = None
    mediator_arm: int | None = None

    def __post_init__(self) -> None:
        check_setting(self.setting)
        if self.kind in _ARMLESS:
            if self.arm is not None:
                raise ValueError(f"{self.kind.value} takes no arm")
        else:
            if self.arm not in (0, 1):
                raise ValueError(f"{self.kind.value} requires arm in {{0, 1}}")
        if self.kind in _NEED_MEDIATOR_ARM:
            if self.setting != 2:
                raise ValueError("NDE_TCHETGEN is a setting-2 estimand")
            if self.mediator_arm not in (0, 1):
                raise ValueError("NDE_TCHETGEN requires mediator_arm in {0, 1}")
            if self.mediator_arm == self.arm:
                raise ValueError(
                    "NDE_TCHETGEN needs mediator_arm = 1 - arm: the identified"
                    " outcome term lives in the arm opposite the cross-world one"
                )
        elif self.mediator_arm is not None:
            raise ValueError(f"{self.kind.value} takes no mediator_arm")

    @property
    def label(self) -> str:
        k = self.kind
        if k is EstimandKind.TE:
            return "TE"
        if k is EstimandKind.SDE:
            return f"SDE({self.arm})"
        if k is EstimandKind.SIE:
            return f"SIE({self.arm})"
        if k is EstimandKind.NDE_FRECHET:
            if self.setting == 1:
                return f"NDE({self.arm})"
            return f"NDE({self.arm},{self.arm},{self.arm})"
        if k is EstimandKind.NDE_TCHETGEN:
            return f"NDE(a_y={self.arm},a_m={self.mediator_arm})"
        if k is EstimandKind.MEDIATION_POINT_NDE:
            return f"NDE-point({self.arm})"
        return f"NIE-point({self.arm})"


def sde(setting: int, arm: int) -> Estimand:
    return Estimand(EstimandKind.SDE, setting, arm)


def sie(setting: int, arm: int) -> Estimand:
    return Estimand(EstimandKind.SIE, setting, arm)


def te(setting: int) -> Estimand:
    return Estimand(EstimandKind.TE, setting)


# -- intervals -----------------------------------------------------------------

_IV_TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    """Closed interval; endpoints are Fractions (exact) or floats."""

    lower: Union[Fraction, float]
    upper: Union[Fraction, float]

    def __post_init__(self) -> None:
        if float(self.lower) > float(self.upper) + _IV_TOL:
            raise ValueError(
                f"lower {float(self.lower)} exceeds upper {float(self.upper)}"
            )

    @property
    def width(self) -> Union[Fraction, float]:
        return self.upper - self.lower

    def contains(self, x, tol=0) -> bool:
        if tol:
            return (
                float(self.lower) - tol <= float(x) <= float(self.upper) + tol
            )
        return self.lower <= x <= self.upper

    def is_exact(self) -> bool:
        return isinstance(self.lower, Rational) and isinstance(
            self.upper, Rational
        )

    def as_floats(self) -> tuple[float, float]:
        return (float(self.lower), float(self.upper))


# -- random product-law distributions -----------------------------------------


def _open_uniform(rng: random.Random, denominator: int) -> Fraction:
    """Exact uniform draw on the grid {1/d, ..., (d-1)/d} in (0, 1)."""
    return Q(rng.randrange(1, denominator), denominator)


def random_dist1(seed: int, denominator: int = 2**53) -> ObservedDistI:
    """Product-law setting-1 distribution with uniform conditionals.

    Draws Pr(M=1|a) and Pr(Y=1|a,m) independently uniform on (0, 1) (on an
    exact 1/denominator grid) with a deterministic seeded generator and
    composes the joint cells.  Draw order: Pr(M=1|a) for a=0,1 then
    Pr(Y=1|a,m) for (a,m) lexicographic.
    """
    rng = random.Random(seed)
    pm = {a: _open_uniform(rng, denominator) for a in (0, 1)}
    py = {
        (a, m): _open_uniform(rng, denominator)
        for a in (0, 1)
        for m in (0, 1)
    }
    probs = {}
    for a in (0, 1):
        for m in (0, 1):
            weight = pm[a] if m == 1 else 1 - pm[a]
            for y in (0, 1):
                rate = py[(a, m)] if y == 1 else 1 - py[(a, m)]
                probs[(y, m, a)] = weight * rate
    return ObservedDistI.from_probs(probs)


def random_dist2(seed: int, denominator: int = 2**53) -> ObservedDistII:
    """Product-law setting-2 distribution with uniform conditionals.

    Draws Pr(L=1|a), Pr(M=1|a,l), Pr(Y=1|a,l,m) independently uniform on
    (0, 1) and composes the joint.  Draw order: Pr(L=1|a) for a=0,1; then
    Pr(M=1|a,l) for (a,l) lexicographic; then Pr(Y=1|a,l,m) lexicographic.
    """
    rng = random.Random(seed)
    pl = {a: _open_uniform(rng, denominator) for a in (0, 1)}
    pm = {
        (a, l): _open_uniform(rng, denominator)
        for a in (0, 1)
        for l in (0, 1)
    }
    py = {
        (a, l, m): _open_uniform(rng, denominator)
        for a in (0, 1)
        for l in (0, 1)
        for m in (0, 1)
    }
    probs = {}
    for a in (0, 1):
        for l in (0, 1):
            wl = pl[a] if l == 1 else 1 - pl[a]
            for m in (0, 1):
                wm = pm[(a, l)] if m == 1 else 1 - pm[(a, l)]
                for y in (0, 1):
                    wy = py[(a, l, m)] if y == 1 else 1 - py[(a, l, m)]
                    probs[(y, m, l, a)] = wl * wm * wy
    return ObservedDistII.from_probs(probs)


# -- point functionals ---------------------------------------------------------


def total_effect(dist: ObservedDist) -> Fraction:
    """Pr(Y=1|A=1) - Pr(Y=1|A=0)."""
    return dist.pr_y1(1) - dist.pr_y1(0)


class _PV:
    """Probability value with exact interval propagation.

    Conditionals with empty conditioning events enter as the full interval
    [0, 1]; arithmetic tracks exact lower/upper envelopes.  Only operations
    that are monotone on [0, 1]-valued quantities are provided.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = Q(lo)
        self.hi = self.lo if hi is None else Q(hi)

    @classmethod
    def full(cls) -> "_PV":
        return cls(0, 1)

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other):
        other = _as_pv(other)
        return _PV(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_pv(other)
        return _PV(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _as_pv(other) - self

    def __mul__(self, other):
        # both factors are nonnegative in every use here
        other = _as_pv(other)
        return _PV(self.lo * other.lo, self.hi * other.hi)

    __rmul__ = __mul__


def _as_pv(x) -> _PV:
    return x if isinstance(x, _PV) else _PV(x)


def pv_min(*vals: _PV) -> _PV:
    vals = tuple(_as_pv(v) for v in vals)
    return _PV(min(v.lo for v in vals), min(v.hi for v in vals))


def pv_max(*vals: _PV) -> _PV:
    vals = tuple(_as_pv(v) for v in vals)
    return _PV(max(v.lo for v in vals), max(v.hi for v in vals))


def pv_conditional(numer: Fraction, denom: Fraction) -> _PV:
    """numer/denom as a _PV; the full interval when denom = 0."""
    if denom == 0:
        return _PV.full()
    return _PV(numer / denom)


def pv_finalize(value: _PV, widen: bool, what: str):
    """Return exact Fraction, or raise/widen when the value is indeterminate."""
    if value.exact:
        return value.lo
    if widen:
        return value
    raise UndefinedConditional(
        f"{what} depends on a conditional with an empty conditioning event"
    )


def _nde_point_terms_1(dist: ObservedDistI, arm: int) -> _PV:
    total = _PV(0)
    for m in (0, 1):
        w = dist.pr_m(m, arm)
        if w == 0:
            continue
        r1 = pv_conditional(dist.p(1, m, 1), dist.pr_m(m, 1))
        r0 = pv_conditional(dist.p(1, m, 0), dist.pr_m(m, 0))
        total = total + _PV(w) * (r1 - r0)
    return total


def _nie_point_terms_1(dist: ObservedDistI, arm: int) -> _PV:
    total = _PV(0)
    for m in (0, 1):
        dw = dist.pr_m(m, 1) - dist.pr_m(m, 0)
        if dw == 0:
            continue
        r = pv_conditional(dist.p(1, m, arm), dist.pr_m(m, arm))
        sgn_lo = r.lo if dw > 0 else r.hi
        sgn_hi = r.hi if dw > 0 else r.lo
        total = total + _PV(dw * sgn_lo, dw * sgn_hi)
    return total


def _nde_point_terms_2(dist: ObservedDistII, arm: int) -> _PV:
    total = _PV(0)
    for l in (0, 1):
        for m in (0, 1):
            w = dist.pr_ml(m, l, arm)  # Pr(L=l|a) * Pr(M=m|a,L=l)
            if w == 0:
                continue
            r1 = pv_conditional(dist.p(1, m, l, 1), dist.pr_ml(m, l, 1))
            r0 = pv_conditional(dist.p(1, m, l, 0), dist.pr_ml(m, l, 0))
            diff = r1 - r0
            total = total + _PV(w * diff.lo, w * diff.hi)
    return total


def _nie_point_terms_2(dist: ObservedDistII, arm: int) -> _PV:
    total = _PV(0)
    for l in (0, 1):
        for m in (0, 1):
            dw = dist.pr_ml(m, l, 1) - dist.pr_ml(m, l, 0)
            if dw == 0:
                continue
            r = pv_conditional(dist.p(1, m, l, arm), dist.pr_ml(m, l, arm))
            sgn_lo = r.lo if dw > 0 else r.hi
            sgn_hi = r.hi if dw > 0 else r.lo
            total = total + _PV(dw * sgn_lo, dw * sgn_hi)
    return total


def mediation_point_estimate(
    dist: ObservedDist, estimand: Estimand, widen: bool = False
):
    """Mediation-formula plug-in point estimate.

    Setting 1 uses the usual two-way mediation formula; setting 2 uses the
    sequential version that routes both L and M through the mediator arm.
    Without ``widen`` the result is an exact Fraction and an
    UndefinedConditional is raised when an empty conditioning cell actually
    matters; with ``widen`` indeterminate conditionals are replaced by [0, 1]
    and an Interval is returned.
    """
    if estimand.setting != dist.setting:
        raise ValueError("estimand and distribution settings differ")
    if estimand.kind not in (
        EstimandKind.MEDIATION_POINT_NDE,
        EstimandKind.MEDIATION_POINT_NIE,
    ):
        raise ValueError(f"not a point estimand: {estimand.kind.value}")
    is_nde = estimand.kind is EstimandKind.MEDIATION_POINT_NDE
    if dist.setting == 1:
        pv = (_nde_point_terms_1 if is_nde else _nie_point_terms_1)(
            dist, estimand.arm
        )
    else:
        pv = (_nde_point_terms_2 if is_nde else _nie_point_terms_2)(
            dist, estimand.arm
        )
    value = pv_finalize(pv, widen, estimand.label)
    if isinstance(value, _PV):
        return Interval(value.lo, value.hi)
    if widen:
        return Interval(value, value)
    return value
