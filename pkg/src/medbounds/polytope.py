"""Sharp randomization-only bounds as linear programs over response types.

For SDE/SIE/TE the latent joint law q over response-type combos is
constrained only by reproducing the observed per-arm cells, P q = p, q >= 0.
Combos with identical per-arm cell signatures are interchangeable except for
their contrast value, so the LP collapses onto signature columns (a
transportation-polytope structure) with the extreme contrast per signature —
exact rational simplex then gives numeric endpoints plus attaining witnesses.

Dualizing the same system and enumerating dual-polyhedron vertices yields
symbolic envelopes: every vertex is an affine expression in the observed
probabilities; the lower bound is the max of the lower family, the upper
bound the min of the upper family.  Expressions that never strictly achieve
the envelope anywhere on the observed polytope are pruned by exact LP.

``coupling_bounds`` reuses the machinery for cross-world functionals under
single-world-ignorability-style assumption sets: the LP columns become joint
assignments of the few relevant component response bits and the rows pin
only identified margins.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import catalog
from .dd import enumerate_vertices
from .dists import (
    Estimand,
    EstimandKind,
    Interval,
    ObservedDist,
    ObservedDistI,
    ObservedDistII,
)
from .errors import (
    DimensionMismatch,
    SymbolMismatch,
    UnsupportedEstimand,
)
from .exprs import BoundExpr, LinearExpr, flat_index, n_cells
from .simplex import solve_lp

Q = Fraction

DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class ConstraintSystem:
    """Merged-column LP data for one randomization-only estimand.

    ``signatures`` enumerates (arm0 cell, arm1 cell) pairs; ``c_min``/
    ``c_max`` give the extreme contrast among combos sharing the signature,
    and ``rep_min``/``rep_max`` a representative combo attaining it (used to
    expand LP witnesses back to full combo space).
    """

    setting: int
    estimand: Estimand
    signatures: tuple[tuple[int, int], ...]
    c_min: tuple[int, ...]
    c_max: tuple[int, ...]
    rep_min: tuple[int, ...]
    rep_max: tuple[int, ...]

    @property
    def cells(self) -> int:
        return n_cells(self.setting)

    def p_columns(self) -> list[list[int]]:
        """Unreduced 0/1 constraint columns over (cell, arm) rows."""
        cols = []
        for c0, c1 in self.signatures:
            col = [0] * (2 * self.cells)
            col[flat_index(self.setting, c0, 0)] = 1
            col[flat_index(self.setting, c1, 1)] = 1
            cols.append(col)
        return cols


@lru_cache(maxsize=None)
def build_system(setting: int, estimand: Estimand) -> ConstraintSystem:
    """Merged constraint system; UnsupportedEstimand unless SDE/SIE/TE."""
    if estimand.setting != setting:
        raise DimensionMismatch("estimand setting differs from requested setting")
    if not catalog.randomization_only(estimand):
        raise UnsupportedEstimand(
            f"{estimand.kind.value} is not a randomization-only LP estimand"
        )
    ncells = n_cells(setting)
    cvec = catalog.objective_vector(setting, estimand)
    cell0, cell1 = catalog.cells_by_arm(setting)
    cmin: dict[tuple[int, int], int] = {}
    cmax: dict[tuple[int, int], int] = {}
    rmin: dict[tuple[int, int], int] = {}
    rmax: dict[tuple[int, int], int] = {}
    for combo in range(catalog.n_combos(setting)):
        sig = (int(cell0[combo]), int(cell1[combo]))
        v = cvec[combo]
        if sig not in cmin or v < cmin[sig]:
            cmin[sig] = v
            rmin[sig] = combo
        if sig not in cmax or v > cmax[sig]:
            cmax[sig] = v
            rmax[sig] = combo
    sigs = tuple(sorted(cmin))
    assert len(sigs) == ncells * ncells  # every signature pair is realizable
    return ConstraintSystem(
        setting=setting,
        estimand=estimand,
        signatures=sigs,
        c_min=tuple(cmin[s] for s in sigs),
        c_max=tuple(cmax[s] for s in sigs),
        rep_min=tuple(rmin[s] for s in sigs),
        rep_max=tuple(rmax[s] for s in sigs),
    )


def _check_dist(system: ConstraintSystem, dist: ObservedDist) -> None:
    if dist.setting != system.setting:
        raise DimensionMismatch(
            f"distribution is setting {dist.setting}, system is {system.setting}"
        )


def _transport_rows(
    system: ConstraintSystem, dist: ObservedDist
) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Equality rows over signature columns: per-cell mass in each arm."""
    ncells = system.cells
    nsig = len(system.signatures)
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    for a in (0, 1):
        for cell in range(ncells):
            row = [Q(0)] * nsig
            for j, (c0, c1) in enumerate(system.signatures):
                if (c0 if a == 0 else c1) == cell:
                    row[j] = Q(1)
            A.append(row)
            b.append(dist.cell(cell, a))
    return A, b


@dataclass
class LpEndpoint:
    value: Fraction
    witness: dict[int, Fraction]  # combo id -> probability


def lp_endpoint(
    system: ConstraintSystem, dist: ObservedDist, maximize: bool
) -> LpEndpoint:
    """One LP solve with the witness expanded to full combo space."""
    _check_dist(system, dist)
    A, b = _transport_rows(system, dist)
    c = system.c_max if maximize else system.c_min
    reps = system.rep_max if maximize else system.rep_min
    res = solve_lp(A, b, [Q(v) for v in c], maximize=maximize)
    witness: dict[int, Fraction] = {}
    for j, mass in enumerate(res.x):
        if mass != 0:
            combo = reps[j]
            witness[combo] = witness.get(combo, Q(0)) + mass
    return LpEndpoint(value=res.value, witness=witness)


def numeric_bounds(system: ConstraintSystem, dist: ObservedDist) -> Interval:
    """Exact sharp [min, max] of the estimand over all feasible joint laws."""
    lo = lp_endpoint(system, dist, maximize=False)
    hi = lp_endpoint(system, dist, maximize=True)
    return Interval(lo.value, hi.value)


# -- symbolic derivation -------------------------------------------------------


def _dual_inequalities(
    system: ConstraintSystem, upper: bool
) -> list[tuple[list[Fraction], Fraction]]:
    """H-representation of the dual polyhedron, as (normal, rhs): n.y >= r.

    Dual coordinates: y = (alpha, u_0..u_{k-2}, v_0..v_{k-2}) where k is the
    per-arm cell count; alpha is the joint normalization multiplier and u, v
    the reduced per-cell multipliers (the all-ones cell of each arm is
    eliminated so the system has full row rank and the dual is pointed).
    Upper side: y . B_sig >= c_max(sig); lower side: y . B_sig <= c_min(sig).
    """
    ncells = system.cells
    dim = 1 + 2 * (ncells - 1)
    drop = ncells - 1
    out: list[tuple[list[Fraction], Fraction]] = []
    cvals = system.c_max if upper else system.c_min
    for j, (c0, c1) in enumerate(system.signatures):
        normal = [Q(0)] * dim
        normal[0] = Q(1)
        if c0 != drop:
            normal[1 + c0] = Q(1)
        if c1 != drop:
            normal[ncells + c1] = Q(1)
        rhs = Q(cvals[j])
        if not upper:  # flip to >= form
            normal = [-v for v in normal]
            rhs = -rhs
        out.append((normal, rhs))
    return out


def _vertex_to_expr(system: ConstraintSystem, y: Sequence[Fraction]) -> LinearExpr:
    ncells = system.cells
    coeffs = [Q(0)] * (2 * ncells)
    for cell in range(ncells - 1):
        coeffs[flat_index(system.setting, cell, 0)] = y[1 + cell]
        coeffs[flat_index(system.setting, cell, 1)] = y[ncells + cell]
    return LinearExpr.make(system.setting, y[0], coeffs)


def _observed_polytope_rows(
    setting: int, ncols_extra: int
) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Per-arm normalization rows over full cell variables (+ extra columns)."""
    ncells = n_cells(setting)
    A = []
    b = []
    for a in (0, 1):
        row = [Q(0)] * (2 * ncells + ncols_extra)
        for cell in range(ncells):
            row[flat_index(setting, cell, a)] = Q(1)
        A.append(row)
        b.append(Q(1))
    return A, b


def _strict_gap(
    setting: int, candidate: LinearExpr, others: Sequence[LinearExpr], upper: bool
) -> tuple[Fraction, tuple[Fraction, ...]]:
    """max over valid dists of min_j s*(e_j - e_cand), s = +1 upper / -1 lower.

    Positive optimum means the candidate is strictly below (upper side) /
    above (lower side) every other term somewhere, i.e. essential.  Returns
    (optimum, maximizing distribution cells).
    """
    ncells = n_cells(setting)
    np_ = 2 * ncells
    k = len(others)
    # columns: p cells | t+ | t- | slacks (one per other term)
    ncols = np_ + 2 + k
    A, b = _observed_polytope_rows(setting, 2 + k)
    sign = Q(1) if upper else Q(-1)
    for j, e in enumerate(others):
        row = [Q(0)] * ncols
        for i in range(np_):
            row[i] = sign * (e.coeffs[i] - candidate.coeffs[i])
        row[np_] = Q(-1)
        row[np_ + 1] = Q(1)
        row[np_ + 2 + j] = Q(-1)
        A.append(row)
        b.append(sign * (candidate.constant - e.constant))
    c = [Q(0)] * ncols
    c[np_] = Q(1)
    c[np_ + 1] = Q(-1)
    res = solve_lp(A, b, c, maximize=True)
    return res.value, tuple(res.x[:np_])


def _prune_terms(
    setting: int, terms: list[LinearExpr], upper: bool
) -> list[LinearExpr]:
    """Drop terms that never strictly achieve the envelope on valid dists."""
    terms = sorted(set(terms), key=LinearExpr.sort_key)
    if len(terms) <= 1:
        return terms
    kept = list(terms)
    i = 0
    while i < len(kept):
        cand = kept[i]
        others = [t for t in kept if t is not cand]
        if not others:
            break
        gap, _ = _strict_gap(setting, cand, others, upper)
        if gap <= 0:
            kept.pop(i)
        else:
            i += 1
    return kept


def symbolic_bounds(
    system: ConstraintSystem, budget: int | None = DEFAULT_BUDGET
) -> BoundExpr:
    """Closed-form sharp envelopes via dual vertex enumeration."""
    sides: dict[bool, list[LinearExpr]] = {}
    for upper in (False, True):
        ineqs = _dual_inequalities(system, upper)
        dim = 1 + 2 * (system.cells - 1)
        enum = enumerate_vertices(ineqs, dim, budget=budget)
        exprs = [_vertex_to_expr(system, y) for y in enum.vertices]
        sides[upper] = _prune_terms(system.setting, exprs, upper)
    return BoundExpr(
        setting=system.setting,
        estimand_label=system.estimand.label,
        lower_terms=tuple(sides[False]),
        upper_terms=tuple(sides[True]),
    ).sorted()


def evaluate(expr: BoundExpr, dist: ObservedDist) -> Interval:
    """Evaluate a symbolic bound on a distribution, exactly."""
    if expr.setting != dist.setting:
        raise SymbolMismatch(
            f"expression is setting {expr.setting}, distribution {dist.setting}"
        )
    lo, hi = expr.evaluate(dist.cells)
    return Interval(lo, hi)


def envelope_witness(
    setting: int,
    terms_a: Sequence[LinearExpr],
    terms_b: Sequence[LinearExpr],
    upper: bool,
):
    """A valid distribution where envelope A is strictly tighter than B.

    Returns (cells, value_a, value_b) for the first term of A achieving a
    strict gap below (upper side) / above (lower side) all of B, or None if
    neither envelope cuts strictly inside the other anywhere.
    """
    for cand in terms_a:
        gap, cells = _strict_gap(setting, cand, list(terms_b), upper)
        if gap > 0:
            va = cand.evaluate(cells)
            vb_terms = [e.evaluate(cells) for e in terms_b]
            vb = min(vb_terms) if upper else max(vb_terms)
            return cells, va, vb
    return None


# -- coupling LPs over component response bits ---------------------------------


def _atom_lp(
    n_bits: int,
    rows: list[tuple[list[int], Fraction]],
    objective: list[int],
) -> tuple[Fraction, Fraction]:
    """min/max of an atom-indicator objective over the constrained joint.

    Atoms are all 2^n_bits assignments; each row is (atom indicator list,
    target probability); normalization is added automatically.
    """
    n_atoms = 1 << n_bits
    A: list[list[Fraction]] = [[Q(1)] * n_atoms]
    b: list[Fraction] = [Q(1)]
    for ind, target in rows:
        A.append([Q(v) for v in ind])
        b.append(target)
    c = [Q(v) for v in objective]
    lo = solve_lp(A, b, c, maximize=False).value
    hi = solve_lp(A, b, c, maximize=True).value
    return lo, hi


def _coupling_bounds_1(dist: ObservedDistI, arm: int) -> Interval:
    """Cross-world Pr{Y(1-arm', M(arm))}-style LP for the setting-1 NDE."""
    a_star = arm
    a_y = 1 - arm
    # bits: 0 -> M(a*), 1 -> Y(a_y, 0), 2 -> Y(a_y, 1)
    n_bits = 3
    atoms = list(range(1 << n_bits))
    rows: list[tuple[list[int], Fraction]] = []
    rows.append(([(at >> 0) & 1 for at in atoms], dist.pr_m(1, a_star)))
    for m in (0, 1):
        r = dist.pr_y1_given_m(a_y, m)
        if r is not None:
            rows.append(([(at >> (1 + m)) & 1 for at in atoms], r))
    obj = [(at >> (1 + ((at >> 0) & 1))) & 1 for at in atoms]
    t_lo, t_hi = _atom_lp(n_bits, rows, obj)
    if arm == 0:
        base = dist.pr_y1(0)
        return Interval(t_lo - base, t_hi - base)
    base = dist.pr_y1(1)
    return Interval(base - t_hi, base - t_lo)


def _coupling_bounds_2_sequential(dist: ObservedDistII, arm: int) -> Interval:
    """Cross-world LP for NDE(a,a,a) with component-level margins."""
    a_star = arm
    a_y = 1 - arm
    # bits: 0 -> L(a*), 1 -> M(a*,0), 2 -> M(a*,1),
    #       3+2l+m -> Y(a_y, l, m)
    n_bits = 7
    atoms = list(range(1 << n_bits))
    rows: list[tuple[list[int], Fraction]] = []
    rows.append(([(at >> 0) & 1 for at in atoms], dist.pr_l(1, a_star)))
    for l in (0, 1):
        q = dist.pr_m_given_l(1, a_star, l)
        if q is not None:
            rows.append(([(at >> (1 + l)) & 1 for at in atoms], q))
    for l in (0, 1):
        for m in (0, 1):
            r = dist.pr_y1_given_ml(a_y, m, l)
            if r is not None:
                rows.append(
                    ([(at >> (3 + 2 * l + m)) & 1 for at in atoms], r)
                )

    def obj_bit(at: int) -> int:
        l = (at >> 0) & 1
        m = (at >> (1 + l)) & 1
        return (at >> (3 + 2 * l + m)) & 1

    obj = [obj_bit(at) for at in atoms]
    t_lo, t_hi = _atom_lp(n_bits, rows, obj)
    if arm == 0:
        base = dist.pr_y1(0)
        return Interval(t_lo - base, t_hi - base)
    base = dist.pr_y1(1)
    return Interval(base - t_hi, base - t_lo)


def _coupling_bounds_2_tchetgen(
    dist: ObservedDistII, a_y: int, a_m: int
) -> Interval:
    """Cross-world LP for the L-confounded natural contrast.

    Margins pinned: Pr{L(a)}, the composite Pr{M(a_m, L(a_m)) = 1} and the
    composite Pr{Y(a_y, L(a_y), m) = 1} (the single-world functionals the
    assumption set identifies).
    """
    # bits: 0 -> L(a_m), 1 -> L(a_y), 2+l -> M(a_m, l), 4+2l+m -> Y(a_y,l,m)
    n_bits = 8
    atoms = list(range(1 << n_bits))
    rows: list[tuple[list[int], Fraction]] = []
    rows.append(([(at >> 0) & 1 for at in atoms], dist.pr_l(1, a_m)))
    rows.append(([(at >> 1) & 1 for at in atoms], dist.pr_l(1, a_y)))

    def m_nat(at: int) -> int:
        l = (at >> 0) & 1
        return (at >> (2 + l)) & 1

    rows.append(([m_nat(at) for at in atoms], dist.pr_m(1, a_m)))
    for m in (0, 1):
        # composite outcome margin T_{a_y}(m), when estimable
        total = Q(0)
        ok = True
        for l in (0, 1):
            w = dist.pr_l(l, a_y)
            if w == 0:
                continue
            r = dist.pr_y1_given_ml(a_y, m, l)
            if r is None:
                ok = False
                break
            total += w * r
        if not ok:
            continue

        def y_nat(at: int, m=m) -> int:
            l = (at >> 1) & 1
            return (at >> (4 + 2 * l + m)) & 1

        rows.append(([y_nat(at) for at in atoms], total))

    def obj_bit(at: int) -> int:
        m = m_nat(at)
        l = (at >> 1) & 1
        return (at >> (4 + 2 * l + m)) & 1

    obj = [obj_bit(at) for at in atoms]
    t_lo, t_hi = _atom_lp(n_bits, rows, obj)
    if a_y == 1:
        base = dist.pr_y1(0)
        return Interval(t_lo - base, t_hi - base)
    base = dist.pr_y1(1)
    return Interval(base - t_hi, base - t_lo)


def coupling_bounds(dist: ObservedDist, estimand: Estimand) -> Interval:
    """Sharp bounds for a cross-world natural contrast over all joint laws of
    the component response bits whose identified margins match ``dist``."""
    if estimand.setting != dist.setting:
        raise DimensionMismatch("estimand and distribution settings differ")
    if estimand.kind is EstimandKind.NDE_FRECHET:
        if dist.setting == 1:
            return _coupling_bounds_1(dist, estimand.arm)
        return _coupling_bounds_2_sequential(dist, estimand.arm)
    if estimand.kind is EstimandKind.NDE_TCHETGEN:
        return _coupling_bounds_2_tchetgen(
            dist, estimand.arm, estimand.mediator_arm
        )
    raise UnsupportedEstimand(
        f"coupling bounds target cross-world contrasts, not {estimand.kind.value}"
    )
