"""Exact rational linear programming via the two-phase simplex method.

Solves   min / max  c.x   subject to   A x = b,  x >= 0

entirely in ``fractions.Fraction`` arithmetic.  Dantzig pricing with a
Bland's-rule fallback on degenerate runs guarantees termination; redundant
(consistent) equality rows are detected at the end of phase 1 and dropped.
Intended for the small, dense systems this package produces (tens of rows,
at most a few hundred columns), not as a general-purpose solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import Infeasible, Unbounded

Q = Fraction


@dataclass
class LpResult:
    value: Fraction
    x: list[Fraction]  # full solution vector, length = number of columns


def _pivot(T: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = T[row][col]
    if piv != 1:
        inv = 1 / piv
        T[row] = [v * inv if v else v for v in T[row]]
    prow = T[row]
    for r, R in enumerate(T):
        if r == row:
            continue
        f = R[col]
        if f:
            T[r] = [v - f * p if p else v for v, p in zip(R, prow)]
    basis[row] = col


# consecutive degenerate pivots tolerated before switching to Bland's rule
_BLAND_TRIGGER = 24


def _phase(
    T: list[list[Fraction]],
    basis: list[int],
    cost: list[Fraction],
    ncols: int,
) -> Fraction:
    """Run simplex on tableau T (rows + last column b) minimizing cost.

    Entering column by Dantzig's rule (most negative reduced cost) for
    speed; a run of degenerate pivots switches to Bland's smallest-index
    rule, which cannot cycle, until the objective moves again.
    """
    m = len(T)
    streak = 0
    while True:
        pairs = [
            (i, cost[basis[i]]) for i in range(m) if cost[basis[i]] != 0
        ]
        # reduced costs z_j = cost_j - sum_i y_i T[i][j], vectorized by row
        z = list(cost[:ncols])
        for i, yi in pairs:
            z = [zj - yi * t if t else zj for zj, t in zip(z, T[i])]
        in_basis = set(basis)
        entering = -1
        if streak >= _BLAND_TRIGGER:
            for j in range(ncols):
                if z[j] < 0 and j not in in_basis:
                    entering = j
                    break
        else:
            best = Q(0)
            for j in range(ncols):
                zj = z[j]
                if zj < best and j not in in_basis:
                    best = zj
                    entering = j
        if entering < 0:
            obj = Q(0)
            for i, yi in pairs:
                obj += yi * T[i][-1]
            return obj
        # ratio test, Bland tie-break on smallest basis index
        leave = -1
        best_ratio: Fraction | None = None
        for i in range(m):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][-1] / a
                if best_ratio is None or ratio < best_ratio or (
                    ratio == best_ratio and basis[i] < basis[leave]
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise Unbounded("objective unbounded below")
        streak = streak + 1 if best_ratio == 0 else 0
        _pivot(T, basis, leave, entering)


def solve_lp(
    A: Sequence[Sequence[Fraction | int]],
    b: Sequence[Fraction | int],
    c: Sequence[Fraction | int],
    maximize: bool = False,
) -> LpResult:
    """Solve min (or max) c.x s.t. Ax = b, x >= 0 exactly."""
    m = len(A)
    if m == 0:
        raise ValueError("no constraint rows")
    n = len(A[0])
    rows = [[Q(v) for v in row] for row in A]
    rhs = [Q(v) for v in b]
    for row in rows:
        if len(row) != n:
            raise ValueError("ragged constraint matrix")
    if len(rhs) != m:
        raise ValueError("rhs length mismatch")
    # b >= 0 for phase 1
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    # tableau with artificial columns
    ncols = n + m
    T = [rows[i] + [Q(1) if j == i else Q(0) for j in range(m)] + [rhs[i]]
         for i in range(m)]
    basis = [n + i for i in range(m)]

    cost1 = [Q(0)] * n + [Q(1)] * m
    v1 = _phase(T, basis, cost1, ncols)
    if v1 != 0:
        raise Infeasible(f"phase-1 optimum {v1} > 0")

    # pivot artificials out of the basis; drop redundant rows
    drop: list[int] = []
    for i in range(m):
        if basis[i] >= n:
            piv_col = -1
            for j in range(n):
                if T[i][j] != 0:
                    piv_col = j
                    break
            if piv_col >= 0:
                _pivot(T, basis, i, piv_col)
            else:
                drop.append(i)  # all-zero row: redundant constraint
    if drop:
        T = [row for i, row in enumerate(T) if i not in drop]
        basis = [bi for i, bi in enumerate(basis) if i not in drop]

    # strip artificial columns
    T = [row[:n] + [row[-1]] for row in T]

    sign = -1 if maximize else 1
    cost2 = [sign * Q(v) for v in c]
    if len(cost2) != n:
        raise ValueError("objective length mismatch")
    v2 = _phase(T, basis, cost2, n)

    x = [Q(0)] * n
    for i, bi in enumerate(basis):
        x[bi] = T[i][-1]
    return LpResult(value=sign * v2, x=x)
