"""Vertex enumeration for pointed polyhedra by the double description method.

Input is an H-representation {y in R^d : a_i . y >= b_i}.  The polyhedron is
homogenized to the cone {(t, y) : a_i . y - b_i t >= 0, t >= 0} in R^(d+1);
extreme rays are built incrementally, one inequality at a time, starting from
a simplicial subcone spanned by d+1 linearly independent constraints.  Rays
with t > 0 dehomogenize to vertices, rays with t = 0 are recession
directions.  All arithmetic is exact; rays are kept as primitive integer
vectors so equality tests are trivial.

Adjacency of rays is decided combinatorially (no third ray's tight set
contains the intersection of the pair's tight sets), which is valid because
the cone is pointed and every stored ray is extreme.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import ResourceExhausted

Q = Fraction


def _primitive(vec: list[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector by a positive factor to primitive integers."""
    denom_lcm = 1
    for v in vec:
        d = v.denominator
        denom_lcm = denom_lcm // gcd(denom_lcm, d) * d
    ints = [int(v * denom_lcm) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def _solve_unit_columns(M: list[list[Fraction]]) -> list[list[Fraction]]:
    """Invert a square rational matrix by Gauss-Jordan; columns of inverse."""
    k = len(M)
    aug = [list(row) + [Q(1) if j == i else Q(0) for j in range(k)]
           for i, row in enumerate(M)]
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * p for v, p in zip(aug[r], aug[col])]
    return [[aug[i][k + j] for i in range(k)] for j in range(k)]


@dataclass
class VertexEnumeration:
    vertices: list[tuple[Fraction, ...]]
    rays: list[tuple[Fraction, ...]]  # recession directions, primitive
    ray_peak: int  # largest intermediate generator count


def enumerate_vertices(
    ineqs: Sequence[tuple[Sequence[Fraction | int], Fraction | int]],
    dim: int,
    budget: int | None = None,
) -> VertexEnumeration:
    """All vertices of {y : a . y >= b for (a, b) in ineqs}.

    ``budget`` caps the number of generators held at any point; exceeding it
    raises :class:`ResourceExhausted` with progress information.
    """
    # homogenized rows: (-b, a) . (t, y) >= 0, plus t >= 0 first.
    rows: list[tuple[int, ...]] = [
        _primitive([Q(1)] + [Q(0)] * dim)
    ]
    for a, b in ineqs:
        if len(a) != dim:
            raise ValueError("inequality dimension mismatch")
        rows.append(_primitive([-Q(b)] + [Q(v) for v in a]))

    hdim = dim + 1
    # greedy selection of hdim independent rows for the initial simplicial cone
    chosen: list[int] = []
    basis_rows: list[list[Fraction]] = []
    echelon: list[list[Fraction]] = []
    for idx, row in enumerate(rows):
        vec = [Q(v) for v in row]
        red = list(vec)
        for e in echelon:
            lead = next(i for i, v in enumerate(e) if v != 0)
            if red[lead] != 0:
                f = red[lead] / e[lead]
                red = [r - f * w for r, w in zip(red, e)]
        if any(v != 0 for v in red):
            echelon.append(red)
            chosen.append(idx)
            basis_rows.append(vec)
            if len(chosen) == hdim:
                break
    if len(chosen) < hdim:
        raise ValueError(
            "polyhedron has a lineality space; vertex enumeration undefined"
        )

    # initial rays: columns of the inverse of the chosen constraint matrix
    inv_cols = _solve_unit_columns(basis_rows)
    gens: list[tuple[int, ...]] = [_primitive(col) for col in inv_cols]

    nrows = len(rows)
    order = chosen + [i for i in range(nrows) if i not in set(chosen)]
    processed: list[int] = []

    def dot(row: tuple[int, ...], g: tuple[int, ...]) -> int:
        return sum(r * v for r, v in zip(row, g))

    def tight_mask(g: tuple[int, ...]) -> int:
        mask = 0
        for k, ridx in enumerate(processed):
            if dot(rows[ridx], g) == 0:
                mask |= 1 << k
        return mask

    peak = len(gens)
    for step, ridx in enumerate(order):
        row = rows[ridx]
        if step < hdim:
            processed.append(ridx)
            continue
        vals = [dot(row, g) for g in gens]
        minus_idx = [i for i, v in enumerate(vals) if v < 0]
        if minus_idx:
            plus_idx = [i for i, v in enumerate(vals) if v > 0]
            keep = [gens[i] for i, v in enumerate(vals) if v >= 0]
            if plus_idx:
                masks = [tight_mask(g) for g in gens]
                seen = set(keep)
                for ip in plus_idx:
                    for im in minus_idx:
                        common = masks[ip] & masks[im]
                        adjacent = True
                        for k, m3 in enumerate(masks):
                            if k == ip or k == im:
                                continue
                            if common & ~m3 == 0:
                                adjacent = False
                                break
                        if not adjacent:
                            continue
                        vp, vm = vals[ip], vals[im]
                        w = [
                            Q(vp) * Q(x) - Q(vm) * Q(y)
                            for x, y in zip(gens[im], gens[ip])
                        ]
                        cand = _primitive(w)
                        if cand not in seen:
                            seen.add(cand)
                            keep.append(cand)
            gens = keep
        processed.append(ridx)
        peak = max(peak, len(gens))
        if budget is not None and len(gens) > budget:
            raise ResourceExhausted(
                f"generator count {len(gens)} exceeded budget {budget}",
                progress={
                    "constraints_processed": len(processed),
                    "constraints_total": nrows,
                    "generators": len(gens),
                    "budget": budget,
                },
            )

    vertices: list[tuple[Fraction, ...]] = []
    recession: list[tuple[Fraction, ...]] = []
    for g in gens:
        t = g[0]
        if t > 0:
            vertices.append(tuple(Q(v, t) for v in g[1:]))
        elif t == 0:
            recession.append(tuple(Q(v) for v in g[1:]))
        # t < 0 cannot satisfy the t >= 0 constraint
    vertices.sort()
    recession.sort()
    return VertexEnumeration(vertices=vertices, rays=recession, ray_peak=peak)
