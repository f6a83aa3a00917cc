"""Vertex enumeration by the double description method."""

from fractions import Fraction as Q
from itertools import combinations

import pytest

from medbounds.dd import enumerate_vertices
from medbounds.errors import ResourceExhausted


def box(dim):
    """0 <= y_i <= 1 in H-representation (a . y >= b)."""
    ineqs = []
    for i in range(dim):
        lo = [0] * dim
        lo[i] = 1
        ineqs.append((lo, 0))
        hi = [0] * dim
        hi[i] = -1
        ineqs.append((hi, -1))
    return ineqs


def test_unit_square():
    enum = enumerate_vertices(box(2), 2)
    assert enum.rays == []
    assert enum.vertices == [
        (Q(0), Q(0)), (Q(0), Q(1)), (Q(1), Q(0)), (Q(1), Q(1))
    ]


def test_cube_and_cross_sections():
    enum = enumerate_vertices(box(3), 3)
    assert len(enum.vertices) == 8
    # slicing the cube with y0 + y1 + y2 >= 3/2 keeps a hexagonal face
    sliced = enumerate_vertices(box(3) + [([1, 1, 1], Q(3, 2))], 3)
    assert all(sum(v) >= Q(3, 2) for v in sliced.vertices)
    on_plane = [v for v in sliced.vertices if sum(v) == Q(3, 2)]
    assert len(on_plane) == 6


def test_simplex_vertices():
    # y >= 0, sum y <= 1 in R^4: vertices are the origin and unit vectors
    dim = 4
    ineqs = [([1 if j == i else 0 for j in range(dim)], 0) for i in range(dim)]
    ineqs.append(([-1] * dim, -1))
    enum = enumerate_vertices(ineqs, dim)
    assert len(enum.vertices) == dim + 1
    assert tuple([Q(0)] * dim) in enum.vertices


def test_recession_rays_reported():
    # quadrant with one cut: unbounded, two extreme rays
    ineqs = [([1, 0], 0), ([0, 1], 0), ([1, 1], 1)]
    enum = enumerate_vertices(ineqs, 2)
    assert enum.vertices == [(Q(0), Q(1)), (Q(1), Q(0))]
    assert sorted(enum.rays) == [(Q(0), Q(1)), (Q(1), Q(0))]


def test_degenerate_vertex_handled():
    # four facets of a square pyramid meet at the apex (degenerate vertex)
    ineqs = [
        ([0, 0, 1], 0),        # z >= 0
        ([-1, 0, -1], -1),     # x + z <= 1
        ([1, 0, -1], -1),      # -x + z <= 1 . . . i.e. z <= 1 + x
        ([0, -1, -1], -1),
        ([0, 1, -1], -1),
    ]
    enum = enumerate_vertices(ineqs, 3)
    assert (Q(0), Q(0), Q(1)) in enum.vertices  # apex, 4 tight facets
    base = [v for v in enum.vertices if v[2] == 0]
    assert len(base) == 4


def test_lineality_space_rejected():
    with pytest.raises(ValueError):
        enumerate_vertices([([1, 0], 0)], 2)  # free y1 direction


def test_budget_exhaustion_carries_progress():
    with pytest.raises(ResourceExhausted) as info:
        enumerate_vertices(box(6), 6, budget=10)
    progress = info.value.progress
    assert progress["budget"] == 10
    assert progress["generators"] > 10
    assert progress["constraints_processed"] <= progress["constraints_total"]


def test_matches_brute_force_on_random_polytopes():
    import random

    rng = random.Random(11)
    dim = 3
    for trial in range(15):
        ineqs = box(dim)
        for _ in range(3):
            a = [rng.randint(-2, 2) for _ in range(dim)]
            if all(v == 0 for v in a):
                continue
            b = Q(rng.randint(-2, 1), 2)
            ineqs.append((a, b))
        enum = enumerate_vertices(ineqs, dim)
        brute = set()
        for rows in combinations(range(len(ineqs)), dim):
            M = [[Q(v) for v in ineqs[r][0]] for r in rows]
            rhs = [Q(ineqs[r][1]) for r in rows]
            sol = _solve(M, rhs)
            if sol is None:
                continue
            if all(
                sum(Q(ai) * y for ai, y in zip(a, sol)) >= Q(b)
                for a, b in ineqs
            ):
                brute.add(tuple(sol))
        assert set(enum.vertices) == brute


def _solve(M, rhs):
    k = len(M)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(M)]
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * p for v, p in zip(aug[r], aug[col])]
    return [aug[i][k] for i in range(k)]
