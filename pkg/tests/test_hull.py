"""Convex hulls, face lattices, polar duality, Hausdorff approximation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull as QhullHull

from hypercross.errors import Degenerate, OriginNotInterior
from hypercross.hull import (
    approx_hausdorff,
    convex_hull,
    euler_relation_holds,
    f_vector,
    origin_in_hull_interior,
    polar_dual,
    polygon_area,
)
from hypercross.rng import master_rng

CUBE = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], float)


def _vertex_set(arr, decimals=9):
    return set(map(tuple, np.round(arr, decimals).tolist()))


class TestPlanarHull:
    def test_square_with_interior_point(self):
        pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]], float)
        poly = convex_hull(pts)
        assert poly.f_vector() == (4, 4)
        assert (0.5, 0.5) not in _vertex_set(poly.vertices)

    def test_polygon_has_equal_vertex_and_edge_counts(self):
        pts = master_rng(1).standard_normal((40, 2))
        fv = convex_hull(pts).f_vector()
        assert fv[0] == fv[1]

    def test_uniform_disk_points_area_and_containment(self):
        rng = master_rng(2)
        raw = rng.standard_normal((1000, 2))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        pts = raw * np.sqrt(rng.random(1000))[:, None]
        poly = convex_hull(pts)
        assert polygon_area(poly) <= math.pi
        assert poly.contains(pts)

    def test_collinear_raises_degenerate(self):
        pts = np.stack([np.linspace(0, 1, 8), np.linspace(0, 2, 8)], axis=1)
        with pytest.raises(Degenerate):
            convex_hull(pts)

    def test_wide_dynamic_range_keeps_inner_vertices(self):
        # a far-away point must not blur the near-origin cluster
        rng = master_rng(3)
        inner = rng.standard_normal((50, 2)) * 0.01
        pts = np.vstack([inner, [[500.0, 0.001]]])
        poly = convex_hull(pts)
        assert poly.contains(pts)
        assert poly.f_vector()[0] >= 5


class TestSolidHulls:
    def test_simplex_f_vector(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], float)
        assert convex_hull(pts).f_vector() == (4, 6, 4)

    def test_cube_f_vector(self):
        assert convex_hull(CUBE).f_vector() == (8, 12, 6)

    def test_cube_with_face_centres_excluded(self):
        centres = np.array(
            [[s * 1.0 if a == ax else 0.0 for a in range(3)] for ax in range(3) for s in (-1, 1)]
        )
        poly = convex_hull(np.vstack([CUBE, centres]))
        assert poly.f_vector() == (8, 12, 6)

    @pytest.mark.parametrize("d,n", [(3, 60), (4, 40)])
    def test_random_hull_euler_and_containment(self, d, n):
        pts = master_rng(d * n).standard_normal((n, d))
        poly = convex_hull(pts)
        assert euler_relation_holds(poly.f_vector(), d)
        assert poly.contains(pts)
        fv = poly.f_vector()
        assert fv[0] >= d + 1 and fv[-1] >= d + 1

    def test_hull_idempotence(self):
        pts = master_rng(8).standard_normal((80, 3))
        poly = convex_hull(pts)
        again = convex_hull(poly.vertices)
        assert _vertex_set(poly.vertices) == _vertex_set(again.vertices)

    def test_coplanar_input_raises_degenerate(self):
        flat = master_rng(4).standard_normal((30, 2))
        pts = np.column_stack([flat, flat @ [0.3, -0.7]])
        with pytest.raises(Degenerate):
            convex_hull(pts)

    @given(st.integers(0, 3000))
    @settings(max_examples=40, deadline=None)
    def test_matches_qhull_vertices(self, seed):
        rng = master_rng(seed)
        d = int(rng.integers(3, 5))
        n = int(rng.integers(d + 2, 90))
        pts = rng.standard_normal((n, d)) * np.exp(rng.uniform(-1, 1))
        poly = convex_hull(pts)
        assert _vertex_set(poly.vertices) == _vertex_set(pts[QhullHull(pts).vertices])
        assert euler_relation_holds(poly.f_vector(), d)

    def test_qhull_f_vector_agreement_3d(self):
        for seed in range(10):
            pts = master_rng(seed + 500).standard_normal((45, 3))
            poly = convex_hull(pts)
            q = QhullHull(pts)
            assert poly.f_vector()[0] == len(q.vertices)
            assert poly.f_vector()[2] == len(q.simplices)


class TestPolarDual:
    def test_cube_octahedron_pair(self):
        cube = convex_hull(CUBE)
        octa = polar_dual(cube)
        assert octa.f_vector() == (6, 12, 8)
        assert _vertex_set(octa.vertices, 7) == _vertex_set(
            np.vstack([np.eye(3), -np.eye(3)]), 7
        )

    def test_inscribed_polygon_dual_is_circumscribed(self):
        n = 12
        ang = 2 * math.pi * np.arange(n) / n
        poly = convex_hull(np.stack([np.cos(ang), np.sin(ang)], axis=1))
        dual = polar_dual(poly)
        assert dual.f_vector() == poly.f_vector()
        # circumscribed polygon touches the unit circle from outside
        assert np.linalg.norm(dual.vertices, axis=1).min() >= 1.0 - 1e-12
        assert np.allclose(dual.facet_offsets, 1.0)

    def test_double_dual_recovers_vertices(self):
        for seed in (1, 2, 3):
            pts = master_rng(seed).standard_normal((40, 3))
            poly = convex_hull(pts)
            shift = poly.vertices.mean(axis=0)
            poly = convex_hull(poly.vertices - shift)  # origin now interior
            back = polar_dual(polar_dual(poly))
            assert _vertex_set(back.vertices, 7) == _vertex_set(poly.vertices, 7)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_dual_reverses_f_vector(self, d):
        for seed in range(4):
            pts = master_rng(100 * d + seed).standard_normal((12 * d, d))
            poly = convex_hull(pts)
            poly = convex_hull(poly.vertices - poly.vertices.mean(axis=0))
            assert f_vector(polar_dual(poly)) == poly.f_vector()[::-1]

    def test_origin_not_interior_raises(self):
        pts = master_rng(6).standard_normal((20, 3)) + 10.0
        with pytest.raises(OriginNotInterior):
            polar_dual(convex_hull(pts))


class TestHausdorff:
    def test_identical_polytopes(self):
        poly = convex_hull(master_rng(7).standard_normal((30, 3)))
        assert approx_hausdorff(poly, poly) == 0.0

    def test_translated_cube(self):
        delta = 0.25
        a = convex_hull(CUBE)
        b = convex_hull(CUBE + np.array([delta, 0, 0]))
        dist = approx_hausdorff(a, b, ndirs=2048)
        assert dist == pytest.approx(delta, abs=0.01)

    def test_inscribed_square_versus_disk(self):
        # square with vertices on the unit circle vs a 256-gon approximation
        # of the disk: support gap maximised at the edge normals, 1 - sqrt(2)/2
        ang = math.pi / 4 + math.pi / 2 * np.arange(4)
        square = convex_hull(np.stack([np.cos(ang), np.sin(ang)], axis=1))
        ang2 = 2 * math.pi * np.arange(256) / 256
        disk = convex_hull(np.stack([np.cos(ang2), np.sin(ang2)], axis=1))
        dist = approx_hausdorff(square, disk, ndirs=4096)
        assert dist <= 1 - math.sqrt(2) / 2 + 0.01
        assert dist == pytest.approx(1 - math.sqrt(2) / 2, abs=0.01)


class TestSpanCheck:
    def test_spanning_normals(self):
        dirs = master_rng(9).standard_normal((20, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        assert origin_in_hull_interior(dirs)

    def test_halfspace_confined_normals(self):
        dirs = master_rng(10).standard_normal((20, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        dirs[:, 2] = np.abs(dirs[:, 2])  # all in the upper halfspace
        assert not origin_in_hull_interior(dirs)


@given(st.integers(0, 5000))
@settings(max_examples=40, deadline=None)
def test_hull_properties_random_clouds(seed):
    rng = master_rng(seed)
    d = int(rng.integers(2, 5))
    n = int(rng.integers(d + 2, 50))
    pts = rng.standard_normal((n, d))
    try:
        poly = convex_hull(pts)
    except Degenerate:
        return
    assert poly.contains(pts)
    assert euler_relation_holds(poly.f_vector(), d)
    # every vertex lies on at least d facets
    slack = np.abs(poly.facet_normals @ poly.vertices.T - poly.facet_offsets[:, None])
    on_facet = slack <= 1e-8 * (1 + np.linalg.norm(poly.vertices, axis=1))[None, :]
    assert int(on_facet.sum(axis=0).min()) >= d
