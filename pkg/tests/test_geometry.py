"""Geometric primitives: intersections, determinants, rotations."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypercross.errors import NearSingular
from hypercross.geometry import (
    Hyperplane,
    batched_abs_det,
    canonical_hyperplane,
    haar_rotations,
    intersect_hyperplanes,
    is_rotation,
    random_rotation,
    subspace_determinant,
)
from hypercross.rng import master_rng
from hypercross.stats import ks_test


def _plane(n, s):
    return canonical_hyperplane(np.asarray(n, dtype=float), s)


class TestIntersect:
    def test_axis_aligned_lines(self):
        pt = intersect_hyperplanes([_plane([1, 0], 1.0), _plane([0, 1], 2.0)])
        assert np.allclose(pt, [1.0, 2.0])

    def test_coordinate_planes_through_origin(self):
        planes = [
            _plane([1, 0, 0], 0.0),
            _plane([0, 1, 0], 0.0),
            _plane([0, 0, 1], 0.0),
        ]
        assert np.allclose(intersect_hyperplanes(planes), [0.0, 0.0, 0.0])

    def test_hand_solved_oblique_pair(self):
        # x = 1 and (x + y)/sqrt(2) = sqrt(2); substituting x = 1 gives y = 1
        s = 1 / math.sqrt(2)
        pt = intersect_hyperplanes([_plane([1, 0], 1.0), _plane([s, s], math.sqrt(2))])
        assert np.allclose(pt, [1.0, 1.0], atol=1e-12)

    def test_near_parallel_raises(self):
        with pytest.raises(NearSingular):
            intersect_hyperplanes(
                [_plane([1, 0], 1.0), _plane([1, 1e-14], 2.0)], tol=1e-12
            )

    def test_wrong_count_raises(self):
        with pytest.raises(ValueError):
            intersect_hyperplanes([_plane([1, 0], 1.0)])

    @given(st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_residual_bound_on_random_planes(self, seed):
        rng = master_rng(seed)
        d = int(rng.integers(2, 5))
        normals = rng.standard_normal((d, d))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        offsets = rng.uniform(0, 3, d)
        try:
            x = intersect_hyperplanes((normals, offsets))
        except NearSingular:
            return
        resid = np.max(np.abs(normals @ x - offsets))
        assert resid <= 1e-12 * (1 + np.linalg.norm(x))


class TestSubspaceDeterminant:
    def test_orthonormal_pair(self):
        assert subspace_determinant([[1, 0], [0, 1]]) == pytest.approx(1.0)

    @pytest.mark.parametrize("theta", [0.1, 0.5, 1.2, 2.8])
    def test_two_dim_parallelogram_area(self, theta):
        v = [[1, 0], [math.cos(theta), math.sin(theta)]]
        assert subspace_determinant(v) == pytest.approx(abs(math.sin(theta)), abs=1e-12)

    def test_degenerate_repeated_vector(self):
        assert subspace_determinant([[1, 0, 0]] * 3) == 0.0

    @given(st.integers(0, 10_000))
    @settings(max_examples=100, deadline=None)
    def test_permutation_and_sign_invariance(self, seed):
        rng = master_rng(seed)
        ell = int(rng.integers(1, 4))
        d = int(rng.integers(ell, 5))
        v = rng.standard_normal((ell, d))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        base = subspace_determinant(v)
        perm = rng.permutation(ell)
        signs = rng.choice([-1.0, 1.0], size=ell)
        assert subspace_determinant(v[perm] * signs[:, None]) == pytest.approx(
            base, abs=1e-12
        )

    def test_matches_absolute_determinant_when_square(self):
        rng = master_rng(99)
        for _ in range(1000):
            d = int(rng.integers(2, 5))
            v = rng.standard_normal((d, d))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            assert subspace_determinant(v) == pytest.approx(
                abs(np.linalg.det(v)), abs=1e-10
            )


class TestRotations:
    @pytest.mark.parametrize("d", [2, 3, 4, 6])
    def test_orthogonal_and_special(self, d, rng):
        m = random_rotation(d, rng)
        assert np.max(np.abs(m.T @ m - np.eye(d))) < 1e-10
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-10)
        assert is_rotation(m)

    def test_sphere_image_is_centred(self):
        # CLT bound: each coordinate of the mean of 1e5 uniform sphere points
        # has sd ~ d^-1/2 / sqrt(n); 0.02 is a > 3 sigma envelope on the norm
        n, d = 100_000, 3
        rots = haar_rotations(d, n, master_rng(31))
        images = rots[:, :, 0]
        assert np.linalg.norm(images.mean(axis=0)) < 0.02

    def test_planar_rotation_angle_uniform(self):
        n = 100_000
        rots = haar_rotations(2, n, master_rng(32))
        angles = np.arctan2(rots[:, 1, 0], rots[:, 0, 0])
        report = ks_test(angles, lambda a: (a + math.pi) / (2 * math.pi))
        assert report.p_value > 0.01


class TestCanonicalForm:
    def test_negative_offset_flips(self):
        h = canonical_hyperplane([0.0, -2.0], -3.0)
        assert h.offset == pytest.approx(1.5)
        assert np.allclose(h.normal, [0.0, 1.0])

    def test_zero_offset_prefers_positive_leading_coordinate(self):
        h = canonical_hyperplane([-1.0, 0.0], 0.0)
        assert np.allclose(h.normal, [1.0, 0.0])

    def test_rejects_non_unit_direct_construction(self):
        with pytest.raises(ValueError):
            Hyperplane(np.array([1.0, 1.0]), 1.0)
        with pytest.raises(ValueError):
            Hyperplane(np.array([1.0, 0.0]), -0.5)

    def test_key_dedupes_equivalent_planes(self):
        a = canonical_hyperplane([3.0, 0.0], 6.0)
        b = canonical_hyperplane([-1.0, 0.0], -2.0)
        assert a.key() == b.key()


def test_batched_abs_det_matches_lapack():
    rng = master_rng(5)
    for m in (1, 2, 3, 4):
        a = rng.standard_normal((200, m, m))
        assert np.allclose(batched_abs_det(a), np.abs(np.linalg.det(a)), atol=1e-12)
