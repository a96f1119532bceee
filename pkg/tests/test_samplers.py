"""Hyperplane processes, intersection points, limit process, zero cells."""

import math

import numpy as np
import pytest

from hypercross.constants import (
    annulus_mass,
    ball_constants,
    dual_intensity,
    limit_constant_2d,
)
from hypercross.errors import DomainError, TupleBudgetExceeded
from hypercross.hull import euler_relation_holds, f_vector
from hypercross.rng import master_rng, replication_rng
from hypercross.samplers import (
    SimConfig,
    intersection_process,
    sample_binomial_hyperplanes,
    sample_limit_process,
    sample_poisson_hyperplanes,
    sample_zero_cell,
)
from hypercross.stats import chi_square_two_sample, ks_test


class TestHyperplaneSampling:
    def test_poisson_count_matches_hit_measure(self):
        t, d = 1000.0, 2
        radius = t ** (-2 / 3)
        reps = 4000
        counts = [
            len(sample_poisson_hyperplanes(t, radius, d, replication_rng(42, i)))
            for i in range(reps)
        ]
        expect = 2 * t * radius
        assert abs(np.mean(counts) - expect) <= 3 * math.sqrt(expect / reps)

    def test_count_shrinks_with_radius(self):
        rng = master_rng(1)
        tiny = sample_poisson_hyperplanes(100.0, 1e-6, 2, rng)
        assert len(tiny) <= 2

    def test_offsets_within_radius_and_normals_unit(self):
        sample = sample_poisson_hyperplanes(500.0, 0.05, 3, master_rng(2))
        assert np.all(sample.offsets >= 0) and np.all(sample.offsets <= 0.05)
        assert np.allclose(np.linalg.norm(sample.normals, axis=1), 1.0, atol=1e-12)

    def test_planes_property_builds_canonical_objects(self):
        sample = sample_poisson_hyperplanes(200.0, 0.1, 2, master_rng(3))
        planes = sample.planes
        assert len(planes) == len(sample)
        for p in planes[:5]:
            assert p.offset >= 0

    def test_binomial_exact_count(self):
        for n in (0, 1, 17):
            sample = sample_binomial_hyperplanes(n, 0.2, 2, master_rng(4))
            assert len(sample) == n

    def test_binomial_offset_marginal_uniform(self):
        sample = sample_binomial_hyperplanes(20_000, 0.3, 2, master_rng(5))
        report = ks_test(sample.offsets, lambda s: min(max(s / 0.3, 0.0), 1.0))
        assert report.p_value > 0.01

    def test_invalid_arguments(self):
        rng = master_rng(0)
        with pytest.raises(DomainError):
            sample_poisson_hyperplanes(-1.0, 0.1, 2, rng)
        with pytest.raises(DomainError):
            sample_binomial_hyperplanes(-2, 0.1, 2, rng)


class TestIntersectionProcess:
    def test_three_lines_three_points(self):
        sample = sample_poisson_hyperplanes(1.0, 1.0, 2, master_rng(6))
        sample.normals = np.array([[1.0, 0.0], [0.0, 1.0], [math.sqrt(0.5), math.sqrt(0.5)]])
        sample.offsets = np.array([0.5, 0.25, 0.4])
        pts = intersection_process(sample)
        assert len(pts) == 3 and sample.skipped_tuples == 0

    def test_five_planes_ten_points(self):
        sample = sample_poisson_hyperplanes(1.0, 1.0, 3, master_rng(7))
        rng = master_rng(8)
        g = rng.standard_normal((5, 3))
        sample.normals = g / np.linalg.norm(g, axis=1, keepdims=True)
        sample.offsets = rng.uniform(0, 1, 5)
        pts = intersection_process(sample)
        assert len(pts) == 10 and sample.skipped_tuples == 0

    def test_tuple_accounting_with_degenerate_pairs(self):
        sample = sample_poisson_hyperplanes(1.0, 1.0, 2, master_rng(9))
        sample.normals = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        sample.offsets = np.array([0.2, 0.4, 0.1])
        pts = intersection_process(sample)
        assert sample.skipped_tuples == 1
        assert len(pts) + sample.skipped_tuples == math.comb(3, 2)

    def test_budget_cap(self):
        sample = sample_poisson_hyperplanes(5e4, 5e4 ** (-2 / 3), 2, master_rng(10))
        with pytest.raises(TupleBudgetExceeded):
            intersection_process(sample, cap=10)

    def test_point_count_scaling_moment(self):
        # expected points = (2tR)^2/2 by the factorial moment of the count
        t, reps = 3000.0, 300
        radius = t ** (-2 / 3)
        total = 0
        for i in range(reps):
            sample = sample_poisson_hyperplanes(t, radius, 2, replication_rng(77, i))
            total += len(intersection_process(sample))
        expect = (2 * t * radius) ** 2 / 2
        assert abs(total / reps - expect) / expect < 0.1

    def test_scale_equivariance(self):
        t, radius, alpha = 2e4, 2e4 ** (-2 / 3), 2.5
        base = sample_poisson_hyperplanes(t, radius, 2, replication_rng(11, 0))
        scaled = sample_poisson_hyperplanes(t, radius, 2, replication_rng(11, 0))
        scaled.offsets = scaled.offsets * alpha
        scaled.radius = radius * alpha
        p1 = intersection_process(base)
        p2 = intersection_process(scaled)
        assert len(p1) == len(p2)
        err = np.max(np.abs(p2.points - alpha * p1.points))
        assert err <= 1e-9 * (1 + alpha * np.max(np.abs(p1.points)))

    def test_empty_and_single_plane(self):
        sample = sample_poisson_hyperplanes(1.0, 1e-9, 2, master_rng(12))
        sample.normals = np.empty((0, 2))
        sample.offsets = np.empty(0)
        assert len(intersection_process(sample)) == 0


class TestLimitProcess:
    def test_count_mean(self):
        c = limit_constant_2d()
        r_min, reps = 0.1, 3000
        counts = [
            len(sample_limit_process(2, c, r_min, replication_rng(13, i)))
            for i in range(reps)
        ]
        expect = c * ball_constants(2)[1] / r_min
        assert expect == pytest.approx(8.488, abs=0.005)
        assert abs(np.mean(counts) - expect) <= 3 * math.sqrt(expect / reps)

    def test_radial_survival_is_exact_power_law(self):
        c = limit_constant_2d()
        draws = []
        i = 0
        while len(draws) < 20_000:
            draws.extend(sample_limit_process(2, c, 0.1, replication_rng(14, i)).norms())
            i += 1
        draws = np.array(draws[:20_000])
        report = ks_test(draws, lambda r: 1.0 - 0.1 / r)
        assert report.p_value > 0.01

    def test_direction_marginal_uniform(self):
        c = limit_constant_2d()
        rng = master_rng(15)
        angles = []
        while len(angles) < 20_000:
            pts = sample_limit_process(2, c, 0.05, rng).points
            angles.extend(np.arctan2(pts[:, 1], pts[:, 0]))
        angles = np.array(angles[:20_000])
        sectors, _ = np.histogram(angles, bins=np.linspace(-math.pi, math.pi, 17))
        uniform = np.full(16, sectors.sum() / 16.0)
        # one-sample chi-square against the uniform sector law
        stat = float(((sectors - uniform) ** 2 / uniform).sum())
        from hypercross.stats import chi_square_sf

        assert chi_square_sf(stat, 15) > 0.01

    def test_restriction_property(self):
        # restricting a sample at r_min to norms >= r' has the law of a
        # direct sample at r'
        c = limit_constant_2d()
        inner, direct = [], []
        for i in range(400):
            s = sample_limit_process(2, c, 0.05, replication_rng(16, i))
            inner.extend(s.norms()[s.norms() >= 0.2])
            direct.extend(sample_limit_process(2, c, 0.2, replication_rng(17, i)).norms())
        report = ks_test(np.array(inner), np.array(direct))
        assert report.p_value > 0.01

    def test_annulus_count_matches_mass(self):
        c = limit_constant_2d()
        reps = 2000
        counts = []
        for i in range(reps):
            s = sample_limit_process(2, c, 0.2, replication_rng(18, i))
            counts.append(int(np.count_nonzero(s.norms() <= 0.8)))
        mass = annulus_mass(2, c, 0.2, 0.8)
        stderr = np.std(counts, ddof=1) / math.sqrt(reps)
        assert abs(np.mean(counts) - mass) <= 3 * stderr


class TestZeroCell:
    def test_contains_origin_strictly_and_satisfies_constraints(self):
        gamma = dual_intensity(2, limit_constant_2d())
        for i in range(20):
            cell = sample_zero_cell(2, gamma, replication_rng(19, i))
            assert cell.contains([[0.0, 0.0]])
            assert float(cell.facet_offsets.min()) > 0
            slack = cell.facet_normals @ cell.vertices.T - cell.facet_offsets[:, None]
            assert float(slack.max()) <= 1e-9 * (1 + np.abs(cell.vertices).max())

    def test_planar_mean_vertex_count(self):
        gamma = dual_intensity(2, limit_constant_2d())
        reps = 3000
        f0 = [
            f_vector(sample_zero_cell(2, gamma, replication_rng(20, i)))[0]
            for i in range(reps)
        ]
        target = math.pi**2 / 2
        stderr = np.std(f0, ddof=1) / math.sqrt(reps)
        assert abs(np.mean(f0) - target) <= max(3 * stderr, 0.02 * target)

    def test_f0_distribution_scale_invariant_in_gamma(self):
        f_small = [
            f_vector(sample_zero_cell(2, 0.2, replication_rng(21, i)))[0]
            for i in range(1200)
        ]
        f_large = [
            f_vector(sample_zero_cell(2, 2.0, replication_rng(22, i)))[0]
            for i in range(1200)
        ]
        lo = min(min(f_small), min(f_large))
        hi = max(max(f_small), max(f_large))
        bins = np.arange(lo, hi + 2)
        h1, _ = np.histogram(f_small, bins=bins)
        h2, _ = np.histogram(f_large, bins=bins)
        assert chi_square_two_sample(h1, h2).p_value > 0.01

    def test_three_dimensional_cells_satisfy_euler(self):
        gamma = dual_intensity(3, 0.0931399757)
        for i in range(25):
            cell = sample_zero_cell(3, gamma, replication_rng(23, i))
            assert euler_relation_holds(cell.f_vector(), 3)
            assert cell.contains([[0.0, 0.0, 0.0]])

    def test_invalid_gamma(self):
        with pytest.raises(DomainError):
            sample_zero_cell(2, 0.0, master_rng(0))


class TestSimConfig:
    def test_default_radius_exponent(self):
        config = SimConfig(dim=3, intensity=1e4)
        assert config.exponent == pytest.approx(0.75)
        assert config.radius == pytest.approx(1e4 ** (-0.75))

    def test_override_exponent(self):
        config = SimConfig(dim=2, intensity=100.0, radius_exponent=0.5)
        assert config.radius == pytest.approx(0.1)

    def test_validation(self):
        with pytest.raises(DomainError):
            SimConfig(dim=1)
        with pytest.raises(DomainError):
            SimConfig(intensity=-5)
        with pytest.raises(DomainError):
            SimConfig(reps=0)


def test_determinism_across_restarts():
    t, radius = 1e4, 1e4 ** (-2 / 3)
    a = sample_poisson_hyperplanes(t, radius, 2, replication_rng(99, 3))
    b = sample_poisson_hyperplanes(t, radius, 2, replication_rng(99, 3))
    assert np.array_equal(a.normals, b.normals)
    assert np.array_equal(a.offsets, b.offsets)
    pa = intersection_process(a)
    pb = intersection_process(b)
    assert np.array_equal(pa.points, pb.points)
