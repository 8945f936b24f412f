import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arealstats import (
    RadiusGrid,
    Region,
    build_grid,
    k_hat,
    k_test,
    mc_envelope,
    radius_grid,
    sample_csr,
)
from arealstats.errors import (
    ContractViolationError,
    DomainError,
    InvalidRadiusGridError,
    SamplingInefficiencyError,
)
from arealstats.geometry import Polygon
from arealstats.ripley import decide_k, order_statistic_quantile


class TestRadiusGrid:
    def test_grid20(self, grid20):
        assert radius_grid(grid20).radii == (2.0, 2.75, 3.5, 4.25, 5.0)

    @pytest.mark.parametrize("c", [0.5, 3.0, 1000.0])
    def test_scale_covariant(self, c):
        base = radius_grid(build_grid(20, 20, 1)).as_array()
        np.testing.assert_allclose(radius_grid(build_grid(20, 20, c)).as_array(), base * c, rtol=1e-12)

    def test_degenerate_ordering(self):
        with pytest.raises(InvalidRadiusGridError):
            radius_grid(build_grid(1, 2, 1))

    def test_irregular(self, irregular):
        from arealstats import min_pairwise_distance

        g = radius_grid(irregular)
        assert g.radii[0] == pytest.approx(2 * min_pairwise_distance(irregular.centroids()))
        assert g.radii[-1] == pytest.approx(irregular.region.bbox.width / 4)


class TestKHat:
    def test_two_close_points(self, unit_square):
        est = k_hat([(0.45, 0.5), (0.55, 0.5)], unit_square, [0.2])
        # |A|/N^2 * (two ordered pairs, w = 1) = 1/4 * 2
        assert est.khat[0] == pytest.approx(0.5, abs=1e-15)
        assert est.lhat[0] == pytest.approx(math.sqrt(0.5 / math.pi))
        assert est.lambda_hat == 2.0

    def test_below_min_distance_is_zero(self, unit_square):
        rng = np.random.default_rng(1)
        pts = rng.uniform(0, 1, (30, 2))
        dmin = min(math.dist(a, b) for k, a in enumerate(pts) for b in pts[k + 1 :])
        assert k_hat(pts, unit_square, [dmin * 0.999]).khat[0] == 0.0
        # strict inequality: a pair at exactly t is excluded
        assert k_hat([(0.2, 0.5), (0.5, 0.5)], unit_square, [0.3]).khat[0] == 0.0

    def test_duplicate_raises_pair_sum(self, unit_square):
        rng = np.random.default_rng(2)
        pts = rng.uniform(0.1, 0.9, (25, 2))
        radii = [0.05, 0.1, 0.2]
        before = k_hat(pts, unit_square, radii)
        after = k_hat(np.vstack([pts, pts[:1]]), unit_square, radii)
        sum_before = before.khat * before.n**2 / before.area
        sum_after = after.khat * after.n**2 / after.area
        assert np.all(sum_after >= sum_before + 2 - 1e-9)

    def test_duplicate_of_isolated_point_can_lower_khat(self):
        # a tight cluster plus one isolated point: duplicating the isolated point
        # adds 2 ordered pairs but N grows, so |A|/N^2 * sum drops
        region = Region.from_rect((0, 0, 10, 10))
        cluster = 5 + 0.01 * np.arange(10).reshape(-1, 1) * np.array([[1.0, 0.0]])
        pts = np.vstack([cluster, [(1.0, 1.0)]])
        a = k_hat(pts, region, [0.5]).khat[0]
        b = k_hat(np.vstack([pts, [(1.0, 1.0)]]), region, [0.5]).khat[0]
        assert b < a

    def test_point_outside(self, unit_square):
        with pytest.raises(DomainError):
            k_hat([(0.5, 0.5), (1.5, 0.5)], unit_square, [0.1])

    def test_polygon_region(self, irregular):
        pts = sample_csr(40, irregular.region, 3)
        radii = radius_grid(irregular)
        est = k_hat(pts, irregular.region, radii)
        assert np.all(np.diff(est.khat) >= 0) and np.all(est.khat >= 0)

    @given(st.integers(0, 10_000))
    def test_pair_count_oracle_all_interior(self, seed):
        rng = np.random.default_rng(seed)
        region = Region.from_rect((0, 0, 10, 10))
        pts = rng.uniform(4, 6, (20, 2))
        radii = [0.3, 0.8, 1.5, 2.0]  # every circle stays inside [0, 10]^2
        d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
        np.fill_diagonal(d, np.inf)
        expected = [region.area / 20**2 * int((d < t).sum()) for t in radii]
        assert k_hat(pts, region, radii).khat.tolist() == expected

    @given(st.integers(0, 10_000), st.sampled_from([0, 1, 2, 3]), st.floats(-50, 50), st.floats(-50, 50))
    def test_relabel_and_rigid_motion(self, seed, quarter_turns, dx, dy):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0, [4, 3], (25, 2))
        region = Region.from_rect((0, 0, 4, 3))
        radii = [0.3, 0.7, 1.0]
        base = k_hat(pts, region, radii).khat
        perm = rng.permutation(25)
        np.testing.assert_allclose(k_hat(pts[perm], region, radii).khat, base, rtol=1e-12)
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        p2, corners = pts.copy(), np.array([(0, 0), (4, 0), (4, 3), (0, 3)], dtype=float)
        for _ in range(quarter_turns):
            p2 = p2 @ rot.T
            corners = corners @ rot.T
        p2 += [dx, dy]
        corners += [dx, dy]
        moved = Region.from_rect((*corners.min(0), *corners.max(0)))
        np.testing.assert_allclose(k_hat(p2, moved, radii).khat, base, rtol=1e-9)

    @given(st.integers(0, 10_000), st.sampled_from([0.01, 0.5, 7.0, 1e3]))
    def test_joint_rescaling(self, seed, c):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0, 5, (30, 2))
        region = Region.from_rect((0, 0, 5, 5))
        radii = np.array([0.5, 1.0, 1.25])
        a = k_hat(pts, region, radii).khat
        b = k_hat(pts * c, region.scaled(c), radii * c).khat
        np.testing.assert_allclose(b, a * c**2, rtol=1e-9)

    @given(st.integers(0, 10_000))
    def test_monotone_in_t(self, seed):
        pts = np.random.default_rng(seed).uniform(0, 1, (30, 2))
        est = k_hat(pts, Region.from_rect((0, 0, 1, 1)), np.linspace(0.01, 0.25, 12))
        assert np.all(np.diff(est.khat) >= 0) and np.all(np.diff(est.lhat) >= 0)
        np.testing.assert_allclose(est.lhat, np.sqrt(est.khat / np.pi))


class TestSampleCSR:
    def test_uniform_moments(self, unit_square):
        pts = sample_csr(100_000, unit_square, 12)
        se = math.sqrt(1 / 12 / 100_000)
        assert np.all(np.abs(pts.mean(axis=0) - 0.5) <= 3 * se)

    def test_empty(self, unit_square):
        assert sample_csr(0, unit_square, 1).shape == (0, 2)

    def test_deterministic(self, irregular):
        np.testing.assert_array_equal(sample_csr(50, irregular.region, 4), sample_csr(50, irregular.region, 4))

    def test_irregular_inside(self, irregular):
        pts = sample_csr(500, irregular.region, 4)
        assert len(pts) == 500 and irregular.region.contains_many(pts).all()

    def test_sliver_guard(self):
        sliver = Region([Polygon([(0, 0), (1000, 1000), (1000, 1000.05)])])
        with pytest.raises(SamplingInefficiencyError):
            sample_csr(5, sliver, 1)


@pytest.fixture(scope="module")
def env():
    return mc_envelope(30, Region.from_rect((0, 0, 1, 1)), [0.05, 0.1, 0.2], n_sim=200, seed=3)


class TestEnvelope:
    def test_quantiles_ordered(self, env):
        q = [env.q(x) for x in (0.025, 0.05, 0.95, 0.975)]
        for lo, hi in zip(q, q[1:]):
            assert np.all(lo <= hi)

    def test_order_statistic(self, env):
        # ceil(0.95 * 200) = 190th smallest
        np.testing.assert_array_equal(env.q(0.95), env.samples[189])
        np.testing.assert_array_equal(order_statistic_quantile(np.arange(1000.0)[:, None], 0.95), [949.0])

    def test_same_seed_identical(self, env):
        again = mc_envelope(30, Region.from_rect((0, 0, 1, 1)), [0.05, 0.1, 0.2], n_sim=200, seed=3)
        np.testing.assert_array_equal(env.samples, again.samples)

    def test_thread_count_irrelevant(self, env):
        again = mc_envelope(30, Region.from_rect((0, 0, 1, 1)), [0.05, 0.1, 0.2], n_sim=200, seed=3, threads=4)
        np.testing.assert_array_equal(env.samples, again.samples)

    def test_min_sims(self):
        with pytest.raises(ValueError):
            mc_envelope(30, Region.from_rect((0, 0, 1, 1)), [0.1], n_sim=99)


class TestKTest:
    def test_median_pattern_retained(self):
        env = mc_envelope(20, Region.from_rect((0, 0, 1, 1)), [0.05, 0.1, 0.2], n_sim=201, seed=1)
        median = env.samples[100]
        assert not decide_k(median, env, "two").any()
        assert not decide_k(median, env, "right").any()

    def test_coincident_points_right_reject(self):
        region = Region.from_rect((0, 0, 100, 100))
        env = mc_envelope(20, region, [1, 2, 5, 10, 20], n_sim=100, seed=2)
        res = k_test(np.full((20, 2), 50.0), region, env, "right")
        assert res.reject.all()

    def test_full_grid_below_spacing(self, grid20):
        pts = grid20.centroids()
        env = mc_envelope(400, grid20.region, [0.9], n_sim=100, seed=5)
        assert env.q(0.025)[0] > 0
        res = k_test(pts, grid20.region, env, "two")
        assert res.estimate.khat[0] == 0.0 and res.reject[0]

    def test_mismatched_n(self, unit_square):
        env = mc_envelope(10, unit_square, [0.1], n_sim=100, seed=1)
        with pytest.raises(ContractViolationError):
            k_test(sample_csr(11, unit_square, 1), unit_square, env)

    def test_mismatched_radii(self, unit_square):
        env = mc_envelope(10, unit_square, [0.1], n_sim=100, seed=1)
        with pytest.raises(ContractViolationError):
            k_test(sample_csr(10, unit_square, 1), unit_square, env, radii=[0.2])

    def test_left_tail_not_supported(self, unit_square):
        env = mc_envelope(10, unit_square, [0.1], n_sim=100, seed=1)
        with pytest.raises(ValueError):
            k_test(sample_csr(10, unit_square, 1), unit_square, env, "left")

    def test_normalization_toggle_keeps_decisions(self, grid20):
        radii = radius_grid(grid20)
        rng = np.random.default_rng(0)
        for n in (40, 100):
            env_a = mc_envelope(n, grid20.region, radii, n_sim=200, seed=9, normalization="n2")
            env_b = mc_envelope(n, grid20.region, radii, n_sim=200, seed=9, normalization="n(n-1)")
            for _ in range(30):
                pts = grid20.centroids()[rng.choice(400, n, replace=False)]
                for tail in ("two", "right"):
                    a = k_test(pts, grid20.region, env_a, tail)
                    b = k_test(pts, grid20.region, env_b, tail)
                    np.testing.assert_array_equal(a.reject, b.reject)
                    np.testing.assert_allclose(b.estimate.khat, a.estimate.khat * n / (n - 1), rtol=1e-12)
