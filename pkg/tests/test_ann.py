import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arealstats import Region, ann_test, nn_distances
from arealstats.ann import Z_05, Z_95, Z_975, decide
from arealstats.errors import DegenerateWindowError, InsufficientPointsError

from conftest import lattice

points_st = st.lists(
    st.tuples(st.floats(0, 100), st.floats(0, 100)), min_size=3, max_size=40, unique=True
)


class TestNearestNeighbour:
    def test_triangle(self):
        np.testing.assert_array_equal(nn_distances([(0, 0), (0, 3), (4, 0)]), [3, 3, 4])

    def test_duplicates(self):
        np.testing.assert_array_equal(nn_distances([(2, 2), (2, 2)]), [0, 0])

    def test_lattice(self):
        assert np.all(nn_distances(lattice(10)) == 1.0)

    def test_needs_two(self):
        with pytest.raises(InsufficientPointsError):
            nn_distances([(0, 0)])

    @given(points_st, st.randoms())
    def test_permutation_equivariant(self, pts, rnd):
        xy = np.array(pts)
        perm = list(range(len(pts)))
        rnd.shuffle(perm)
        np.testing.assert_array_equal(nn_distances(xy)[perm], nn_distances(xy[perm]))


class TestAnnTest:
    def test_lattice_closed_form(self):
        res = ann_test(lattice(10), Region.from_rect((0, 0, 10, 10)), "study", "two")
        assert (res.rho, res.r_bar_o, res.r_bar_e, res.ratio) == (1.0, 1.0, 0.5, 2.0)
        assert res.sigma == pytest.approx(0.026136, abs=1e-15)
        assert res.z == pytest.approx(0.5 / 0.026136)
        assert res.z == pytest.approx(19.13, abs=0.01)
        assert res.reject

    def test_all_coincident(self):
        res = ann_test(np.full((25, 2), 3.0), Region.from_rect((0, 0, 10, 10)), "study", "left")
        assert res.r_bar_o == 0.0 and res.ratio == 0.0
        assert res.z < 0 and res.reject

    def test_ratio_one(self):
        res = ann_test([(1, 1), (2, 1)], Region.from_rect((0, 0, 2, 4)), "study", "two")
        assert res.r_bar_e == 1.0 and res.ratio == 1.0 and res.z == 0.0
        assert not res.reject

    def test_window_two_uses_bounding_rect(self):
        pts = [(1, 1), (3, 1), (1, 5), (2, 2)]
        res = ann_test(pts, Region.from_rect((0, 0, 10, 10)), "bbox")
        assert res.area == 8.0

    @pytest.mark.parametrize("pts", [[(1, 1), (1, 1), (1, 1)], [(0, 1), (0, 2), (0, 5)], [(0, 1), (3, 1)]])
    def test_degenerate_window_two(self, pts):
        with pytest.raises(DegenerateWindowError):
            ann_test(pts, Region.from_rect((0, 0, 10, 10)), "bbox")

    def test_subnormal_window_two(self):
        with pytest.raises(DegenerateWindowError):
            ann_test([(0.0, 0.0), (0.0, 1.0), (5e-324, 0.0)], Region.from_rect((0, 0, 10, 10)), "bbox")

    def test_decision_thresholds(self):
        assert decide(Z_975 + 1e-9, "two") and not decide(Z_975, "two")
        assert decide(-Z_975 - 1e-9, "two")
        assert decide(Z_05 - 1e-9, "left") and not decide(Z_05, "left")
        assert decide(Z_95 + 1e-9, "right") and not decide(Z_95, "right")

    def test_quantile_constants(self):
        from scipy.stats import norm

        assert Z_975 == pytest.approx(norm.ppf(0.975), abs=1e-6)
        assert Z_05 == pytest.approx(norm.ppf(0.05), abs=1e-6)

    @given(points_st, st.sampled_from([0.001, 0.37, 3.0, 1000.0]))
    def test_scale_covariance(self, pts, c):
        region = Region.from_rect((0, 0, 100, 100))
        for window in ("study", "bbox"):
            try:
                a = ann_test(pts, region, window, "two")
            except DegenerateWindowError:
                continue
            b = ann_test(np.array(pts) * c, region.scaled(c), window, "two")
            assert b.ratio == pytest.approx(a.ratio, rel=1e-9)
            assert b.z == pytest.approx(a.z, rel=1e-9, abs=1e-9)
            if abs(abs(a.z) - Z_975) > 1e-6:
                assert a.reject == b.reject

    @given(points_st, st.randoms())
    def test_windows_differ_only_through_area(self, pts, rnd):
        region = Region.from_rect((0, 0, 100, 100))
        a = ann_test(pts, region, "study")
        try:
            b = ann_test(pts, region, "bbox")
        except DegenerateWindowError:
            return
        assert a.r_bar_o == b.r_bar_o and a.n == b.n
        assert b.r_bar_e == pytest.approx(0.5 * math.sqrt(b.area / b.n))
        perm = list(range(len(pts)))
        rnd.shuffle(perm)
        c = ann_test(np.array(pts)[perm], region, "study")
        assert c.z == pytest.approx(a.z, rel=1e-12) and a.ratio >= 0
