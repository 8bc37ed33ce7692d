import math

import numpy as np
import pytest

from sogym.geometry import (
    DomainSpec,
    MmcComponent,
    action_bounds,
    component_frame,
    scale_action,
    tdf,
    tdf_at_points,
    tdf_grid,
    unscale_component,
)

from conftest import random_component


class TestScaleAction:
    def test_lower_bound(self):
        d = DomainSpec(2.0, 1.0)
        c = scale_action([-1, -1, -1, -1, -1, -1], d)
        assert c.xa == 0.0 and c.ya == 0.0 and c.xb == 0.0 and c.yb == 0.0
        assert c.ta == 0.01 and c.tb == 0.01

    def test_upper_bound_thickness_is_five_percent(self):
        d = DomainSpec(1.0, 1.0)
        c = scale_action([1, 1, 1, 1, 1, 1], d)
        assert c.ta == pytest.approx(0.05, abs=1e-15)
        assert c.xa == 1.0 and c.yb == 1.0

    def test_midpoint(self):
        d = DomainSpec(2.0, 1.0)
        c = scale_action([0, 0, 0, 0, 0, 0], d)
        # direct interpolation oracle: lo + (hi - lo) / 2
        assert c.xa == pytest.approx(1.0, abs=1e-15)
        assert c.ya == pytest.approx(0.5, abs=1e-15)
        assert c.ta == pytest.approx((0.01 + 0.05) / 2, abs=1e-15)

    def test_out_of_range_clamped(self):
        d = DomainSpec(1.0, 1.0)
        c = scale_action([-5, 7, 0, 0, 2, -2], d)
        assert c.xa == 0.0 and c.ya == 1.0
        assert c.ta == 0.05 and c.tb == 0.01

    def test_monotone_in_each_coordinate(self):
        d = DomainSpec(1.7, 1.3)
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = rng.uniform(-1, 1, 6)
            b = a.copy()
            j = rng.integers(0, 6)
            b[j] = min(1.0, a[j] + rng.uniform(0, 0.5))
            va = scale_action(a, d).as_array()
            vb = scale_action(b, d).as_array()
            assert vb[j] >= va[j]
            mask = np.arange(6) != j
            assert np.array_equal(va[mask], vb[mask])

    def test_extremes_hit_bounds_exactly(self):
        d = DomainSpec(1.31, 1.77)
        lo, hi = action_bounds(d)
        assert np.array_equal(scale_action(-np.ones(6), d).as_array(), lo)
        assert np.array_equal(scale_action(np.ones(6), d).as_array(), hi)

    def test_unscale_roundtrip(self):
        d = DomainSpec(1.5, 1.2)
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.uniform(-1, 1, 6)
            c = scale_action(a, d)
            np.testing.assert_allclose(unscale_component(c, d), a, atol=1e-12)

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            scale_action([0, 0, 0], DomainSpec(1, 1))


class TestComponentFrame:
    def test_symmetric_diagonal(self):
        f = component_frame(MmcComponent(0, 0, 1, 1, 0.02, 0.02))
        assert f.x0 == 0.5 and f.y0 == 0.5
        assert f.length == pytest.approx(math.sqrt(2), rel=1e-15)
        assert f.theta == pytest.approx(math.pi / 4, rel=1e-15)

    def test_degenerate_clamps(self):
        f = component_frame(MmcComponent(0.3, 0.3, 0.3, 0.3, 0.02, 0.02))
        assert f.length == 1e-6
        assert f.theta == 0.0

    def test_axis_aligned(self):
        f = component_frame(MmcComponent(0.5, 0.5, 1.5, 0.5, 0.02, 0.02))
        assert (f.x0, f.y0, f.length, f.theta) == (1.0, 0.5, 1.0, 0.0)


class TestTdf:
    comp = MmcComponent(0.5, 0.5, 1.5, 0.5, 0.1, 0.1)

    def test_center_is_one(self):
        assert tdf(self.comp, 1.0, 0.5) == pytest.approx(1.0, abs=1e-14)

    def test_thickness_boundary_is_zero(self):
        assert tdf(self.comp, 1.0, 0.6) == pytest.approx(0.0, abs=1e-12)

    def test_independent_scalar_evaluation(self):
        # frozen from a direct evaluation of the local-frame formula:
        # x1 = 0.25, y1 = 0.05, t = 0.1, L = 1
        expected = 1.0 - ((0.25 / 1.0) ** 6 + (0.05 / 0.1) ** 6) ** (1.0 / 6.0)
        assert expected == pytest.approx(0.4987063137123946, abs=1e-13)
        assert tdf(self.comp, 1.25, 0.55) == pytest.approx(expected, abs=1e-12)

    def test_endpoint_swap_invariance(self):
        rng = np.random.default_rng(11)
        d = DomainSpec(1.4, 1.8)
        for _ in range(200):
            c = random_component(rng, d)
            swapped = MmcComponent(c.xb, c.yb, c.xa, c.ya, c.tb, c.ta)
            x, y = rng.uniform(-0.5, 2.0, 2)
            assert tdf(c, x, y) == pytest.approx(tdf(swapped, x, y), rel=1e-12, abs=1e-12)

    def test_rigid_motion_equivariance(self):
        rng = np.random.default_rng(12)
        d = DomainSpec(1.0, 1.0)
        for _ in range(200):
            c = random_component(rng, d)
            x, y = rng.uniform(0, 1, 2)
            dx, dy, rot = rng.uniform(-1, 1, 3)
            cr, sr = math.cos(rot), math.sin(rot)

            def move(px, py):
                return cr * px - sr * py + dx, sr * px + cr * py + dy

            xa, ya = move(c.xa, c.ya)
            xb, yb = move(c.xb, c.yb)
            moved = MmcComponent(xa, ya, xb, yb, c.ta, c.tb)
            qx, qy = move(x, y)
            assert tdf(moved, qx, qy) == pytest.approx(tdf(c, x, y), rel=1e-10, abs=1e-10)

    def test_level_set_anchors(self):
        rng = np.random.default_rng(13)
        d = DomainSpec(1.0, 1.0)
        for _ in range(50):
            c = random_component(rng, d)
            t = c.ta
            c = MmcComponent(c.xa, c.ya, c.xb, c.yb, t, t)  # uniform thickness
            f = component_frame(c)
            ct, st = math.cos(f.theta), math.sin(f.theta)
            assert tdf(c, f.x0, f.y0) == pytest.approx(1.0, abs=1e-12)
            for lx, ly in ((f.length, 0), (-f.length, 0), (0, t), (0, -t)):
                px = f.x0 + ct * lx - st * ly
                py = f.y0 + st * lx + ct * ly
                assert tdf(c, px, py) == pytest.approx(0.0, abs=1e-10)


class TestTdfGrid:
    def test_matches_pointwise_on_tiny_mesh(self):
        d = DomainSpec(1.0, 1.0, elements_per_unit=2)
        c = MmcComponent(0.2, 0.3, 0.8, 0.7, 0.02, 0.04)
        g = tdf_grid(c, d)
        assert g.shape == (3, 3)
        for ix in range(3):
            for iy in range(3):
                assert g[ix, iy] == pytest.approx(tdf(c, ix * 0.5, iy * 0.5), abs=1e-12)

    def test_mirror_symmetry(self):
        d = DomainSpec(1.0, 1.0)
        c = MmcComponent(0.3, 0.5, 0.7, 0.5, 0.03, 0.03)
        g = tdf_grid(c, d)
        np.testing.assert_allclose(g, g[::-1, :], atol=1e-12)  # mirror about x = 0.5
        np.testing.assert_allclose(g, g[:, ::-1], atol=1e-12)  # mirror about y = 0.5

    def test_random_component_pointwise_oracle(self):
        rng = np.random.default_rng(21)
        d = DomainSpec(1.0, 1.0)
        c = random_component(rng, d)
        g = tdf_grid(c, d)
        assert g.shape == (51, 51)
        for _ in range(100):
            ix = int(rng.integers(0, 51))
            iy = int(rng.integers(0, 51))
            assert g[ix, iy] == pytest.approx(tdf(c, ix * 0.02, iy * 0.02), abs=1e-12)

    def test_points_evaluator_matches_grid(self):
        rng = np.random.default_rng(22)
        d = DomainSpec(1.2, 1.0)
        c = random_component(rng, d)
        g = tdf_grid(c, d)
        ixs = rng.integers(0, d.nx + 1, 40)
        iys = rng.integers(0, d.ny + 1, 40)
        vals = tdf_at_points(c, ixs * d.spacing, iys * d.spacing)
        np.testing.assert_allclose(vals, g[ixs, iys], atol=1e-12)


class TestDomainSpec:
    def test_mesh_dims_round(self):
        d = DomainSpec(1.37, 1.9)
        assert d.nx == round(1.37 * 50) and d.ny == 95

    def test_invalid_rejected(self):
        with pytest.raises(ValueError):
            DomainSpec(0.0, 1.0)
        with pytest.raises(ValueError):
            DomainSpec(1.0, 1.0, elements_per_unit=0)
