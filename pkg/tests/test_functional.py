"""Discrete energy: finite-difference consistency and convexity checks."""

import math

import numpy as np
import pytest

from vortexlab.errors import FieldOverflowError
from vortexlab.functional import DiscreteFunctional, FieldPair, PlanarGrid
from vortexlab.model import (
    ModelParams,
    background,
    coupling_matrix,
    functional_coefficients,
)


def make_problem(N=2, n1=1, n2=1, tau=1.0, half_width=15.0, n=33, theorem_mode=None):
    if theorem_mode is None:
        theorem_mode = not (n1 == 0 and n2 == 0)
    params = ModelParams(N=N, n1=n1, n2=n2, tau=tau, theorem_mode=theorem_mode)
    grid = PlanarGrid(half_width=half_width, points_per_side=n)
    fc = functional_coefficients(coupling_matrix(params))
    return DiscreteFunctional(grid, background(params), fc), grid, fc


def random_field(grid, rng, scale=0.3, smooth=2):
    n = grid.points_per_side
    w = scale * rng.standard_normal((n, n))
    for _ in range(smooth):
        w[1:-1, 1:-1] = 0.2 * (
            w[1:-1, 1:-1] + w[:-2, 1:-1] + w[2:, 1:-1] + w[1:-1, :-2] + w[1:-1, 2:]
        )
    w[0, :] = w[-1, :] = w[:, 0] = w[:, -1] = 0.0
    return w


def random_pair(grid, rng, scale=0.3):
    return FieldPair(random_field(grid, rng, scale), random_field(grid, rng, scale))


def fd_gradient(func, fp, eps=1e-6):
    """Central finite differences of the energy, node by node."""
    out = FieldPair(np.zeros_like(fp.w1), np.zeros_like(fp.w2))
    n = fp.w1.shape[0]
    for w, g in ((fp.w1, out.w1), (fp.w2, out.w2)):
        for i in range(1, n - 1):
            for j in range(1, n - 1):
                orig = w[i, j]
                w[i, j] = orig + eps
                ep = func.energy(fp)
                w[i, j] = orig - eps
                em = func.energy(fp)
                w[i, j] = orig
                g[i, j] = (ep - em) / (2.0 * eps)
    return out


class TestPlanarGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            PlanarGrid(half_width=0.0, points_per_side=32)
        with pytest.raises(ValueError):
            PlanarGrid(half_width=5.0, points_per_side=8)

    def test_even_grid_is_symmetric_and_misses_origin(self):
        g = PlanarGrid(half_width=15.0, points_per_side=32)
        assert g.coords[0] == -15.0 and g.coords[-1] == 15.0
        np.testing.assert_array_equal(g.coords, -g.coords[::-1])
        assert np.min(np.abs(g.coords)) == pytest.approx(g.spacing / 2.0)

    def test_odd_grid_offset(self):
        g = PlanarGrid(half_width=2.0, points_per_side=17)
        assert np.min(np.abs(g.coords)) == pytest.approx(g.spacing / 2.0)
        g0 = PlanarGrid(half_width=2.0, points_per_side=17, origin_offset=False)
        assert np.min(np.abs(g0.coords)) == 0.0

    def test_spacing(self):
        g = PlanarGrid(half_width=15.0, points_per_side=512)
        assert g.spacing == pytest.approx(30.0 / 511.0)
        assert g.cell_area == pytest.approx(g.spacing**2)


class TestEnergy:
    def test_zero_field_zero_energy(self):
        func, grid, _ = make_problem()
        assert func.energy(FieldPair.zeros(grid)) == 0.0

    def test_vacuum_zero_slope(self):
        func, grid, _ = make_problem(n1=0, n2=0)
        g = func.gradient(FieldPair.zeros(grid))
        assert np.max(np.abs(g.w1)) < 1e-14
        assert np.max(np.abs(g.w2)) < 1e-14

    def test_single_node_perturbation_matches_fd(self):
        func, grid, _ = make_problem()
        fp = FieldPair.zeros(grid)
        g = func.gradient(fp)
        eps = 1e-6
        i = j = grid.points_per_side // 2
        fp.w1[i, j] = eps
        ep = func.energy(fp)
        fp.w1[i, j] = -eps
        em = func.energy(fp)
        fd = (ep - em) / (2.0 * eps)
        assert fd == pytest.approx(g.w1[i, j], rel=1e-6)

    def test_constant_density_is_positive_with_flat_background(self):
        # With unit exp(2*u0) and zero sources the node density reduces to a
        # strictly convex scalar with its minimum exactly at zero.
        _, _, fc = make_problem(N=3, n1=0, n2=0)

        def density(c):
            return (
                math.expm1(2.0 * (fc.a_mix + 1.0) * c)
                + fc.c_exp1 * math.expm1(2.0 * c)
                - fc.c_lin1 * c
                - 2.0 * c
            )

        cs = np.linspace(-2.0, 2.0, 4001)
        vals = np.array([density(c) for c in cs])
        assert density(0.0) == 0.0
        nonzero = np.abs(cs) > 1e-12
        assert np.all(vals[nonzero] > 0.0)
        # Sampling oracle: the minimum sits at c = 0.
        assert abs(cs[np.argmin(vals)]) < 1.5e-3

    def test_overflow_guard(self):
        func, grid, _ = make_problem()
        fp = FieldPair.zeros(grid)
        fp.w1[5, 5] = 200.0  # exponent 400 exceeds the default cap of 300
        with pytest.raises(FieldOverflowError):
            func.energy(fp)


class TestGradient:
    def test_matches_fd_on_random_fields(self):
        func, grid, _ = make_problem()
        rng = np.random.default_rng(7)
        for _ in range(4):
            fp = random_pair(grid, rng)
            g = func.gradient(fp)
            fd = fd_gradient(func, fp)
            scale = max(np.max(np.abs(g.w1)), np.max(np.abs(g.w2)))
            err = max(np.max(np.abs(fd.w1 - g.w1)), np.max(np.abs(fd.w2 - g.w2)))
            assert err / scale < 1e-6

    def test_zero_field_real_background_closed_form(self):
        func, grid, fc = make_problem()
        g = func.gradient(FieldPair.zeros(grid))
        h2 = grid.cell_area
        expected1 = h2 * (
            2.0 * fc.a_mix * func.e2u02
            + 2.0 * fc.c_exp1 * func.e2u01
            + fc.c_psi1 * func.psi1
            - fc.c_lin1
        )
        expected2 = h2 * (2.0 * func.e2u02 + fc.c_psi2 * func.psi2 - 2.0)
        np.testing.assert_allclose(g.w1[1:-1, 1:-1], expected1[1:-1, 1:-1], rtol=1e-13)
        np.testing.assert_allclose(g.w2[1:-1, 1:-1], expected2[1:-1, 1:-1], rtol=1e-13)

    def test_boundary_entries_are_zero(self):
        func, grid, _ = make_problem()
        rng = np.random.default_rng(3)
        g = func.gradient(random_pair(grid, rng))
        assert np.all(g.w1[0, :] == 0.0) and np.all(g.w1[-1, :] == 0.0)
        assert np.all(g.w2[:, 0] == 0.0) and np.all(g.w2[:, -1] == 0.0)


class TestHessian:
    def test_zero_direction(self):
        func, grid, _ = make_problem()
        rng = np.random.default_rng(11)
        fp = random_pair(grid, rng)
        hd = func.hessian_apply(fp, FieldPair.zeros(grid))
        assert np.all(hd.w1 == 0.0) and np.all(hd.w2 == 0.0)

    def test_positive_curvature(self):
        func, grid, _ = make_problem()
        rng = np.random.default_rng(13)
        for _ in range(5):
            fp = random_pair(grid, rng)
            for _ in range(20):
                d = random_pair(grid, rng, scale=1.0)
                hd = func.hessian_apply(fp, d)
                quad = float(np.sum(d.w1 * hd.w1) + np.sum(d.w2 * hd.w2))
                assert quad > 0.0

    def test_matches_second_difference(self):
        func, grid, _ = make_problem()
        rng = np.random.default_rng(17)
        eps = 1e-4
        for _ in range(5):
            fp = random_pair(grid, rng)
            d = random_pair(grid, rng, scale=1.0)
            hd = func.hessian_apply(fp, d)
            quad = float(np.sum(d.w1 * hd.w1) + np.sum(d.w2 * hd.w2))
            plus = FieldPair(fp.w1 + eps * d.w1, fp.w2 + eps * d.w2)
            minus = FieldPair(fp.w1 - eps * d.w1, fp.w2 - eps * d.w2)
            fd = (func.energy(plus) - 2.0 * func.energy(fp) + func.energy(minus)) / eps**2
            assert fd == pytest.approx(quad, rel=1e-4)

    def test_symmetric_quadratic_form(self):
        func, grid, _ = make_problem()
        rng = np.random.default_rng(19)
        fp = random_pair(grid, rng)
        a = random_pair(grid, rng, scale=1.0)
        b = random_pair(grid, rng, scale=1.0)
        ha = func.hessian_apply(fp, a)
        hb = func.hessian_apply(fp, b)
        left = float(np.sum(b.w1 * ha.w1) + np.sum(b.w2 * ha.w2))
        right = float(np.sum(a.w1 * hb.w1) + np.sum(a.w2 * hb.w2))
        assert left == pytest.approx(right, rel=1e-12)


class TestModuleLevelOps:
    def test_wrappers_match_class(self):
        from vortexlab.functional import energy, gradient, hessian_apply
        from vortexlab.model import ModelParams

        params = ModelParams(N=2, n1=1, n2=1)
        grid = PlanarGrid(half_width=15.0, points_per_side=17, origin_offset=False)
        fc = functional_coefficients(coupling_matrix(params))
        bg = background(params)
        func = DiscreteFunctional(grid, bg, fc)
        rng = np.random.default_rng(31)
        fp = random_pair(grid, rng)
        d = random_pair(grid, rng)
        assert energy(fp, grid, bg, fc) == func.energy(fp)
        g_mod = gradient(fp, grid, bg, fc)
        g_cls = func.gradient(fp)
        assert g_mod.sup_diff(g_cls) == 0.0
        h_mod = hessian_apply(fp, d, grid, bg, fc)
        h_cls = func.hessian_apply(fp, d)
        assert h_mod.sup_diff(h_cls) == 0.0


class TestConvexity:
    def test_midpoint_convexity(self):
        func, grid, _ = make_problem()
        rng = np.random.default_rng(23)
        for _ in range(100):
            u = random_pair(grid, rng, scale=0.5)
            v = random_pair(grid, rng, scale=0.5)
            mid = FieldPair(0.5 * (u.w1 + v.w1), 0.5 * (u.w2 + v.w2))
            eu, ev, em = func.energy(u), func.energy(v), func.energy(mid)
            scale = 1.0 + abs(eu) + abs(ev)
            assert em <= 0.5 * (eu + ev) + 1e-10 * scale

    def test_vacuum_minimum_is_zero_field(self):
        func, grid, _ = make_problem(n1=0, n2=0)
        rng = np.random.default_rng(29)
        zero = FieldPair.zeros(grid)
        assert func.energy(zero) == 0.0
        for _ in range(10):
            fp = random_pair(grid, rng, scale=0.4)
            if fp.sup_diff(zero) > 0:
                assert func.energy(fp) > 0.0
