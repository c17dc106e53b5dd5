"""Planar Newton-CG solver: convergence, symmetry, uniqueness, slices."""

import numpy as np
import pytest

from vortexlab.errors import FieldOverflowError, NonConvergenceError
from vortexlab.functional import FieldPair, PlanarGrid
from vortexlab.model import ModelParams, background, coupling_matrix
from vortexlab.planar import boundary_values, extract_radial_slice, solve_planar
from vortexlab.radial import radial_mesh, solve_radial_P


def make(N=2, n1=1, n2=1, tau=1.0, theorem_mode=None):
    if theorem_mode is None:
        theorem_mode = not (n1 == 0 and n2 == 0)
    return ModelParams(N=N, n1=n1, n2=n2, tau=tau, theorem_mode=theorem_mode)


@pytest.fixture(scope="module")
def default_solution():
    params = make()
    cd = coupling_matrix(params)
    bg = background(params)
    grid = PlanarGrid(half_width=15.0, points_per_side=128)
    return params, cd, bg, grid, solve_planar(params, cd, bg, grid, tol=1e-8)


class TestVacuum:
    def test_zero_field_is_exact(self):
        params = make(n1=0, n2=0)
        cd = coupling_matrix(params)
        bg = background(params)
        grid = PlanarGrid(half_width=15.0, points_per_side=64)
        sol = solve_planar(params, cd, bg, grid, tol=1e-8)
        assert sol.converged and sol.iterations <= 2
        assert sol.final_energy == 0.0
        assert np.max(np.abs(sol.w.w1)) == 0.0
        assert np.max(np.abs(sol.u1)) == 0.0

    def test_vacuum_slice_is_zero(self):
        params = make(n1=0, n2=0)
        cd = coupling_matrix(params)
        bg = background(params)
        grid = PlanarGrid(half_width=15.0, points_per_side=64)
        sol = solve_planar(params, cd, bg, grid, tol=1e-8)
        sl = extract_radial_slice(sol)
        assert np.max(np.abs(sl.u1)) == 0.0 and np.max(np.abs(sl.u2)) == 0.0


class TestSolve:
    def test_converged_metadata(self, default_solution):
        *_, sol = default_solution
        assert sol.converged
        assert sol.final_gradient_norm < 1e-8
        assert sol.iterations > 0 and sol.cg_iterations > 0
        assert sol.final_energy < 0.0

    def test_energy_monotone_nonincreasing(self, default_solution):
        *_, sol = default_solution
        hist = np.array(sol.energy_history)
        assert np.all(np.diff(hist) <= 1e-12)

    def test_boundary_pins_fields_to_zero(self, default_solution):
        *_, sol = default_solution
        for u in (sol.u1, sol.u2):
            edge = np.concatenate([u[0, :], u[-1, :], u[:, 0], u[:, -1]])
            assert np.max(np.abs(edge)) < 1e-14

    def test_four_fold_symmetry(self, default_solution):
        *_, sol = default_solution
        for u in (sol.u1, sol.u2):
            assert np.max(np.abs(u - u[::-1, :])) < 1e-9
            assert np.max(np.abs(u - u[:, ::-1])) < 1e-9

    def test_fields_within_sanity_bounds(self, default_solution):
        *_, sol = default_solution
        assert np.all(sol.E1 > -1.0) and np.all(sol.E2 > -1.0)
        assert sol.u1.max() <= 0.05 and sol.u2.max() <= 0.05

    def test_uniqueness_from_random_start(self, default_solution):
        params, cd, bg, grid, sol = default_solution
        rng = np.random.default_rng(5)
        init = FieldPair.zeros(grid)
        n = grid.points_per_side
        init.w1[1:-1, 1:-1] = rng.uniform(-0.5, 0.5, (n - 2, n - 2))
        init.w2[1:-1, 1:-1] = rng.uniform(-0.5, 0.5, (n - 2, n - 2))
        other = solve_planar(params, cd, bg, grid, tol=1e-8, initial=init)
        assert other.converged
        assert sol.w.sup_diff(other.w) < 1e-6

    def test_overflow_initial_field_raises(self):
        params = make()
        cd = coupling_matrix(params)
        bg = background(params)
        grid = PlanarGrid(half_width=15.0, points_per_side=64)
        init = FieldPair.zeros(grid)
        init.w1[10, 10] = 400.0
        with pytest.raises(FieldOverflowError):
            solve_planar(params, cd, bg, grid, initial=init)

    def test_max_iter_exhaustion(self):
        params = make()
        cd = coupling_matrix(params)
        bg = background(params)
        grid = PlanarGrid(half_width=15.0, points_per_side=64)
        with pytest.raises(NonConvergenceError) as err:
            solve_planar(params, cd, bg, grid, tol=1e-12, max_iter=1)
        assert err.value.last_iterate is not None


class TestBoundaryValues:
    def test_lifted_data_cancels_background(self):
        params = make()
        cd = coupling_matrix(params)
        bg = background(params)
        grid = PlanarGrid(half_width=15.0, points_per_side=64)
        g = boundary_values(cd, bg, grid)
        # P = L @ w reproduces -u0 on the edge.
        r2 = grid.radius_squared()
        P1 = g.w1
        P2 = cd.gamma * g.w1 + g.w2
        for P, u0 in ((P1, bg.u0_1(r2)), (P2, bg.u0_2(r2))):
            assert np.max(np.abs(P[0, :] + u0[0, :])) < 1e-15
            assert np.max(np.abs(P[:, -1] + u0[:, -1])) < 1e-15
        assert np.max(np.abs(g.w1[1:-1, 1:-1])) == 0.0


class TestRadialSlice:
    def test_slice_matches_radial_solution(self, default_solution):
        params, cd, bg, grid, sol = default_solution
        mesh = radial_mesh(n=2000)
        rsol = solve_radial_P(params, cd, bg, mesh, tol=1e-9)
        sl = extract_radial_slice(sol)
        mask = (sl.r >= 0.5) & (sl.r <= 10.0)
        r = sl.r[mask]
        u1 = np.interp(r, mesh.r, rsol.P1) + bg.u0_1(r * r)
        u2 = np.interp(r, mesh.r, rsol.P2) + bg.u0_2(r * r)
        sup = max(np.max(np.abs(sl.u1[mask] - u1)), np.max(np.abs(sl.u2[mask] - u2)))
        assert sup < 5e-3

    def test_slice_boundary_value(self, default_solution):
        *_, sol = default_solution
        sl = extract_radial_slice(sol)
        # Outermost axis sample sits next to the zero-field edge.
        assert abs(sl.u1[-1]) < 1e-3

    def test_slice_requires_convergence(self, default_solution):
        *_, sol = default_solution
        import dataclasses

        broken = dataclasses.replace(sol, converged=False)
        with pytest.raises(ValueError):
            extract_radial_slice(broken)
