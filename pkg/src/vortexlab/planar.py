"""Two-dimensional Newton-conjugate-gradient minimizer.

Minimizes the discrete convex functional on the box grid.  Each outer step
solves the Newton system ``H d = -g`` approximately by conjugate gradients
(the Hessian is symmetric positive definite by strict convexity) with an
Eisenstat-Walker style forcing term, then backtracks on the energy.
Strict convexity makes the minimizer unique and the iteration globally
convergent from any finite initial field.

The physical fields must vanish at infinity; on the truncated box this is
imposed at the edge, so the boundary values of ``w`` are the lifted data
``L^-1 @ (-u0)`` rather than zero (with zero boundary data the fields
would be pinned to the background there, which measurably biases the flux
integrals).  Interior nodes are the only degrees of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonConvergenceError
from .functional import DEFAULT_EXP_CAP, DiscreteFunctional, FieldPair, PlanarGrid
from .model import (
    BackgroundField,
    CouplingData,
    ModelParams,
    background,
    functional_coefficients,
)

__all__ = ["PlanarSolution", "RadialSlice", "boundary_values", "solve_planar", "extract_radial_slice"]


@dataclass
class PlanarSolution:
    """Converged planar fields plus derived quantities and solve metadata."""

    params: ModelParams
    grid: PlanarGrid
    w: FieldPair
    P1: np.ndarray
    P2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    converged: bool
    iterations: int
    cg_iterations: int
    final_gradient_norm: float
    final_energy: float
    energy_history: list


@dataclass
class RadialSlice:
    """Fields sampled along the positive x-axis of a planar solution."""

    r: np.ndarray
    u1: np.ndarray
    u2: np.ndarray


def boundary_values(cd: CouplingData, bg: BackgroundField, grid: PlanarGrid) -> FieldPair:
    """Dirichlet data on the box edge: ``w = L^-1 @ (-u0)``, zero interior.

    With ``P = L @ w`` this pins ``u = u0 + P`` to zero on the boundary,
    the truncated form of the topological condition at infinity.
    """
    r2 = grid.radius_squared()
    u01 = bg.u0_1(r2)
    u02 = bg.u0_2(r2)
    g1 = -u01
    g2 = cd.gamma * u01 - u02
    out = FieldPair.zeros(grid)
    for w, g in ((out.w1, g1), (out.w2, g2)):
        w[0, :] = g[0, :]
        w[-1, :] = g[-1, :]
        w[:, 0] = g[:, 0]
        w[:, -1] = g[:, -1]
    return out


def _dot(a1, a2, b1, b2) -> float:
    return float(np.vdot(a1, b1) + np.vdot(a2, b2))


def solve_planar(
    params: ModelParams,
    cd: CouplingData,
    bg: BackgroundField,
    grid: PlanarGrid,
    tol: float = 1e-8,
    max_iter: int = 60,
    initial: Optional[FieldPair] = None,
    cg_max_iter: int = 20000,
    exp_cap: float = DEFAULT_EXP_CAP,
) -> PlanarSolution:
    """Newton-CG minimization of the discrete functional.

    ``tol`` bounds the sup norm of the per-node Euler-Lagrange residual
    (gradient divided by cell area).  The initial field defaults to zero
    interior values; any finite initial field converges to the same
    minimizer (strict convexity), with its boundary entries overwritten by
    the lifted Dirichlet data.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    fc = functional_coefficients(cd)
    func = DiscreteFunctional(grid, bg, fc, exp_cap=exp_cap)
    h2 = grid.cell_area

    w = FieldPair.zeros(grid) if initial is None else initial.copy()
    w.validate()
    bvals = boundary_values(cd, bg, grid)
    for field, data in ((w.w1, bvals.w1), (w.w2, bvals.w2)):
        field[0, :] = data[0, :]
        field[-1, :] = data[-1, :]
        field[:, 0] = data[:, 0]
        field[:, -1] = data[:, -1]

    energy = func.energy(w)
    history = [energy]
    cg_total = 0
    for iteration in range(max_iter + 1):
        g = func.gradient(w)
        gnorm = max(float(np.max(np.abs(g.w1))), float(np.max(np.abs(g.w2)))) / h2
        if gnorm < tol:
            return _finish_planar(
                params, grid, bg, cd, w, True, iteration, cg_total, gnorm, energy, history
            )
        if iteration == max_iter:
            break

        # Inexact Newton: solve H d = -g by CG to a forcing tolerance that
        # tightens as the outer residual shrinks.
        eta = min(0.5, math.sqrt(gnorm))
        hess = func.hessian_operator(w)
        d1 = np.zeros_like(w.w1)
        d2 = np.zeros_like(w.w2)
        r1 = -g.w1
        r2 = -g.w2
        p1 = r1.copy()
        p2 = r2.copy()
        rr = _dot(r1, r2, r1, r2)
        gnorm2 = math.sqrt(rr)
        target = eta * gnorm2
        cg_iters = 0
        while math.sqrt(rr) > target:
            if cg_iters >= cg_max_iter:
                raise NonConvergenceError(
                    "conjugate gradient exceeded its iteration cap",
                    iterations=iteration,
                    residual=gnorm,
                )
            hp1, hp2 = hess(p1, p2)
            php = _dot(p1, p2, hp1, hp2)
            if php <= 0.0:  # cannot happen for a strictly convex energy
                raise NonConvergenceError(
                    "nonpositive curvature encountered in CG",
                    iterations=iteration,
                    residual=gnorm,
                )
            alpha = rr / php
            d1 += alpha * p1
            d2 += alpha * p2
            r1 -= alpha * hp1
            r2 -= alpha * hp2
            rr_new = _dot(r1, r2, r1, r2)
            beta = rr_new / rr
            rr = rr_new
            p1 = r1 + beta * p1
            p2 = r2 + beta * p2
            cg_iters += 1
        cg_total += cg_iters

        # Backtracking line search on the energy (Armijo).
        slope = _dot(g.w1, g.w2, d1, d2)
        t = 1.0
        while True:
            trial = FieldPair(w.w1 + t * d1, w.w2 + t * d2)
            try:
                e_trial = func.energy(trial)
            except OverflowError:
                e_trial = math.inf
            if math.isfinite(e_trial) and e_trial <= energy + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 2.0**-40:
                raise NonConvergenceError(
                    "planar line search stalled",
                    iterations=iteration,
                    residual=gnorm,
                    last_iterate=w,
                )
        w = trial
        energy = e_trial
        history.append(energy)

    raise NonConvergenceError(
        f"planar solve did not reach tol={tol:g} within {max_iter} Newton iterations "
        f"(last Euler-Lagrange residual {gnorm:.3e})",
        iterations=max_iter,
        residual=gnorm,
        last_iterate=w,
    )


def _finish_planar(params, grid, bg, cd, w, converged, iterations, cg_total, gnorm, energy, history):
    P1 = w.w1
    P2 = cd.gamma * w.w1 + w.w2
    r2 = grid.radius_squared()
    u1 = bg.u0_1(r2) + P1
    u2 = bg.u0_2(r2) + P2
    with np.errstate(over="ignore"):
        E1 = np.expm1(2.0 * u1)
        E2 = np.expm1(2.0 * u2)
    return PlanarSolution(
        params=params,
        grid=grid,
        w=w,
        P1=P1,
        P2=P2,
        u1=u1,
        u2=u2,
        E1=E1,
        E2=E2,
        converged=converged,
        iterations=iterations,
        cg_iterations=cg_total,
        final_gradient_norm=gnorm,
        final_energy=energy,
        energy_history=history,
    )


def extract_radial_slice(sol: PlanarSolution) -> RadialSlice:
    """Sample the physical fields along the positive x-axis.

    Radii are the positive x node coordinates.  The smooth parts are
    bilinearly interpolated to ``y = 0`` between the two straddling node
    rows (or taken directly if a row sits on the axis) and the singular
    background is added analytically, so the slice is second-order accurate
    even close to the origin.
    """
    if not sol.converged:
        raise ValueError("radial slice requires a converged solution")
    coords = sol.grid.coords
    pos = coords > 0.0
    r = coords[pos]

    on_axis = np.flatnonzero(coords == 0.0)
    if on_axis.size:
        P1 = sol.P1[pos, on_axis[0]]
        P2 = sol.P2[pos, on_axis[0]]
    else:
        j = int(np.searchsorted(coords, 0.0)) - 1
        y0, y1 = coords[j], coords[j + 1]
        wlo = y1 / (y1 - y0)
        whi = 1.0 - wlo
        P1 = wlo * sol.P1[pos, j] + whi * sol.P1[pos, j + 1]
        P2 = wlo * sol.P2[pos, j] + whi * sol.P2[pos, j + 1]

    bg = background(sol.params)
    r2 = r * r
    return RadialSlice(r=r, u1=bg.u0_1(r2) + P1, u2=bg.u0_2(r2) + P2)
