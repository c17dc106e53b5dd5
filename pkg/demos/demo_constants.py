"""Walk through the closed-form algebra behind the solvers.

Every number the solvers rely on is a rational or quadratic-surd function
of the rank N: the coupling matrix, its triangular factors, the symmetrized
matrix and its spectrum, and the decay/flux constants.  This script prints
them for a few ranks and spot-checks the identities that the test suite
verifies for every rank up to 64.
"""

import numpy as np

from vortexlab import (
    ModelParams,
    component_flux_targets,
    coupling_matrix,
    flux_targets,
    spectral_constants,
)

for N in (2, 3, 5):
    params = ModelParams(N=N, n1=1, n2=1)
    cd = coupling_matrix(params)
    sc = spectral_constants(cd)

    print(f"=== rank N = {N} ===")
    print(f"alpha = {cd.alpha:.6f}  beta = {cd.beta:.6f}  (alpha + beta = {cd.alpha + cd.beta:.6f})")
    print(f"A =\n{cd.A}")
    print(f"L @ R - A (should vanish):\n{cd.L @ cd.R - cd.A}")
    print(f"gamma = {cd.gamma:.6f}  (always strictly between 1/2 and 2/3)")
    print(f"M = B @ A =\n{cd.M}")
    print(f"eigenvalues of M: {sc.lambda1:.6f}, {sc.lambda2:.6f}  -> lambda0 = {sc.lambda0:.6f}")
    print(f"eigenvalues of D = M @ inv(B): {sc.lambda3:.6f}, {sc.lambda4:.6f}  (always N and 1/2)")
    print(f"decay/flux constants: m = {sc.m:.6f}  p = {sc.p:.6f}  q = {sc.q:.6f}")

    t1, t2 = flux_targets(params, sc)
    comp = component_flux_targets(params, cd)
    print(f"flux targets for (n1, n2) = (1, 1): {t1:.6f}, {t2:.6f}")
    print(f"exact component fluxes of (E1, E2): {comp[0]:.6f}, {comp[1]:.6f}")
    print(f"  (as multiples of -4*pi: {comp[0] / (-4 * np.pi):.6f}, {comp[1] / (-4 * np.pi):.6f})")
    print()
