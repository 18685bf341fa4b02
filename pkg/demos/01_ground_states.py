# Ground states of the stationary equation  -Q'' - (N-1)/r Q' + Q = r^b Q^p
# by shooting, with the algebraic identities any true solution must satisfy.
#
# With b > 0 the nonlinear coefficient vanishes at the origin, so the profile
# *rises* from Q(0), peaks at some r* > 0, and then decays like e^{-r}.

import math

import numpy as np

from inls_lab import Params, gradient_sq_norm, mass, shoot
from inls_lab.functionals import (
    c_opt_closed_form,
    energy,
    pohozaev_residuals,
    potential,
    weinstein,
)

for N, b, p in [(3, 1.0, 4.0), (2, 1.0, 4.0), (3, 1.0, 3.0)]:
    params = Params(N, b, p)
    gs = shoot(params)
    Q = gs.profile
    r1, r2 = pohozaev_residuals(Q, params)
    q = np.real(Q.values)
    r_peak = Q.grid.r[np.argmax(q)]

    print(f"--- (N, b, p) = ({N}, {b:g}, {p:g}) ---")
    print(f"Q(0) = {gs.shoot_value:.10f}, peak {q.max():.6f} at r = {r_peak:.3f}")
    print(f"ODE residual {gs.ode_residual:.2e}, decay rate {gs.decay_rate:.4f}")
    print(f"Pohozaev residuals: {r1:.2e}, {r2:.2e}")
    ratio = gradient_sq_norm(Q) / mass(Q)
    pred = (N * (p - 1) - 2 * b) / (4 + 2 * b - (N - 2) * (p - 1))
    print(f"grad_sq/mass = {ratio:.8f}  (closed form {pred:.8f})")
    print(f"E(Q) = {energy(Q, params):.6f}, potential = {potential(Q, params):.6f}")
    if math.isfinite(params.sigma_c):
        w = weinstein(Q, params)
        c = c_opt_closed_form(
            (math.sqrt(gradient_sq_norm(Q)), math.sqrt(mass(Q))), params
        )
        print(f"sharp GN constant: weinstein {w:.8e} vs closed form {c:.8e}")
    else:
        # mass-critical: the ground state has zero energy
        print(f"mass-critical: E(Q)/grad_sq = "
              f"{energy(Q, params) / gradient_sq_norm(Q):.2e} (should be ~0)")
    print()
