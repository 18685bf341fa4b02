# The functional inequalities behind the dynamics, evaluated numerically:
# weighted Gagliardo-Nirenberg saturation, radial Sobolev ratios, Hardy,
# and the divergence witness below the admissible exponent range.

import math

import numpy as np

from inls_lab import Params, RadialField, gradient_sq_norm, make_grid, mass, shoot
from inls_lab.functionals import c_opt_closed_form
from inls_lab.inequalities import (
    divergence_witness,
    gn_check,
    hardy_ratio,
    interpolation_theta,
    radial_sobolev_21,
    radial_sobolev_210,
    radial_sobolev_23,
    witness_slope,
)

params = Params(3, 1.0, 4.0)
gs = shoot(params)
c_opt = c_opt_closed_form(
    (math.sqrt(gradient_sq_norm(gs.profile)), math.sqrt(mass(gs.profile))),
    params,
)

print("Gagliardo-Nirenberg saturation ratios (1 only at the ground state):")
print(f"  ground state Q : {gn_check(gs.profile, params, c_opt):.6f}")
g = gs.profile.grid
rng = np.random.default_rng(1)
for k in range(5):
    vals = rng.uniform(0.2, 2.0) * np.exp(
        -((g.r - rng.uniform(0, 4)) ** 2) / rng.uniform(0.5, 2.0)
    )
    print(f"  random bump #{k}: {gn_check(RadialField(g, vals), params, c_opt):.6f}")

gauss = RadialField(make_grid(8.0, 1e-3, 3), np.exp(-make_grid(8.0, 1e-3, 3).r ** 2))
print("\nradial Sobolev ratios for a Gaussian (N = 3):")
print(f"  half-half form : {radial_sobolev_21(gauss):.6f}")
print(f"  gradient-only  : {radial_sobolev_23(gauss):.6f}")
print(f"  s = 0.75 blend : {radial_sobolev_210(gauss, 0.75):.6f}")

print(f"\nHardy ratio (bound r/(N-r) = 2): {hardy_ratio(gauss, 2.0):.6f}")
print(f"interpolation weight theta at (3,1,4): {interpolation_theta(params):.4f}")

print("\ndivergence witness at (N, b, p) = (2, 2, 2): shifted-bump family")
pairs = divergence_witness(Params(2, 2.0, 2.0), [8, 16, 32, 64])
for k, ratio in pairs:
    print(f"  k = {k:4g}: quotient = {ratio:.4e}")
print(f"log-log slope {witness_slope(pairs):.4f}  (predicted 3/2: the "
      f"quotient diverges, so no GN inequality can hold there)")
