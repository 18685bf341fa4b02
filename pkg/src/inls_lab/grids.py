"""Radial grids, quadrature, and differential operators.

Everything downstream works with radial profiles u(r) sampled on a uniform
grid over [0, r_max].  The quadrature weights carry the full N-dimensional
surface measure, so ``integrate`` realizes integrals over R^N of radial
integrands: sum(w_i * f(r_i)) with w_i = omega_{N-1} r_i^{N-1} dr times the
trapezoid end coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "Params",
    "RegimeKind",
    "RegimeClass",
    "RadialGrid",
    "RadialField",
    "classify",
    "make_grid",
    "integrate",
    "gradient_sq_norm",
    "laplacian",
    "sphere_area",
]

# relative tolerance used to detect exact critical exponents from floats
_CRIT_RTOL = 1e-12


def sphere_area(N: int) -> float:
    """Surface area of the unit sphere in R^N: 2 pi^{N/2} / Gamma(N/2)."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


@dataclass(frozen=True)
class Params:
    """The triple (N, b, p): dimension, weight exponent, nonlinearity power."""

    N: int
    b: float
    p: float

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"dimension N must be >= 2, got {self.N}")
        if not self.b > 0:
            raise ValueError(f"weight exponent b must be > 0, got {self.b}")
        if not self.p > 1:
            raise ValueError(f"nonlinearity power p must be > 1, got {self.p}")

    @property
    def gamma_c(self) -> float:
        """Critical Sobolev index N/2 - (2+b)/(p-1) of the scaling symmetry."""
        return self.N / 2.0 - (2.0 + self.b) / (self.p - 1.0)

    @property
    def sigma_c(self) -> float:
        """(1 - gamma_c)/gamma_c; +inf at the mass-critical point gamma_c = 0."""
        g = self.gamma_c
        if abs(g) <= _CRIT_RTOL:
            return math.inf
        return (1.0 - g) / g

    @property
    def mass_critical_p(self) -> float:
        return (self.N + 4.0 + 2.0 * self.b) / self.N

    @property
    def energy_critical_p(self) -> float:
        if self.N <= 2:
            return math.inf
        return (self.N + 2.0 + 2.0 * self.b) / (self.N - 2.0)

    @property
    def lwp_lower_p(self) -> float:
        """Lower admissibility bound 1 + 2b/(N-1) for radial well-posedness."""
        return 1.0 + 2.0 * self.b / (self.N - 1.0)


class RegimeKind(Enum):
    MASS_SUBCRITICAL = "MassSubcritical"
    MASS_CRITICAL = "MassCritical"
    INTERCRITICAL = "Intercritical"
    ENERGY_CRITICAL = "EnergyCritical"
    ENERGY_SUPERCRITICAL = "EnergySupercritical"


@dataclass(frozen=True)
class RegimeClass:
    kind: RegimeKind
    lwp_lower_ok: bool        # p >= 1 + 2b/(N-1)
    scattering_range_ok: bool  # p > (N+4)/N + 2b/(N-1)


def _isclose(a: float, b: float) -> bool:
    return abs(a - b) <= _CRIT_RTOL * max(1.0, abs(a), abs(b))


def classify(params: Params) -> RegimeClass:
    """Classify (N, b, p) by the sign of gamma_c; total on valid Params."""
    p = params.p
    p_mass = params.mass_critical_p
    p_energy = params.energy_critical_p
    if _isclose(p, p_mass):
        kind = RegimeKind.MASS_CRITICAL
    elif math.isfinite(p_energy) and _isclose(p, p_energy):
        kind = RegimeKind.ENERGY_CRITICAL
    elif p < p_mass:
        kind = RegimeKind.MASS_SUBCRITICAL
    elif p < p_energy:
        kind = RegimeKind.INTERCRITICAL
    else:
        kind = RegimeKind.ENERGY_SUPERCRITICAL
    lwp_ok = p >= params.lwp_lower_p or _isclose(p, params.lwp_lower_p)
    scat_ok = p > (params.N + 4.0) / params.N + 2.0 * params.b / (params.N - 1.0)
    return RegimeClass(kind=kind, lwp_lower_ok=lwp_ok, scattering_range_ok=scat_ok)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid on [0, r_max] with N-dimensional quadrature weights."""

    N: int
    r: np.ndarray = field(repr=False)
    dr: float
    r_max: float
    weights: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.r)


def make_grid(r_max: float, dr: float, N: int) -> RadialGrid:
    """Build the uniform grid; weights = omega_{N-1} r^{N-1} x trapezoid coeffs.

    weights[0] is zero for N >= 2 (the r^{N-1} measure vanishes at the origin).
    """
    if r_max <= 0 or dr <= 0:
        raise ValueError("r_max and dr must be positive")
    if N < 2:
        raise ValueError("N must be >= 2")
    n = int(round(r_max / dr)) + 1
    if n < 3:
        raise ValueError("grid needs at least 3 points")
    r = np.linspace(0.0, r_max, n)
    dr_actual = r_max / (n - 1)
    coeff = np.ones(n)
    coeff[0] = coeff[-1] = 0.5
    weights = sphere_area(N) * r ** (N - 1) * coeff * dr_actual
    r.setflags(write=False)
    weights.setflags(write=False)
    return RadialGrid(N=N, r=r, dr=dr_actual, r_max=r_max, weights=weights)


@dataclass(frozen=True)
class RadialField:
    """Complex-valued radial profile sampled on a RadialGrid."""

    grid: RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1 or len(v) != len(self.grid):
            raise ValueError(
                f"field has {v.shape} samples, grid has {len(self.grid)} nodes"
            )
        if not np.all(np.isfinite(v.view(float) if np.iscomplexobj(v) else v)):
            raise ValueError("field contains non-finite samples")
        object.__setattr__(self, "values", v)

    def __mul__(self, c) -> "RadialField":
        return RadialField(self.grid, c * self.values)

    __rmul__ = __mul__

    def __add__(self, other: "RadialField") -> "RadialField":
        if other.grid is not self.grid and not np.array_equal(other.grid.r, self.grid.r):
            raise ValueError("fields live on different grids")
        return RadialField(self.grid, self.values + other.values)

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0))


def _values_and_grid(f, grid: RadialGrid | None):
    if isinstance(f, RadialField):
        return f.values, f.grid
    if grid is None:
        raise ValueError("plain samples require an explicit grid")
    v = np.asarray(f)
    if len(v) != len(grid):
        raise ValueError("sample count does not match grid")
    return v, grid


def integrate(f, grid: RadialGrid | None = None) -> float:
    """Integral over R^N of a radial integrand sampled on the grid.

    Exact for piecewise-linear radial integrands up to trapezoid error in the
    weight; second-order in dr for smooth integrands.
    """
    v, g = _values_and_grid(f, grid)
    if not np.all(np.isfinite(v.view(float) if np.iscomplexobj(v) else v)):
        raise ValueError("non-finite sample in integrand")
    return float(np.real(np.dot(g.weights, v)))


def radial_derivative(f, grid: RadialGrid | None = None) -> np.ndarray:
    """d/dr by centered differences, second-order one-sided at the endpoints."""
    v, g = _values_and_grid(f, grid)
    return np.gradient(v, g.dr)


def gradient_sq_norm(u: RadialField) -> float:
    """The squared L^2 norm of the gradient, int |d_r u|^2 over R^N."""
    if len(u.grid) < 3:
        raise ValueError("gradient needs a grid with at least 3 points")
    du = radial_derivative(u)
    return integrate(np.abs(du) ** 2, u.grid)


def laplacian(u: RadialField, N: int | None = None) -> RadialField:
    """Radial Laplacian d_rr + (N-1)/r d_r, second-order stencil.

    At r = 0 the removable singularity is handled by the limit
    lap u(0) = N u''(0); a homogeneous Dirichlet ghost closes the stencil
    at r_max.
    """
    g = u.grid
    if N is None:
        N = g.N
    v = u.values
    dr = g.dr
    n = len(v)
    out = np.zeros(n, dtype=v.dtype)
    # interior
    vm, v0, vp = v[:-2], v[1:-1], v[2:]
    r_int = g.r[1:-1]
    out[1:-1] = (vp - 2.0 * v0 + vm) / dr**2 + (N - 1) / r_int * (vp - vm) / (2.0 * dr)
    # origin: u'(0) = 0 gives u''(0) ~ 2 (u_1 - u_0)/dr^2
    out[0] = N * 2.0 * (v[1] - v[0]) / dr**2
    # r_max: Dirichlet ghost value 0
    out[-1] = (0.0 - 2.0 * v[-1] + v[-2]) / dr**2 + (N - 1) / g.r[-1] * (0.0 - v[-2]) / (
        2.0 * dr
    )
    return RadialField(g, out)
