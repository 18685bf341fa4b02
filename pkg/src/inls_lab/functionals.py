"""Conserved quantities, the Weinstein quotient, and dichotomy thresholds.

The weighted Gagliardo-Nirenberg inequality

    int r^b |f|^{p+1}  <=  C (||grad f||^2)^{A/2} (||f||^2)^{B/2}

with A = (N(p-1)-2b)/2 and B = (4+2b-(N-2)(p-1))/2 controls everything here:
its sharp constant is the supremum of the Weinstein quotient, attained at the
ground state Q, and the global-existence/blow-up dichotomy compares scale
invariant products of a datum against those of Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grids import (
    Params,
    RadialField,
    RegimeKind,
    classify,
    gradient_sq_norm,
    integrate,
)

__all__ = [
    "Exponents",
    "Verdict",
    "ThresholdReport",
    "mass",
    "potential",
    "energy",
    "weinstein",
    "pohozaev_residuals",
    "c_opt_closed_form",
    "coercivity_F",
    "coercivity_G",
    "coercivity_delta",
    "coercivity_gap",
    "threshold_report",
]


@dataclass(frozen=True)
class Exponents:
    """Exponent bookkeeping for (N, b, p): gamma_c, sigma_c, and the GN pair A, B."""

    gamma_c: float
    sigma_c: float  # +inf at mass-critical parameters
    A: float
    B: float

    @classmethod
    def from_params(cls, params: Params) -> "Exponents":
        N, b, p = params.N, params.b, params.p
        A = (N * (p - 1.0) - 2.0 * b) / 2.0
        B = (4.0 + 2.0 * b - (N - 2.0) * (p - 1.0)) / 2.0
        return cls(gamma_c=params.gamma_c, sigma_c=params.sigma_c, A=A, B=B)


def mass(u: RadialField) -> float:
    """M(u) = ||u||_{L^2}^2."""
    return integrate(np.abs(u.values) ** 2, u.grid)


def potential(u: RadialField, params: Params) -> float:
    """The potential term int r^b |u|^{p+1}."""
    r = u.grid.r
    return integrate(r**params.b * np.abs(u.values) ** (params.p + 1.0), u.grid)


def energy(u: RadialField, params: Params) -> float:
    """E(u) = 1/2 ||grad u||^2 - potential(u)/(p+1); conserved by the flow."""
    return 0.5 * gradient_sq_norm(u) - potential(u, params) / (params.p + 1.0)


def weinstein(u: RadialField, params: Params) -> float:
    """Scale-invariant quotient potential / [(||grad u||^2)^{A/2} mass^{B/2}]."""
    if u.is_zero:
        raise ValueError("Weinstein quotient is undefined for the zero field")
    ex = Exponents.from_params(params)
    g = gradient_sq_norm(u)
    m = mass(u)
    return potential(u, params) / (g ** (ex.A / 2.0) * m ** (ex.B / 2.0))


def pohozaev_residuals(Q: RadialField, params: Params) -> tuple[float, float]:
    """Relative residuals of the two identities tying ||grad Q||^2 to ||Q||^2
    and to the potential term for solutions of the ground-state equation."""
    if Q.is_zero:
        raise ValueError("Pohozaev residuals are undefined for the zero field")
    N, b, p = params.N, params.b, params.p
    g = gradient_sq_norm(Q)
    m = mass(Q)
    pot = potential(Q, params)
    c_mass = (N * (p - 1.0) - 2.0 * b) / (4.0 + 2.0 * b - (N - 2.0) * (p - 1.0))
    c_pot = (N * (p - 1.0) - 2.0 * b) / (2.0 * (p + 1.0))
    res1 = abs(g - c_mass * m) / g
    res2 = abs(g - c_pot * pot) / g
    return res1, res2


def c_opt_closed_form(q_stats: tuple[float, float], params: Params) -> float:
    """Sharp GN constant from the ground-state norms:

        C_opt = 2(p+1)/(N(p-1)-2b) * (||grad Q|| ||Q||^{sigma_c})^{-(N(p-1)-4-2b)/2}

    Only defined off the mass-critical point (sigma_c finite).
    """
    if not math.isfinite(params.sigma_c):
        raise ValueError(
            "sigma_c is infinite at mass-critical parameters; "
            "use weinstein(Q) for the sharp constant there"
        )
    grad_norm, mass_norm = q_stats
    N, b, p = params.N, params.b, params.p
    pref = 2.0 * (p + 1.0) / (N * (p - 1.0) - 2.0 * b)
    expo = -(N * (p - 1.0) - 4.0 - 2.0 * b) / 2.0
    return pref * (grad_norm * mass_norm**params.sigma_c) ** expo


def coercivity_F(lam: float, params: Params, c_opt: float) -> float:
    """F(lambda) = lambda^2/2 - C_opt/(p+1) lambda^{(N(p-1)-2b)/2}."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    N, b, p = params.N, params.b, params.p
    return 0.5 * lam**2 - c_opt / (p + 1.0) * lam ** ((N * (p - 1.0) - 2.0 * b) / 2.0)


def coercivity_G(lam: float, params: Params) -> float:
    """G(lambda) = [(N(p-1)-2b) lambda^2 - 4 lambda^{(N(p-1)-2b)/2}] / (N(p-1)-4-2b).

    Normalized so G(1) = 1; strictly increasing on (0, 1), decreasing past its
    maximum.
    """
    if lam <= 0:
        raise ValueError("lambda must be > 0")
    N, b, p = params.N, params.b, params.p
    denom = N * (p - 1.0) - 4.0 - 2.0 * b
    if abs(denom) < 1e-14:
        raise ValueError("G degenerates at mass-critical parameters (denominator 0)")
    a = N * (p - 1.0) - 2.0 * b
    return (a * lam**2 - 4.0 * lam ** (a / 2.0)) / denom


def coercivity_delta(rho: float, params: Params) -> float:
    """The explicit coercivity-gap constant

        delta(rho) = (N(p-1)-2b) (1 - (1-rho)^e) / (2(p+1) (1-rho)^e),

    with e = (N(p-1)-4-2b)/2, valid below the (1-rho)-shrunk gradient threshold.
    """
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    N, b, p = params.N, params.b, params.p
    e = (N * (p - 1.0) - 4.0 - 2.0 * b) / 2.0
    shr = (1.0 - rho) ** e
    return (N * (p - 1.0) - 2.0 * b) * (1.0 - shr) / (2.0 * (p + 1.0) * shr)


def _ground_profile(ground) -> RadialField:
    return ground.profile if hasattr(ground, "profile") else ground


def coercivity_gap(f: RadialField, params: Params, ground, rho: float) -> float:
    """K(f) = ||grad f||^2 - (N(p-1)-2b)/(2(p+1)) potential(f).

    Requires the gradient product of f to sit strictly below (1-rho) times the
    ground state's; asserts K(f) >= delta(rho) * potential(f) and returns K(f).
    """
    Q = _ground_profile(ground)
    N, b, p = params.N, params.b, params.p
    sc = params.sigma_c
    if not math.isfinite(sc):
        raise ValueError("coercivity gap needs intercritical parameters")
    gQ = math.sqrt(gradient_sq_norm(Q)) * mass(Q) ** (sc / 2.0)
    if f.is_zero:
        g_f = m_f = 0.0
    else:
        g_f = math.sqrt(gradient_sq_norm(f))
        m_f = mass(f) ** (sc / 2.0)
    if not g_f * m_f < (1.0 - rho) * gQ:
        raise ValueError(
            "precondition (4.16) violated: "
            f"||grad f|| ||f||^sigma_c = {g_f * m_f:.6g} is not below "
            f"(1-rho) ||grad Q|| ||Q||^sigma_c = {(1.0 - rho) * gQ:.6g}"
        )
    pot = potential(f, params)
    K = gradient_sq_norm(f) - (N * (p - 1.0) - 2.0 * b) / (2.0 * (p + 1.0)) * pot
    if K < coercivity_delta(rho, params) * pot - 1e-12:
        raise AssertionError("coercivity gap fell below the closed-form delta(rho)")
    return K


class Verdict(Enum):
    GLOBAL_BRANCH = "GlobalBranch"
    BLOWUP_BRANCH = "BlowupBranch"
    ABOVE_THRESHOLD = "AboveThreshold"
    NEGATIVE_ENERGY = "NegativeEnergy"


@dataclass(frozen=True)
class ThresholdReport:
    me_product: float
    grad_product: float
    me_Q: float
    grad_Q: float
    verdict: Verdict


def threshold_report(u0: RadialField, params: Params, ground) -> ThresholdReport:
    """Classify a datum against the ground-state dichotomy thresholds.

    Intercritical: compares E M^{sigma_c} and ||grad u|| ||u||^{sigma_c}
    products against the ground state's.  Energy-critical: compares E and
    ||grad u|| directly against the algebraic profile W (sigma_c plays no
    role).  Mass-critical parameters admit only the negative-energy criterion;
    anything else raises.
    """
    Q = _ground_profile(ground)
    kind = classify(params).kind
    E0 = energy(u0, params)
    if kind == RegimeKind.MASS_CRITICAL:
        if E0 < 0:
            # the blow-up criterion at mass-critical parameters is E < 0 alone
            g0 = math.sqrt(gradient_sq_norm(u0))
            gq = math.sqrt(gradient_sq_norm(Q))
            return ThresholdReport(
                me_product=E0,
                grad_product=g0,
                me_Q=energy(Q, params),
                grad_Q=gq,
                verdict=Verdict.NEGATIVE_ENERGY,
            )
        raise ValueError(
            "dichotomy thresholds are undefined at mass-critical parameters "
            "(sigma_c = inf); only E(u0) < 0 classifies there"
        )
    if kind not in (RegimeKind.INTERCRITICAL, RegimeKind.ENERGY_CRITICAL):
        raise ValueError(f"threshold comparison needs intercritical or "
                         f"energy-critical parameters, got {kind.value}")

    if kind == RegimeKind.ENERGY_CRITICAL:
        me = E0
        gp = math.sqrt(gradient_sq_norm(u0))
        meQ = energy(Q, params)
        gQ = math.sqrt(gradient_sq_norm(Q))
    else:
        sc = params.sigma_c
        me = E0 * mass(u0) ** sc
        gp = math.sqrt(gradient_sq_norm(u0)) * mass(u0) ** (sc / 2.0)
        meQ = energy(Q, params) * mass(Q) ** sc
        gQ = math.sqrt(gradient_sq_norm(Q)) * mass(Q) ** (sc / 2.0)

    # E0 < 0 forces the gradient product above the ground state's (the
    # coercivity function is positive up to a root beyond it), so negative
    # energy data land in the blow-up branch through the same comparisons
    if me >= meQ and E0 >= 0:
        verdict = Verdict.ABOVE_THRESHOLD
    elif gp < gQ:
        verdict = Verdict.GLOBAL_BRANCH
    else:
        verdict = Verdict.BLOWUP_BRANCH
    return ThresholdReport(
        me_product=me, grad_product=gp, me_Q=meQ, grad_Q=gQ, verdict=verdict
    )
