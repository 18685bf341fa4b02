"""Exact rational arithmetic for Strichartz-type exponent relations.

Everything here runs on fractions.Fraction; no floating comparison anywhere.
A pair (q, r) is Schrodinger admissible when 2/q + N/r = N/2 with r in the
dimension-dependent range; q = infinity is encoded as the reciprocal 1/q = 0
(``q=None`` in signatures), which keeps the arithmetic total.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .grids import Params

__all__ = [
    "PairQR",
    "admissible_check",
    "scattering_exponents",
    "auxiliary_exponents",
    "morawetz_beta",
    "dispersive_n_feasible",
    "DispersiveReport",
    "scattering_alpha_window",
]

Rat = Fraction


def _inv(q: Fraction | None) -> Fraction:
    """Reciprocal with the q = infinity encoding 1/q = 0."""
    if q is None:
        return Fraction(0)
    if q <= 0:
        raise ValueError("exponents must be positive (or None for infinity)")
    return 1 / q


@dataclass(frozen=True)
class PairQR:
    """A candidate Strichartz pair; q may be None (infinity)."""

    q: Fraction | None
    r: Fraction

    def admissible(self, N: int) -> bool:
        return admissible_check(self.q, self.r, N)


def admissible_check(q: Fraction | None, r: Fraction | None, N: int) -> bool:
    """Exact check of 2/q + N/r = N/2 plus the r-range case split.

    r in [2, 2N/(N-2)] for N >= 3, [2, inf) for N = 2, [2, inf] for N = 1.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    qi, ri = _inv(q), _inv(r)
    if 2 * qi + N * ri != Fraction(N, 2):
        return False
    if N >= 3:
        return Fraction(N - 2, 2 * N) <= ri <= Fraction(1, 2)
    if N == 2:
        return Fraction(0) < ri <= Fraction(1, 2)
    return Fraction(0) <= ri <= Fraction(1, 2)


def scattering_alpha_window(N: int) -> tuple[Fraction, Fraction | None]:
    """The admissible window 4/N < alpha (< 4/(N-2) when N >= 3)."""
    lo = Fraction(4, N)
    hi = Fraction(4, N - 2) if N >= 3 else None
    return lo, hi


def _require_window(alpha: Fraction, N: int) -> None:
    lo, hi = scattering_alpha_window(N)
    if not alpha > lo:
        raise ValueError(f"alpha = {alpha} must exceed 4/N = {lo}")
    if hi is not None and not alpha < hi:
        raise ValueError(f"alpha = {alpha} must be below 4/(N-2) = {hi}")


def scattering_exponents(alpha: Fraction, N: int) -> tuple[Fraction, ...]:
    """The exponent quadruple (q, r, k, m) of the scattering argument:

        q = 4(a+2)/(Na),  r = a+2,  k = 2a(a+2)/(4-(N-2)a),
        m = 2a(a+2)/(Na^2+(N-2)a-4),

    verified to satisfy 1/k + 1/m = 2/q exactly, k > q/2, and (q, r)
    admissible.
    """
    alpha = Fraction(alpha)
    _require_window(alpha, N)
    q = 4 * (alpha + 2) / (N * alpha)
    r = alpha + 2
    k_den = 4 - (N - 2) * alpha
    if k_den <= 0:
        raise ValueError("k degenerates: 4 - (N-2) alpha must be positive")
    k = 2 * alpha * (alpha + 2) / k_den
    m_den = N * alpha**2 + (N - 2) * alpha - 4
    if m_den <= 0:
        raise ValueError("m degenerates: N alpha^2 + (N-2) alpha - 4 must be positive")
    m = 2 * alpha * (alpha + 2) / m_den
    assert 1 / k + 1 / m == 2 / q
    assert k > q / 2
    assert admissible_check(q, r, N)
    return q, r, k, m


def auxiliary_exponents(alpha: Fraction, N: int) -> tuple[Fraction, Fraction]:
    """The auxiliary pair (l, delta):

        l = 2 N a (a+2) / (N a^2 + 4(N-1) a - 8),  delta = (N a - 4)/(2 a),

    verified to satisfy the Sobolev relation 1/r = 1/l - delta/N (hence
    l <= r), delta in (0, 1), and (k, l) admissible.
    """
    alpha = Fraction(alpha)
    _, r, k, _ = scattering_exponents(alpha, N)
    l_den = N * alpha**2 + 4 * (N - 1) * alpha - 8
    if l_den <= 0:
        raise ValueError("l degenerates in the given window")
    l = 2 * N * alpha * (alpha + 2) / l_den
    delta = (N * alpha - 4) / (2 * alpha)
    # the fractional Sobolev embedding behind the linear-part estimate
    assert 1 / r == 1 / l - delta / N
    assert l <= r
    assert Fraction(0) < delta < Fraction(1)
    assert admissible_check(k, l, N)
    return l, delta


def morawetz_beta(params: Params, mode="N-1") -> tuple[Fraction, Fraction]:
    """Morawetz decay data (alpha, beta).

    mode selects which radial Sobolev exponent defines alpha:
    "N-1" gives alpha = p - 1 - 2b/(N-1), "N-2" gives p - 1 - 2b/(N-2),
    and a Fraction s in [1/2, 1] gives p - 1 - 2b/(N-2s).
    beta = max(1/3, 2/((N-1) alpha + 2)) < 1 always.
    """
    N = params.N
    b, p = Fraction(params.b), Fraction(params.p)
    if mode == "N-1":
        denom = Fraction(N - 1)
    elif mode == "N-2":
        if N < 3:
            raise ValueError('mode "N-2" requires N >= 3')
        denom = Fraction(N - 2)
    else:
        s = Fraction(mode)
        if not Fraction(1, 2) <= s <= 1:
            raise ValueError("s must lie in [1/2, 1]")
        denom = Fraction(N) - 2 * s
    alpha = p - 1 - 2 * b / denom
    if alpha <= 0:
        raise ValueError(f"alpha = {alpha} must be positive for this weight mode")
    beta = max(Fraction(1, 3), Fraction(2) / ((N - 1) * alpha + 2))
    assert Fraction(0) < beta < Fraction(1)
    return alpha, beta


@dataclass(frozen=True)
class DispersiveReport:
    """Outcome of the dispersive-exponent feasibility check."""

    feasible: bool
    n: Fraction | None = None        # None encodes n = infinity (1/n = 0)
    theta: Fraction | None = None
    violations: tuple[str, ...] = field(default=())


def dispersive_n_feasible(alpha: Fraction, N: int) -> DispersiveReport:
    """Feasibility of the dispersive interpolation exponent n.

    The choice is 1/n = 0 for alpha > 1 and 1/n = (1-alpha)/2 for alpha <= 1
    (the latter checked through the cubic factorization
    (a+1)(N a^2 + (N-2) a - 4) > 0); theta solves 1/r = theta/l + (1-theta)/n.
    Returns an infeasibility report listing violated constraints instead of
    raising when the constraints fail.
    """
    alpha = Fraction(alpha)
    if N < 3:
        return DispersiveReport(False, violations=("requires N >= 3",))
    lo, hi = scattering_alpha_window(N)
    if not alpha > lo:
        return DispersiveReport(
            False, violations=(f"alpha = {alpha} not above the window edge 4/N = {lo}",)
        )
    if hi is not None and not alpha < hi:
        return DispersiveReport(
            False, violations=(f"alpha = {alpha} not below 4/(N-2) = {hi}",)
        )

    n_inv = Fraction(0) if alpha > 1 else (1 - alpha) / 2
    violations = []
    # constraint set on 1/n: [0, 1/(alpha+2)) window
    if not (0 <= n_inv < 1 / (alpha + 2)):
        violations.append(f"1/n = {n_inv} outside [0, 1/(alpha+2))")
    lo_n = (1 - alpha) / 2
    hi_n = Fraction(N + 2 - (N - 2) * alpha, 2 * N)
    if not (lo_n <= n_inv <= hi_n):
        violations.append(f"1/n = {n_inv} outside [(1-alpha)/2, (N+2-(N-2)a)/(2N)]")
    cubic = (alpha + 1) * (N * alpha**2 + (N - 2) * alpha - 4)
    assert cubic == N * alpha**3 + 2 * (N - 1) * alpha**2 + (N - 6) * alpha - 4
    bound = Fraction((N - 2) * (alpha**2 + 3 * alpha) - 4, 2 * N * alpha * (alpha + 2))
    if not n_inv < bound:
        violations.append(
            f"1/n = {n_inv} not below ((N-2)(a^2+3a)-4)/(2Na(a+2)) = {bound}"
        )
    if alpha <= 1 and not cubic > 0:
        violations.append(f"cubic factorization (a+1)(Na^2+(N-2)a-4) = {cubic} <= 0")
    if violations:
        return DispersiveReport(False, violations=tuple(violations))

    _, r, _, _ = scattering_exponents(alpha, N)
    l, _ = auxiliary_exponents(alpha, N)
    theta = (1 / r - n_inv) / (1 / l - n_inv)
    assert Fraction(0) < theta <= 1
    n = None if n_inv == 0 else 1 / n_inv
    return DispersiveReport(True, n=n, theta=theta)
