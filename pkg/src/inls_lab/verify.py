"""Self-contained check suites behind the `verify` command.

Each check row carries the equation or lemma tag it exercises, a pass flag,
the measured value, and the tolerance it was held to.  Suites are
deterministic: fixed seeds, fixed iteration order, no wall-clock inputs.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .grids import Params, RadialField, make_grid
from . import exponents as expo
from . import inequalities as ineq
from . import virial as vir
from .functionals import energy

__all__ = ["CheckRow", "suite_exponents", "suite_inequalities", "suite_virial",
           "run_suites", "SUITES"]


@dataclass(frozen=True)
class CheckRow:
    name: str
    paper_ref: str
    passed: bool
    value: float
    tolerance: float

    def as_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _row(name, ref, value, tol, ok=None) -> CheckRow:
    if ok is None:
        ok = abs(value) <= tol
    return CheckRow(name=name, paper_ref=ref, passed=bool(ok),
                    value=float(value), tolerance=float(tol))


# ---------------------------------------------------------------------------
# exponents
# ---------------------------------------------------------------------------

def suite_exponents() -> list[CheckRow]:
    rows = []
    q, r, k, m = expo.scattering_exponents(Fraction(2), 3)
    worked = (q, r, k, m) == (Fraction(8, 3), Fraction(4), Fraction(8),
                              Fraction(8, 5))
    rows.append(_row("worked_triple_qrkm", "Eq. (4.23)", 0.0 if worked else 1.0,
                     0.0, ok=worked))
    l, d = expo.auxiliary_exponents(Fraction(2), 3)
    worked2 = (l, d) == (Fraction(12, 5), Fraction(1, 2))
    rows.append(_row("worked_triple_l_delta", "Eq. (4.28)",
                     0.0 if worked2 else 1.0, 0.0, ok=worked2))
    rows.append(_row("admissible_endpoint", "Def 3.1", 0.0, 0.0,
                     ok=expo.admissible_check(None, Fraction(2), 3)))

    rng = random.Random(20240803)
    failures = 0
    n_samples = 1000
    for _ in range(n_samples):
        N = rng.randint(2, 6)
        lo, hi = expo.scattering_alpha_window(N)
        if hi is None:
            alpha = lo + Fraction(rng.randint(1, 2000), rng.randint(1, 200))
        else:
            alpha = lo + (hi - lo) * Fraction(rng.randint(1, 999), 1000)
        try:
            qq, rr, kk, mm = expo.scattering_exponents(alpha, N)
            ll, dd = expo.auxiliary_exponents(alpha, N)
            ok = (
                1 / kk + 1 / mm == 2 / qq
                and kk > qq / 2
                and expo.admissible_check(qq, rr, N)
                and expo.admissible_check(kk, ll, N)
                and Fraction(0) < dd < Fraction(1)
            )
        except (ValueError, AssertionError):
            ok = False
        failures += 0 if ok else 1
    rows.append(_row("rational_sweep_1000", "Eq. (4.1); Def 3.1",
                     float(failures), 0.0, ok=failures == 0))

    a, b = expo.morawetz_beta(Params(3, 1, 4), "N-1")
    rows.append(_row("morawetz_(3,1,4)", "Eq. (4.18); Eq. (4.22)",
                     0.0 if (a, b) == (Fraction(2), Fraction(1, 3)) else 1.0,
                     0.0, ok=(a, b) == (Fraction(2), Fraction(1, 3))))
    a2, b2 = expo.morawetz_beta(Params(2, 1, 6), "N-1")
    rows.append(_row("morawetz_(2,1,6)", "Eq. (4.18)",
                     0.0 if (a2, b2) == (Fraction(3), Fraction(2, 5)) else 1.0,
                     0.0, ok=(a2, b2) == (Fraction(3), Fraction(2, 5))))
    beta_ok = True
    for i in range(1, 40):
        pp = 10 / 3 + i * 0.4
        try:
            _, bb = expo.morawetz_beta(Params(3, 1, pp), "N-1")
            beta_ok = beta_ok and Fraction(0) < bb < Fraction(1)
        except ValueError:
            pass
    rows.append(_row("beta_below_one_sweep", "Eq. (4.18)", 0.0, 0.0, ok=beta_ok))

    rep = expo.dispersive_n_feasible(Fraction(2), 3)
    ok = rep.feasible and rep.n is None and rep.theta == Fraction(3, 5)
    rows.append(_row("dispersive_choice_(2,3)", "Eq. (4.32); Eq. (4.33)",
                     0.0 if ok else 1.0, 0.0, ok=ok))
    rep_b = expo.dispersive_n_feasible(Fraction(4, 3), 3)
    rows.append(_row("dispersive_boundary_excluded", "Eq. (4.32)",
                     0.0 if not rep_b.feasible else 1.0, 0.0,
                     ok=not rep_b.feasible))
    return rows


# ---------------------------------------------------------------------------
# inequalities
# ---------------------------------------------------------------------------

def suite_inequalities() -> list[CheckRow]:
    rows = []
    th = ineq.interpolation_theta(Params(3, 1, 4))
    rows.append(_row("interpolation_theta_(3,1,4)", "Lemma 2.4", th - 0.6, 1e-15))

    rng = random.Random(7121)
    bad = 0
    for _ in range(100):
        N = rng.randint(3, 6)
        # dyadic rationals survive the float round trip exactly
        b = Fraction(rng.randint(1, 64), 2 ** rng.randint(0, 4))
        lowp = 1 + 2 * b / (N - 1)
        highp = (2 * N + 2 * b) / (N - 2) - 1
        t = Fraction(rng.randint(1, 255), 256)
        p = lowp + (highp - lowp) * t
        try:
            ineq.interpolation_theta(Params(N, float(b), float(p)))
        except (ValueError, AssertionError):
            bad += 1
    rows.append(_row("interpolation_identities_random", "Lemma 2.4",
                     float(bad), 0.0, ok=bad == 0))

    g = make_grid(8.0, 1e-3, 3)
    f = RadialField(g, np.exp(-g.r**2))
    val = ineq.radial_sobolev_21(f)
    ref = (1 / math.sqrt(2)) * math.exp(-0.5) / (
        (1.5 * math.pi * math.sqrt(math.pi / 2)) ** 0.25
        * ((math.pi / 2) ** 1.5) ** 0.25
    )
    rows.append(_row("radial_sobolev_21_gaussian", "Eq. (2.1)", val - ref, 1e-4))
    rows.append(_row("radial_sobolev_210_s1_matches", "Eq. (2.10)",
                     ineq.radial_sobolev_210(f, 1.0) - ineq.radial_sobolev_23(f),
                     1e-15))
    rows.append(_row("radial_sobolev_210_s_half_matches", "Eq. (2.10)",
                     ineq.radial_sobolev_210(f, 0.5) - ineq.radial_sobolev_21(f),
                     1e-15))

    hr = ineq.hardy_ratio(f, 2.0)
    rows.append(_row("hardy_gaussian_below_bound", "Eq. (3.4)", hr, 2.0 + 1e-6,
                     ok=hr <= 2.0 + 1e-6))

    pairs = ineq.divergence_witness(Params(2, 2, 2), [8, 16, 32, 64])
    slope = ineq.witness_slope(pairs)
    rows.append(_row("divergence_witness_slope", "Lemma 2.5",
                     (slope - 1.5) / 1.5, 0.05))
    mono = all(pairs[i][1] < pairs[i + 1][1] for i in range(len(pairs) - 1))
    rows.append(_row("divergence_witness_monotone", "Lemma 2.5", 0.0, 0.0,
                     ok=mono))
    return rows


# ---------------------------------------------------------------------------
# virial
# ---------------------------------------------------------------------------

def suite_virial() -> list[CheckRow]:
    rows = []
    pr = Params(3, 1, 3)
    bad = 0
    for R in (1.0, 2.0, 4.0, 8.0):
        g = make_grid(4.0 * R, 4.0 * R / 99999, 3)
        try:
            vir.build_zeta_theta_phi(R, g)
            vir.build_vartheta_psi(R, g)
            vir.psi12(R, pr, g)
        except AssertionError:
            bad += 1
    rows.append(_row("cutoff_invariants_R_sweep", "Eq. (4.8); Eq. (5.1); Eq. (5.5)",
                     float(bad), 0.0, ok=bad == 0))

    sups = []
    for R in (1.0, 2.0, 4.0):
        g = make_grid(4.0 * R, 4.0 * R / 99999, 3)
        sups.append(float(np.abs(vir.build_zeta_theta_phi(R, g).bilap).max()))
    fit = float(np.polyfit(np.log([1.0, 2.0, 4.0]), np.log(sups), 1)[0])
    rows.append(_row("bilaplacian_R_scaling", "Lemma 4.4", (fit + 2.0) / 2.0,
                     0.05))

    v_r1 = float(vir.vartheta(np.array([vir._R1]))[0])
    ref = 2.0 * (1 + 5 ** -0.25 - 5 ** -1.25)
    rows.append(_row("vartheta_junction_value", "Eq. (5.1)", v_r1 - ref, 1e-12))

    sups52 = [vir.lemma52_check(R, pr) for R in (1.0, 2.0, 4.0, 8.0)]
    spread = (max(sups52) - min(sups52)) / max(sups52)
    rows.append(_row("lemma52_R_independence", "Lemma 5.2 / Eq. (5.4)", spread,
                     0.10))

    ok_small, margin = vir.lemma53_check(1.0, pr, 1e-3)
    rows.append(_row("lemma53_small_eps", "Lemma 5.3 / Eq. (5.6)", margin, 0.0,
                     ok=ok_small))
    ok_large, _ = vir.lemma53_check(1.0, pr, 10.0)
    rows.append(_row("lemma53_large_eps_fails", "Lemma 5.3", 0.0, 0.0,
                     ok=not ok_large))

    g = make_grid(8.0, 1e-3, 3)
    u = RadialField(
        g,
        np.exp(-g.r**2) * (1 + 0.3 * np.sin(3 * g.r))
        + 0.2j * np.exp(-0.5 * (g.r - 2) ** 2),
    )
    cut = vir.quadratic_cutoff(g)
    rhs = vir.virial_rhs(u, pr, cut)
    e16 = 16.0 * energy(u, pr)
    rows.append(_row("quadratic_equals_16E_mass_critical", "Eq. (1.9)",
                     (rhs - e16) / abs(e16), 1e-10))
    return rows


SUITES = {
    "exponents": suite_exponents,
    "inequalities": suite_inequalities,
    "virial": suite_virial,
}


def run_suites(which: str = "all") -> dict:
    """Run the named suite (or all of them) and assemble the JSON report."""
    names = list(SUITES) if which == "all" else [which]
    checks = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from "
                             f"{sorted(SUITES)} or 'all'")
        checks.extend(SUITES[name]())
    return {
        "suite": which,
        "checks": [c.as_json() for c in checks],
        "all_pass": all(c.passed for c in checks),
    }
