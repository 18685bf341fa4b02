import numpy as np
import pytest

from inls_lab.grids import Params, RadialField, gradient_sq_norm, make_grid
from inls_lab.functionals import energy, potential
from inls_lab.virial import (
    blowup_bound_check,
    build_vartheta_psi,
    build_zeta_theta_phi,
    coercivity_gap_58,
    fit_envelope_constant,
    lemma52_check,
    lemma53_check,
    psi12,
    psi2_closed_form,
    quadratic_cutoff,
    vartheta,
    virial_dynamic_check,
    virial_rhs,
    _R1,
)

from conftest import P313, P314, P425


class TestCutoffPhi:
    def test_quadratic_inside(self):
        g = make_grid(8.0, 1e-3, 3)
        prof = build_zeta_theta_phi(2.0, g)
        inside = g.r <= 2.0
        assert np.abs(prof.phi[inside] - g.r[inside] ** 2).max() == 0.0

    def test_flat_beyond(self):
        g = make_grid(8.0, 1e-3, 3)
        prof = build_zeta_theta_phi(2.0, g)
        far = g.r >= 4.0
        assert np.abs(prof.d2phi[far]).max() == 0.0
        assert prof.lap[far].min() >= 0.0

    @pytest.mark.parametrize("R", [1.0, 2.0, 4.0, 8.0])
    def test_invariants_on_dense_grids(self, R):
        g = make_grid(4.0 * R, 4.0 * R / 99999, 3)
        prof = build_zeta_theta_phi(R, g)
        assert np.all(prof.d2phi <= 2.0 + 1e-12)
        assert np.all(prof.d2phi >= -1e-12)
        assert np.all(2.0 - prof.phi_over_r() >= -1e-12)
        assert np.all(2.0 * g.N - prof.lap >= -1e-12)

    def test_bilaplacian_scaling(self):
        sups = []
        Rs = (1.0, 2.0, 4.0, 8.0)
        for R in Rs:
            g = make_grid(4.0 * R, 4.0 * R / 99999, 3)
            sups.append(np.abs(build_zeta_theta_phi(R, g).bilap).max())
        slope = np.polyfit(np.log(Rs), np.log(sups), 1)[0]
        assert slope == pytest.approx(-2.0, rel=0.05)


class TestCutoffPsi:
    def test_vartheta_values(self):
        assert vartheta(np.array([1.0]))[0] == 2.0
        ref = 2.0 * (1.0 + 5.0**-0.25 - 5.0**-1.25)
        assert vartheta(np.array([_R1]))[0] == pytest.approx(ref, abs=1e-12)
        assert ref == pytest.approx(3.0700, abs=1e-4)

    @pytest.mark.parametrize("R", [1.0, 2.0, 4.0, 8.0])
    def test_invariants_on_dense_grids(self, R):
        g = make_grid(4.0 * R, 4.0 * R / 99999, 3)
        prof = build_vartheta_psi(R, g)
        assert np.all(prof.d2phi <= 2.0 + 1e-12)
        assert np.all(prof.phi_over_r() <= 2.0 + 1e-12)
        assert np.all(prof.lap <= 2.0 * g.N + 1e-12)


class TestPsi12:
    def test_zero_inside(self):
        g = make_grid(8.0, 1e-3, 3)
        psi1, psi2 = psi12(2.0, P313, g)
        inside = g.r <= 2.0
        assert np.abs(psi1[inside]).max() == 0.0
        assert np.abs(psi2[inside]).max() == 0.0

    def test_closed_form_midpoint(self):
        g = make_grid(8.0, 1e-3, 3)
        R = 2.0
        _, psi2 = psi12(R, P313, g)
        rho_mid = 1.0 + 0.5 * 5.0**-0.25
        i = int(np.argmin(np.abs(g.r - rho_mid * R)))
        ref = psi2_closed_form(g.r[i] / R, P313)
        assert psi2[i] == pytest.approx(float(ref), abs=1e-8)

    def test_psi1_lower_bounds(self):
        g = make_grid(8.0, 1e-3, 3)
        psi1, _ = psi12(2.0, P313, g)
        annulus = (g.r > 2.0) & (g.r <= _R1 * 2.0)
        assert psi1[annulus].min() >= 0.0
        assert psi1[g.r > _R1 * 2.0].min() >= 2.0

    def test_closed_form_limit_is_10pm1(self):
        rho = np.array([1.0 + 1e-6])
        lim = psi2_closed_form(rho, P313)[0] / (rho[0] - 1.0) ** 4
        assert lim == pytest.approx(10.0 * (P313.p - 1.0), rel=1e-5)

    def test_non_mass_critical_rejected(self):
        g = make_grid(8.0, 1e-2, 3)
        with pytest.raises(ValueError):
            psi12(2.0, P314, g)


class TestLemmaChecks:
    def test_lemma52_bounded_R_independent(self):
        sups = [lemma52_check(R, P313) for R in (1.0, 2.0, 4.0, 8.0)]
        assert all(np.isfinite(s) for s in sups)
        assert (max(sups) - min(sups)) / max(sups) < 0.10

    def test_lemma53_small_eps_holds(self):
        ok, margin = lemma53_check(1.0, P313, 1e-3)
        assert ok and margin >= 0.0

    def test_lemma53_large_eps_fails(self):
        ok, margin = lemma53_check(1.0, P313, 10.0)
        assert not ok and margin < 0.0


@pytest.fixture(scope="module")
def synthetic_state():
    g = make_grid(8.0, 1e-3, 3)
    vals = (
        np.exp(-g.r**2) * (1 + 0.3 * np.sin(3 * g.r))
        + 0.2j * np.exp(-0.5 * (g.r - 2) ** 2)
    )
    return RadialField(g, vals)


class TestVirialRHS:
    def test_quadratic_is_16E_mass_critical(self, synthetic_state):
        cut = quadratic_cutoff(synthetic_state.grid)
        rhs = virial_rhs(synthetic_state, P313, cut)
        assert rhs == pytest.approx(16.0 * energy(synthetic_state, P313),
                                    rel=1e-10)

    def test_quadratic_general_p(self, synthetic_state):
        cut = quadratic_cutoff(synthetic_state.grid)
        rhs = virial_rhs(synthetic_state, P314, cut)
        pred = 8.0 * gradient_sq_norm(synthetic_state) - (
            4 * 3 * 3 - 8
        ) / 5.0 * potential(synthetic_state, P314)
        assert rhs == pytest.approx(pred, rel=1e-10)

    def test_locality_matches_quadratic(self):
        g = make_grid(8.0, 1e-3, 3)
        t = g.r / 1.5
        vals = np.zeros(len(g))
        inside = t < 1
        vals[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
        u = RadialField(g, vals)
        prof = build_zeta_theta_phi(2.0, g)
        cut = quadratic_cutoff(g)
        assert virial_rhs(u, P314, prof) == pytest.approx(
            virial_rhs(u, P314, cut), rel=1e-10
        )


class TestDynamicCheck:
    def test_free_gaussian_quadratic(self, evo_grid):
        from inls_lab.evolution import StepperConfig, evolve

        u0 = RadialField(evo_grid, np.exp(-evo_grid.r**2).astype(complex))
        res = evolve(u0, P313,
                     StepperConfig(dt=2.5e-4, t_end=0.1, save_every=4,
                                   linear_only=True))
        dev = virial_dynamic_check(res.states, P313,
                                   quadratic_cutoff(evo_grid),
                                   linear_only=True)
        assert dev < 1e-2

    def test_half_Q_run(self, half_q_saved):
        cut = quadratic_cutoff(half_q_saved.states[0][1].grid)
        dev_1em3 = virial_dynamic_check(half_q_saved.states[::2], P314, cut)
        assert dev_1em3 < 2e-2
        dev_5em4 = virial_dynamic_check(half_q_saved.states, P314, cut)
        assert dev_5em4 < 1e-2

    def test_second_order_in_save_interval(self, free_phir_saved, evo_grid):
        cut = build_zeta_theta_phi(2.0, evo_grid)
        states = free_phir_saved.states
        dev_coarse = virial_dynamic_check(states[::4], P313, cut,
                                          linear_only=True)
        dev_fine = virial_dynamic_check(states[::2], P313, cut,
                                        linear_only=True)
        assert dev_coarse / dev_fine >= 3.5

    def test_zero_states(self, evo_grid):
        z = RadialField(evo_grid, np.zeros(len(evo_grid), dtype=complex))
        states = [(0.0, z), (0.01, z), (0.02, z)]
        dev = virial_dynamic_check(states, P313, quadratic_cutoff(evo_grid))
        assert dev == 0.0

    def test_too_few_states(self, evo_grid):
        z = RadialField(evo_grid, np.zeros(len(evo_grid), dtype=complex))
        with pytest.raises(ValueError):
            virial_dynamic_check([(0.0, z)], P313, quadratic_cutoff(evo_grid))


class TestBlowupEnvelope:
    def test_mass_critical_envelope(self, blowup_runs_mc):
        C = fit_envelope_constant(blowup_runs_mc[1.6].states, P313, 32.0, 0.1)
        for c in (1.2, 1.5):
            rows = blowup_bound_check(blowup_runs_mc[c].states, P313, 32.0,
                                      0.1, C)
            assert len(rows) > 10, c
            assert all(r.holds for r in rows), c

    def test_remainder_smaller_than_8E(self, blowup_runs_mc):
        from inls_lab.virial import _remainder_scale

        C = fit_envelope_constant(blowup_runs_mc[1.6].states, P313, 32.0, 0.1)
        E0 = energy(blowup_runs_mc[1.2].states[0][1], P313)
        remainder = C * _remainder_scale(P313, 32.0, 0.1, 0.0)
        # the sign mechanism: remainder below |8 E(u0)| forces V'' <= 8E < 0
        assert remainder < abs(8.0 * E0)
        rows = blowup_bound_check(blowup_runs_mc[1.2].states, P313, 32.0,
                                  0.1, C)
        assert all(r.Vpp_measured <= 16.0 * E0 + remainder + r.num_tol
                   for r in rows)

    def test_intercritical_envelope(self, blowup_runs_ic):
        C = fit_envelope_constant(blowup_runs_ic[1.6].states, P314, 32.0, 0.1)
        for c in (1.2, 1.5):
            rows = blowup_bound_check(blowup_runs_ic[c].states, P314, 32.0,
                                      0.1, C)
            assert len(rows) >= 1, c
            assert all(r.holds for r in rows), c

    def test_global_run_has_slack(self, half_q_saved):
        rows = blowup_bound_check(half_q_saved.states[::20], P314, 32.0, 0.1,
                                  1e-6)
        assert len(rows) > 3
        assert all(r.holds for r in rows)

    def test_regime_mismatch_rejected(self, blowup_runs_mc):
        with pytest.raises(ValueError):
            blowup_bound_check(blowup_runs_mc[1.2].states,
                               Params(3, 1.0, 2.5), 32.0, 0.1, 1.0)


class TestCoercivityGap58:
    def test_negative_energy_constants(self, q314):
        u = 1.5 * RadialField(q314.profile.grid,
                              np.real(q314.profile.values))
        E = energy(u, P314)
        assert E < 0
        H = coercivity_gap_58(u, P314, q314)
        # H equals (N(p-1)-2b)/2 E exactly through the identity
        assert H == pytest.approx(3.5 * E, rel=1e-10)

    def test_positive_energy_blowup_branch(self, q314):
        u = 1.05 * RadialField(q314.profile.grid,
                               np.real(q314.profile.values))
        assert energy(u, P314) > 0
        H = coercivity_gap_58(u, P314, q314)
        assert H < 0

    def test_energy_critical_negative_energy(self):
        from inls_lab.ground_state import W_value

        g = make_grid(60.0, 5e-3, 4)
        lam = 1.3
        vals = 1.2 * W_value(g.r / lam, 4, 2.0)
        u = RadialField(g, vals)
        assert energy(u, P425) < 0
        W = RadialField(g, W_value(g.r, 4, 2.0))
        H = coercivity_gap_58(u, P425, W)
        assert H < 0

    def test_global_branch_rejected(self, q314):
        u = 0.5 * RadialField(q314.profile.grid,
                              np.real(q314.profile.values))
        with pytest.raises(ValueError):
            coercivity_gap_58(u, P314, q314)


class TestBoundCSV:
    def test_roundtrip(self, blowup_runs_mc, tmp_path):
        from inls_lab.virial import bound_rows_to_csv, fit_envelope_constant

        C = fit_envelope_constant(blowup_runs_mc[1.6].states, P313, 32.0, 0.1)
        rows = blowup_bound_check(blowup_runs_mc[1.2].states, P313, 32.0,
                                  0.1, C)
        path = tmp_path / "bounds.csv"
        bound_rows_to_csv(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,V,Vp,Vpp_measured,rhs_bound,slack"
        assert len(lines) == len(rows) + 1


class TestEnergyCriticalEnvelope:
    def test_tapered_W_collapse(self):
        from inls_lab.evolution import RunStatus, StepperConfig, evolve
        from inls_lab.ground_state import W_value

        g = make_grid(20.0, 5e-3, 4)
        s = np.clip((g.r - 14.0) / 4.0, 0.0, 1.0)
        taper = 1.0 - (6 * s**5 - 15 * s**4 + 10 * s**3)
        u0 = RadialField(g, (1.2 * W_value(g.r / 1.3, 4, 2.0)
                             * taper).astype(complex))
        assert energy(u0, P425) < 0
        cfg = StepperConfig(dt=2.5e-4, t_end=1.0, save_every=2, r_max=20.0,
                            local_mass_radii=(2.0, 5.0, 10.0))
        res = evolve(u0, P425, cfg)
        assert res.outcome.status == RunStatus.BLOWUP_DETECTED
        C = fit_envelope_constant(res.states, P425, 8.0, 0.1)
        rows = blowup_bound_check(res.states, P425, 8.0, 0.1, 1.2 * C)
        assert len(rows) > 50
        assert all(r.holds for r in rows)


class TestMassCriticalCoefficientEquivalence:
    def test_statement_and_proof_coefficients_agree(self):
        # N eps/(2N+4+2b) versus eps/(p+1): identical since
        # p + 1 = (2N+4+2b)/N at mass-critical parameters
        from fractions import Fraction

        for N in (2, 3, 4, 5, 6):
            for b in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(7, 3)):
                p = Fraction(N + 4 + 2 * b, N)
                assert Fraction(N, 2 * N + 4 + 2 * b) == 1 / (p + 1)
