"""Command-line front door: ground states, verification suites, evolutions,
amplitude sweeps, and exponent tables.

Exit codes: 0 success, 1 check failure, 2 usage or precondition violation.
All outputs are deterministic for identical flags: fixed seeds, sorted JSON
keys, %.12e numeric formatting, no timestamps.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .grids import Params, RadialField, RegimeKind, classify, gradient_sq_norm, make_grid
from . import exponents as expo
from . import functionals as fn
from . import ground_state as gs
from . import verify as ver
from .evolution import RunStatus, StepperConfig, evolve

USAGE_ERROR = 2
CHECK_FAILURE = 1


def _params_from(args) -> Params:
    try:
        return Params(args.dim, float(Fraction(args.b)), float(Fraction(args.p)))
    except ZeroDivisionError as e:
        raise ValueError(f"bad rational parameter: {e}") from e


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# ground-state
# ---------------------------------------------------------------------------

def cmd_ground_state(args) -> int:
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kind = classify(params).kind

    if kind == RegimeKind.ENERGY_CRITICAL:
        grid = make_grid(args.rmax, args.dr, params.N)
        W = gs.explicit_W(params, grid)
        big = make_grid(2000.0, 2e-2, params.N)
        wv = gs.W_value(big.r, params.N, params.b)
        dwv = gs.W_prime(big.r, params.N, params.b)
        from .grids import integrate

        pot = integrate(big.r**params.b
                        * wv ** ((2 * params.N + 2 * params.b) / (params.N - 2)), big)
        grad_sq = integrate(dwv**2, big)
        EW = 0.5 * grad_sq - (params.N - 2) / (2 * params.N + 2 * params.b) * pot
        check_511 = abs(pot - grad_sq) / grad_sq
        ref_512 = (params.b + 2) / (2 * params.N + 2 * params.b) * grad_sq
        check_512 = abs(EW - ref_512) / abs(ref_512)
        _write_profile_csv(out / "profile.csv", grid.r, np.real(W.values))
        _write_json(out / "ground_state.json", {
            "params": {"N": params.N, "b": params.b, "p": params.p},
            "profile": "W",
            "shoot_value": 1.0,
            "mass": fn.mass(W),
            "grad_sq": grad_sq,
            "potential": pot,
            "sharp_sobolev_constant": gs.sharp_sobolev_constant(params, big),
        })
        print(f"energy-critical profile W written to {out}")
        print(f"potential equals grad_sq (5.11): rel dev {check_511:.3e}")
        print(f"E(W) = (b+2)/(2N+2b) grad_sq (5.12): rel dev {check_512:.3e}")
        return 0 if max(check_511, check_512) < 1e-5 else CHECK_FAILURE

    try:
        ground = gs.shoot(params, r_max=args.rmax, tol=args.tol, dr=args.dr)
    except (ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    res1, res2 = fn.pohozaev_residuals(ground.profile, params)
    _write_profile_csv(out / "profile.csv", ground.profile.grid.r,
                       np.real(ground.profile.values))
    gs.save_fixture(ground, out / "ground_state.json")
    print(f"ground state written to {out}")
    print(f"Q(0) = {ground.shoot_value:.12e}  ode residual {ground.ode_residual:.3e}"
          f"  decay rate {ground.decay_rate:.4f}")
    print(f"Pohozaev residuals (2.7): {res1:.3e}, {res2:.3e}")
    if math.isfinite(params.sigma_c):
        w = fn.weinstein(ground.profile, params)
        c = fn.c_opt_closed_form(
            (math.sqrt(gradient_sq_norm(ground.profile)),
             math.sqrt(fn.mass(ground.profile))), params)
        print(f"weinstein(Q) = {w:.8e}  closed-form C_opt (4.5) = {c:.8e}  "
              f"rel dev {abs(w - c) / c:.3e}")
    ok = res1 < 1e-4 and res2 < 1e-4
    return 0 if ok else CHECK_FAILURE


def _write_profile_csv(path: Path, r, q) -> None:
    with open(path, "w") as fh:
        fh.write("r,Q\n")
        for ri, qi in zip(r, q):
            fh.write(f"{ri:.12e},{qi:.12e}\n")


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    try:
        report = ver.run_suites(args.suite)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    payload = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    for check in report["checks"]:
        mark = "pass" if check["pass"] else "FAIL"
        print(f"[{mark}] {check['name']} ({check['paper_ref']}): "
              f"value {check['value']:.3e} tol {check['tolerance']:.3e}",
              file=sys.stderr)
    return 0 if report["all_pass"] else CHECK_FAILURE


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------

def _initial_state(spec: str, params: Params, grid) -> RadialField:
    kind, _, arg = spec.partition(":")
    if kind == "cQ":
        c = float(arg)
        ground = gs.shoot(params)
        return RadialField(grid, (c * ground.resample(grid).values).astype(complex))
    if kind == "gaussian":
        amp = float(arg)
        return RadialField(grid, (amp * np.exp(-grid.r**2)).astype(complex))
    if kind == "file":
        path = Path(arg)
        if not path.exists():
            raise ValueError(f"initial-state file not found: {path}")
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        vals = np.interp(grid.r, data[:, 0], data[:, 1])
        if data.shape[1] > 2:
            vals = vals + 1j * np.interp(grid.r, data[:, 0], data[:, 2])
        return RadialField(grid, vals.astype(complex))
    raise ValueError(f"unknown init spec {spec!r}; use cQ:<c>, gaussian:<amp>, "
                     "or file:<path>")


def _run_one(params: Params, cfg: StepperConfig, init: str, grid):
    u0 = _initial_state(init, params, grid)
    return evolve(u0, params, cfg)


def _outcome_json(outcome) -> dict:
    return {
        "status": outcome.status.value,
        "t_final": outcome.t_final,
        "blowup_time_estimate": outcome.blowup_time_estimate,
        "gradient_growth": outcome.gradient_growth,
        "energy_drift_max": outcome.energy_drift_max,
        "boundary_flagged": outcome.boundary_flagged,
    }


def _cfg_json(cfg: StepperConfig) -> dict:
    return {
        "dt": cfg.dt, "r_max": cfg.r_max, "dr": cfg.dr, "t_end": cfg.t_end,
        "blowup_gradient_factor": cfg.blowup_gradient_factor,
        "energy_drift_tol": cfg.energy_drift_tol,
        "local_mass_radii": list(cfg.local_mass_radii),
        "save_every": cfg.save_every, "linear_only": cfg.linear_only,
    }


def _bound_49_all_true(diag, params: Params) -> bool | None:
    """Whether the gradient product stayed below the ground state's at every
    recorded step; None when the comparison is undefined (mass-critical)."""
    if not math.isfinite(params.sigma_c):
        return None
    ground = gs.shoot(params)
    thresh = math.sqrt(gradient_sq_norm(ground.profile)) * fn.mass(
        ground.profile
    ) ** (params.sigma_c / 2.0)
    return bool(
        all(
            math.sqrt(g) * m ** (params.sigma_c / 2.0) < thresh
            for g, m in zip(diag.grad_sq, diag.mass)
        )
    )


def cmd_evolve(args) -> int:
    params = _params_from(args)
    cfg = StepperConfig(dt=args.dt, r_max=args.rmax, dr=args.dr,
                        t_end=args.tend, save_every=args.save_every)
    grid = make_grid(cfg.r_max, cfg.dr, params.N)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        result = _run_one(params, cfg, args.init, grid)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    diag_path = out / "diagnostics.csv"
    result.diagnostics.to_csv(diag_path)
    if result.states:
        ts = np.array([t for t, _ in result.states])
        mat = np.stack([u.values for _, u in result.states])
        np.savez_compressed(out / "states.npz", t=ts, r=grid.r, states=mat)
    bound_49 = None
    if args.init.startswith("cQ:"):
        bound_49 = _bound_49_all_true(result.diagnostics, params)
    _write_json(out / "summary.json", {
        "schema": 1,
        "params": {"N": params.N, "b": params.b, "p": params.p},
        "cfg": _cfg_json(cfg),
        "outcome": _outcome_json(result.outcome),
        "bound_49_all_true": bound_49,
        "fixture_hashes": {"diagnostics.csv": _sha256(diag_path)},
    })
    print(f"run written to {out}: status {result.outcome.status.value} "
          f"at t = {result.outcome.t_final:g}")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

_AGREEMENT = {
    ("GlobalBranch", RunStatus.COMPLETED_GLOBAL.value): True,
    ("BlowupBranch", RunStatus.BLOWUP_DETECTED.value): True,
    ("NegativeEnergy", RunStatus.BLOWUP_DETECTED.value): True,
}


def cmd_sweep(args) -> int:
    params = _params_from(args)
    try:
        amplitudes = [float(a) for a in args.amplitudes.split(",") if a.strip()]
    except ValueError as e:
        print(f"error: bad amplitude list: {e}", file=sys.stderr)
        return USAGE_ERROR
    if not amplitudes:
        print("error: empty amplitude list", file=sys.stderr)
        return USAGE_ERROR
    cfg = StepperConfig(dt=args.dt, r_max=args.rmax, dr=args.dr, t_end=args.tend)
    grid = make_grid(cfg.r_max, cfg.dr, params.N)
    ground = gs.shoot(params)
    q = ground.resample(grid)

    def verdict_of(c: float) -> str:
        u0 = RadialField(grid, (c * q.values).astype(complex))
        try:
            return fn.threshold_report(u0, params, ground).verdict.value
        except ValueError:
            # mass-critical data with E >= 0: thresholds undefined
            return "Undefined"

    def run_of(c: float):
        u0 = RadialField(grid, (c * q.values).astype(complex))
        return evolve(u0, params, cfg)

    max_workers = int(os.environ.get("INLS_LAB_THREADS", "4")) or 1
    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as ex:
        results = list(ex.map(run_of, amplitudes))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for c, res in zip(amplitudes, results):
        v = verdict_of(c)
        status = res.outcome.status.value
        agree = _AGREEMENT.get((v, status), False)
        rows.append((c, v, status, agree))
    with open(out / "sweep.csv", "w") as fh:
        fh.write("amplitude,verdict,status,agreement\n")
        for c, v, status, agree in rows:
            fh.write(f"{c:.12e},{v},{status},{str(agree).lower()}\n")
    for c, v, status, agree in rows:
        print(f"c = {c:g}: verdict {v}, run {status}, agreement {agree}")
    return 0 if all(r[3] for r in rows) else CHECK_FAILURE


# ---------------------------------------------------------------------------
# exponents table
# ---------------------------------------------------------------------------

def _frac_str(x) -> str:
    if x is None:
        return "inf"
    if isinstance(x, Fraction):
        return str(x)
    return f"{x:.12e}"


def cmd_exponents(args) -> int:
    params = _params_from(args)
    bF, pF = Fraction(args.b), Fraction(args.p)
    N = params.N
    gamma_c = Fraction(N, 2) - (2 + bF) / (pF - 1)
    rows: list[tuple[str, str]] = [
        ("N", str(N)), ("b", str(bF)), ("p", str(pF)),
        ("gamma_c", str(gamma_c)),
        ("sigma_c", "inf" if gamma_c == 0 else str((1 - gamma_c) / gamma_c)),
        ("A", str((N * (pF - 1) - 2 * bF) / 2)),
        ("B", str((4 + 2 * bF - (N - 2) * (pF - 1)) / 2)),
        ("regime", classify(params).kind.value),
    ]
    # alpha and beta from the exact parsed rationals, not the float Params,
    # so non-dyadic inputs like 4/3 stay exact all the way through
    alpha = pF - 1 - 2 * bF / (N - 1)
    if alpha > 0:
        beta = max(Fraction(1, 3), Fraction(2) / ((N - 1) * alpha + 2))
        rows += [("alpha_N_minus_1", str(alpha)), ("beta", str(beta))]
    else:
        rows += [("alpha_N_minus_1", "n/a"), ("beta", "n/a")]
        alpha = None
    if alpha is not None:
        try:
            q, r, k, m = expo.scattering_exponents(alpha, N)
            l, d = expo.auxiliary_exponents(alpha, N)
            rows += [("q", str(q)), ("r", str(r)), ("k", str(k)), ("m", str(m)),
                     ("l", str(l)), ("delta", str(d))]
            rep = expo.dispersive_n_feasible(alpha, N)
            if rep.feasible:
                rows += [("n", _frac_str(rep.n)), ("theta", str(rep.theta))]
            else:
                rows += [("n", "infeasible"), ("theta", "infeasible")]
        except ValueError:
            rows += [(nm, "n/a") for nm in ("q", "r", "k", "m", "l", "delta",
                                            "n", "theta")]
    lines = ["name,value"] + [f"{k},{v}" for k, v in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_params(sp):
    sp.add_argument("--dim", type=int, required=True, help="dimension N >= 2")
    sp.add_argument("--b", required=True, help="weight exponent b > 0 (rational ok)")
    sp.add_argument("--p", required=True, help="nonlinearity power p > 1 (rational ok)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="inls-lab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ground-state", help="compute Q (or W) and its identities")
    _add_params(sp)
    sp.add_argument("--rmax", type=float, default=20.0)
    sp.add_argument("--dr", type=float, default=1e-3)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--out", default="out_ground_state")
    sp.set_defaults(func=cmd_ground_state)

    sp = sub.add_parser("verify", help="run the machine-checkable suites")
    sp.add_argument("--suite", default="all",
                    choices=["inequalities", "virial", "exponents", "all"])
    sp.add_argument("--out", default=None, help="write the JSON report here")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("evolve", help="time-evolve an initial state")
    _add_params(sp)
    sp.add_argument("--init", required=True,
                    help="cQ:<c> | gaussian:<amp> | file:<csv path>")
    sp.add_argument("--tend", type=float, required=True)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--rmax", type=float, default=40.0)
    sp.add_argument("--dr", type=float, default=5e-3)
    sp.add_argument("--save-every", type=int, default=0, dest="save_every")
    sp.add_argument("--out", default="out_evolve")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("sweep", help="amplitude sweep c*Q with agreement table")
    _add_params(sp)
    sp.add_argument("--amplitudes", required=True, help="comma-separated list")
    sp.add_argument("--tend", type=float, default=2.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--rmax", type=float, default=40.0)
    sp.add_argument("--dr", type=float, default=5e-3)
    sp.add_argument("--out", default="out_sweep")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("exponents", help="CSV table of derived exponents")
    _add_params(sp)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_exponents)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
