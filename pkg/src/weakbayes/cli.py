"""Command-line front end.

Subcommands: ``compute`` (profile + Bayes estimator + loss report for one
problem file), ``verify`` (randomized sweep checking every identity and
bound), ``simulate`` (pointer-measurement sweep reading out a weak value)
and ``eurdemo`` (momentum-from-position equality demo on a grid).

Exit codes: 0 success, 1 invariant violation, 2 input/usage error,
3 degenerate ensemble or zero postselection, 4 non-convergence,
5 resolution guard.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import estimation, fourier_grid, pointer, serialize, states, weak_values
from .exceptions import (
    DegenerateEnsembleError,
    NoConvergenceError,
    ProblemFormatError,
    ResolutionError,
    WeakBayesError,
    ZeroOverlapError,
    ZeroPostselectionError,
    ZeroProbabilityError,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_NO_CONVERGENCE = 4
EXIT_RESOLUTION = 5

UNBIASED_TOL = 1e-10
ORACLE_TOL = 1e-6


def _fail(code: int, error: str, message: str, **extra) -> int:
    payload = {"error": error, "message": message}
    payload.update(extra)
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------


def cmd_compute(args) -> int:
    try:
        problem = serialize.load_problem(args.input)
    except ProblemFormatError as exc:
        return _fail(EXIT_USAGE, "problem_format", str(exc), field=exc.field)

    report = states.validate(
        problem.rho,
        tol_herm=problem.tolerance("herm"),
        tol_psd=problem.tolerance("psd"),
        tol_norm=problem.tolerance("norm"),
    )
    if not report.ok:
        return _fail(
            EXIT_USAGE, "invalid_state", "density matrix fails validation",
            violations=report.as_dict(),
        )

    eps_ps = problem.tolerance("postselect_cutoff")
    try:
        prof = weak_values.profile(problem.rho, problem.observable, problem.basis, eps_ps)
        theta = estimation.bayes_estimator(problem.rho, problem.observable, problem.basis, eps_ps)
        bounds = estimation.verify_bounds(
            problem.rho, problem.observable, problem.basis,
            theta="bayes", eps_ps=eps_ps, tol_id=problem.tolerance("identity"),
        )
    except DegenerateEnsembleError as exc:
        return _fail(EXIT_DEGENERATE, "degenerate_ensemble", str(exc))

    serialize.write_json(
        {
            "profile": serialize.profile_to_obj(prof),
            "estimator": serialize.estimator_to_obj(theta),
            "loss_report": serialize.report_to_obj(bounds),
        },
        args.output,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

VERIFY_HEADER = [
    "trial", "dim", "purity", "loss", "a2", "mu2", "sigma2", "schwarz_slack",
    "identity_dev", "unbiased_dev", "oracle_dev",
    "decomposition_ok", "schwarz_ok", "loss_bound_ok", "sigma_bound_ok",
    "pure_saturation_ok", "all_ok",
]


def _verify_trial(trial: int, dim: int, purity: str, seed: int, tol: float):
    """Run every check on one random instance; returns (row, ok, detail)."""
    rho, a, basis = states.random_instance(dim, purity, states.trial_seed(seed, trial))
    rng = np.random.default_rng(states.trial_seed(seed, trial).spawn(1)[0])

    bounds = estimation.verify_bounds(rho, a, basis, theta="bayes")
    bayes = estimation.bayes_estimator(rho, a, basis)
    brute = estimation.bruteforce_bayes(rho, a, basis)
    oracle_dev = float(np.max(np.abs(bayes.values - brute.values)))

    # Decomposition identity probed with a random estimator, not the minimizer.
    theta = weak_values.Estimator(basis, states.standard_normal(rng, (dim,)) * 2.0)
    random_bounds = estimation.verify_bounds(rho, a, basis, theta=theta)
    identity_dev = abs(
        random_bounds.loss
        - (random_bounds.a2 - random_bounds.mu2 + random_bounds.gap)
    )

    prof = weak_values.profile(rho, a, basis)
    unbiased_dev = abs(
        float(np.sum(prof.probs() * prof.mus()))
        - float(np.real(np.trace(rho.matrix @ a.matrix)))
    )

    checks = {
        "identity": identity_dev <= tol,
        "schwarz": bounds.schwarz_ok,
        "loss_bound": bounds.loss_bound_ok and random_bounds.loss_bound_ok,
        "sigma_bound": bounds.sigma_bound_ok and random_bounds.sigma_bound_ok,
        "unbiased": unbiased_dev <= UNBIASED_TOL,
        "oracle": oracle_dev <= ORACLE_TOL,
        "pure_saturation": bounds.pure_saturation_ok in (None, True),
    }
    ok = all(checks.values())
    row = [
        trial, dim, purity, bounds.loss, bounds.a2, bounds.mu2, bounds.sigma2,
        bounds.schwarz_slack, identity_dev, unbiased_dev, oracle_dev,
        random_bounds.decomposition_ok, bounds.schwarz_ok, bounds.loss_bound_ok,
        bounds.sigma_bound_ok, bounds.pure_saturation_ok, ok,
    ]
    detail = {name: passed for name, passed in checks.items() if not passed}
    return row, ok, detail


def cmd_verify(args) -> int:
    if not 2 <= args.dim <= 8:
        return _fail(EXIT_USAGE, "usage", "--dim must be in [2, 8]")
    if args.trials < 1:
        return _fail(EXIT_USAGE, "usage", "--trials must be at least 1")

    rows = []
    first_failure = None
    for trial in range(args.trials):
        row, ok, detail = _verify_trial(trial, args.dim, args.purity, args.seed, args.tol)
        rows.append(row)
        if not ok and first_failure is None:
            first_failure = (trial, detail, row)

    if args.output:
        serialize.write_csv(args.output, VERIFY_HEADER, rows)
    else:
        sys.stdout.write(",".join(VERIFY_HEADER) + "\n")
        for row in rows:
            sys.stdout.write(",".join(serialize.format_cell(c) for c in row) + "\n")

    if first_failure is not None:
        trial, detail, row = first_failure
        return _fail(
            EXIT_VIOLATION, "verification_failed",
            f"trial {trial} (seed stream [{args.seed}, {trial}]) failed",
            failed_checks=sorted(detail),
            row=dict(zip(VERIFY_HEADER, [serialize.format_cell(c) for c in row])),
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

SIMULATE_HEADER = ["g", "p_post", "mean_x", "mean_k", "mean_x_over_g", "implied_re", "implied_im"]


def cmd_simulate(args) -> int:
    try:
        problem = serialize.load_problem(args.input)
    except ProblemFormatError as exc:
        return _fail(EXIT_USAGE, "problem_format", str(exc), field=exc.field)
    if problem.psi is None:
        return _fail(EXIT_USAGE, "usage", "simulate requires a problem with a pure state 'psi'")

    g_list = args.g if args.g else [0.04, 0.02, 0.01]
    if len(g_list) < 3:
        return _fail(EXIT_USAGE, "usage", "need at least 3 coupling values (repeat --g)")
    try:
        b = problem.basis.vector(args.postselect)
    except KeyError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))

    grid = None
    if args.grid_n is not None:
        try:
            grid = pointer.PointerGrid.auto(args.width, n=args.grid_n)
        except ValueError as exc:
            return _fail(EXIT_USAGE, "usage", str(exc))

    try:
        result = pointer.sweep(problem.psi, problem.observable, b, args.width, g_list, grid)
        analytic = weak_values.weak_value_pure(problem.psi, problem.observable, b)
    except (ZeroPostselectionError, ZeroOverlapError) as exc:
        return _fail(EXIT_DEGENERATE, "zero_postselection", str(exc))
    except NoConvergenceError as exc:
        return _fail(EXIT_NO_CONVERGENCE, "no_convergence", str(exc))
    except ResolutionError as exc:
        return _fail(EXIT_RESOLUTION, "resolution", str(exc))
    except (ValueError, WeakBayesError) as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))

    if args.output:
        serialize.write_csv(
            args.output,
            SIMULATE_HEADER,
            [
                [r.g, r.p_post, r.mean_x, r.mean_k, r.re_estimate, r.re_estimate, r.im_estimate]
                for r in result.rows
            ],
        )

    mismatch = abs(result.value - analytic)
    summary = {
        "extrapolated": serialize.complex_pair(result.value),
        "analytic": serialize.complex_pair(analytic),
        "mismatch": mismatch,
        "re_error_estimate": result.re_error,
        "im_error_estimate": result.im_error,
        "converged": True,
        "g_sequence": list(g_list),
    }
    sys.stdout.write(serialize.dumps_json(summary))
    if mismatch > args.tol:
        return _fail(
            EXIT_VIOLATION, "readout_mismatch",
            f"extrapolated value differs from the analytic weak value by {mismatch:.3e}",
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# eurdemo
# ---------------------------------------------------------------------------


def _demo_wavefunction(args) -> fourier_grid.GridWavefunction:
    if args.shape == "gaussian":
        fourier_grid.check_resolution(args.grid_n, args.length, args.width)
        return fourier_grid.GridWavefunction.gaussian(
            args.grid_n, args.length, args.width, wavenumber=args.k0
        )
    if args.shape == "plane":
        return fourier_grid.GridWavefunction.plane_wave(args.grid_n, args.length, args.k0)
    fourier_grid.check_resolution(args.grid_n, args.length, args.width)
    return fourier_grid.GridWavefunction.double_gaussian(
        args.grid_n, args.length, args.width, args.separation
    )


def cmd_eurdemo(args) -> int:
    if args.grid_n > fourier_grid.MAX_DENSE_N:
        return _fail(
            EXIT_USAGE, "usage",
            f"--grid-n is capped at {fourier_grid.MAX_DENSE_N} for the dense equality check",
        )
    try:
        psi = _demo_wavefunction(args)
    except ResolutionError as exc:
        sys.stderr.write(f"warning: {exc}\n")
        return EXIT_RESOLUTION
    except (ValueError, WeakBayesError) as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))

    try:
        report = fourier_grid.exact_uncertainty_check(psi)
    except DegenerateEnsembleError as exc:
        return _fail(EXIT_DEGENERATE, "degenerate_ensemble", str(exc))

    mean_p = fourier_grid.momentum_moment(psi, 1)
    var_p = fourier_grid.momentum_moment(psi, 2) - mean_p**2
    gap = abs(report.loss - report.sigma2)
    payload = {
        "n": psi.n,
        "L": psi.length,
        "loss": report.loss,
        "sigma2": report.sigma2,
        "equality_gap": gap,
        "mean_p": mean_p,
        "var_p": var_p,
    }
    if args.output:
        serialize.write_json(payload, args.output)
    else:
        sys.stdout.write(serialize.dumps_json(payload))

    if args.csv:
        prof = fourier_grid.position_profile(psi)
        positions = psi.positions()
        rows = [
            [positions[m], e.prob, "" if e.excluded else e.mu, "" if e.excluded else e.sigma]
            for m, e in enumerate(prof)
        ]
        serialize.write_csv(args.csv, ["q", "prob", "mu", "sigma"], rows)

    if gap > fourier_grid.TOL_GRID:
        return _fail(
            EXIT_VIOLATION, "equality_gap",
            f"|loss - sigma2| = {gap:.3e} exceeds {fourier_grid.TOL_GRID:.1e}",
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakbayes",
        description="Weak values and Bayes estimators on pre- and postselected ensembles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="profile, Bayes estimator and loss report for a problem")
    p.add_argument("--input", required=True, help="problem JSON path")
    p.add_argument("--output", required=True, help="report JSON path")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="randomized identity/bound verification sweep")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--purity", choices=["pure", "mixed"], default="mixed")
    p.add_argument("--tol", type=float, default=estimation.TOL_ID)
    p.add_argument("--output", help="CSV summary path (stdout when omitted)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="pointer-measurement sweep reading out a weak value")
    p.add_argument("--input", required=True, help="problem JSON path (needs 'psi')")
    p.add_argument("--postselect", required=True, help="basis label to postselect on")
    p.add_argument("--g", type=float, action="append", help="coupling (repeat, decreasing)")
    p.add_argument("--width", type=float, default=1.0, help="pointer position width")
    p.add_argument("--grid-n", type=int, default=None, help="pointer grid points (power of two)")
    p.add_argument("--tol", type=float, default=1e-4, help="allowed readout mismatch")
    p.add_argument("--output", help="sweep CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eurdemo", help="momentum-from-position equality demo")
    p.add_argument("--shape", choices=["gaussian", "plane", "double-gaussian"], required=True)
    p.add_argument("--width", type=float, default=1.0, help="packet width (gaussian shapes)")
    p.add_argument("--k0", type=float, default=0.0, help="carrier wavenumber / plane mode")
    p.add_argument("--separation", type=float, default=8.0, help="double-gaussian separation")
    p.add_argument("--grid-n", type=int, default=512)
    p.add_argument("--length", type=float, default=40.0)
    p.add_argument("--output", help="JSON report path (stdout when omitted)")
    p.add_argument("--csv", help="optional per-point CSV path")
    p.set_defaults(func=cmd_eurdemo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    return args.func(args)


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
