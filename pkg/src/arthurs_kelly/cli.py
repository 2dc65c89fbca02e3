"""Command-line front end.

Exit codes: 0 success, 1 check failure, 2 usage/parameter error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import dynamics, inequality, propagator
from .errors import InvalidParameters, NonConvergence, SingularConfiguration
from .gaussian import (
    GaussianProbeParams,
    GaussianSystemParams,
    assemble_initial_state,
    probe_moments,
    system_moments,
)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

CSV_HEADER = ["a_r", "c_i", "valid", "gamma", "gamma_c",
              "violates_generalized", "violates_original", "boundary"]


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """12 significant digits, locale independent."""
    return format(float(x), ".12g")


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


# -- output -------------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


def scan_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([
            fmt(r.a_r), fmt(r.c_i), int(r.valid), fmt(r.gamma), fmt(r.gamma_c),
            int(r.violates_generalized), int(r.violates_original), int(r.boundary),
        ])
    return buf.getvalue()


def scan_json(grid, rows) -> str:
    return _json({
        "grid": asdict(grid),
        "columns": CSV_HEADER,
        "rows": [
            [float(fmt(r.a_r)), float(fmt(r.c_i)), r.valid,
             None if not r.valid else float(fmt(r.gamma)),
             None if not r.valid else float(fmt(r.gamma_c)),
             r.violates_generalized, r.violates_original, r.boundary]
            for r in rows
        ],
    })


# -- subcommands ----------------------------------------------------------------

def cmd_scan(args) -> int:
    grid = inequality.ScanGrid(
        B_R=args.br, C_R=args.cr,
        ar_min=args.ar_min, ar_max=args.ar_max, ar_steps=args.ar_steps,
        ci_min=args.ci_min, ci_max=args.ci_max, ci_steps=args.ci_steps,
    )
    rows = inequality.violation_scan(grid, threads=args.threads)
    text = scan_csv(rows) if args.format == "csv" else scan_json(grid, rows)
    _emit(text, args.out)
    s = inequality.summarize(rows)
    line = (f"valid={s.valid}/{s.points} violations={s.violations} "
            f"original_violations={s.original_violations} boundary={s.boundary} "
            f"min_gamma_c={fmt(s.min_gamma_c)} "
            f"alpha_negative={s.alpha_negative} beta_negative={s.beta_negative}\n")
    # keep stdout machine-readable when the table itself goes there
    (sys.stderr if args.out in (None, "-") else sys.stdout).write(line)
    return EXIT_OK


def _probe_and_system(args):
    probe = GaussianProbeParams(args.A, args.B, args.C, args.D1, args.D2)
    system = GaussianSystemParams(args.A3, args.D3)
    return probe, system


def cmd_propagate(args) -> int:
    probe, system = _probe_and_system(args)
    h = dynamics.HamiltonianParams(args.m1, args.m2, args.m3, args.kappa)
    if args.mode in ("asymptotic", "both") and h.kappa <= 0:
        raise UsageError("asymptotic map needs kappa > 0")
    if args.time is not None:
        t = args.time
        if t < 0:
            raise UsageError("--time must be non-negative")
    elif h.kappa > 0:
        t = h.measurement_time
    else:
        raise UsageError("--time is required when kappa = 0")
    state = assemble_initial_state(probe, system)
    pm = probe_moments(probe)
    report = {
        "parameters": {
            "probe": {k: [v.real, v.imag] for k, v in asdict(probe).items()},
            "system": {k: [v.real, v.imag] for k, v in asdict(system).items()},
            "hamiltonian": asdict(h),
            "time": t,
            "mode": args.mode,
        },
        "alpha": pm.alpha,
        "beta": pm.beta,
        "initial": state.to_dict(),
    }
    if args.mode in ("exact", "both"):
        final = dynamics.propagate_moments(state, dynamics.symplectic_map(h, t))
        report["exact"] = final.to_dict()
        report["exact_meters"] = {
            "dx1sq": final.variance("x1"), "dx2sq": final.variance("x2"),
            "x1_mean": final.expectation("x1"), "x2_mean": final.expectation("x2"),
        }
    if args.mode in ("asymptotic", "both"):
        report["asymptotic_meters"] = asdict(dynamics.asymptotic_map(state))
    if args.mode == "both":
        ex, asy = report["exact_meters"], report["asymptotic_meters"]
        report["deltas"] = {k: abs(ex[k] - asy[k]) for k in asy}
    _emit(_json(report), args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    ks = (args.K1, args.K2, args.K3)
    if all(k is not None for k in ks):
        K1, K2, K3 = ks
        source = "flags"
    elif any(k is not None for k in ks):
        raise UsageError("give all of --K1 --K2 --K3 or none")
    else:
        probe, system = _probe_and_system(args)
        pm, sm = probe_moments(probe), system_moments(system)
        K1, K2, K3 = pm.dx1sq * pm.dp1sq, pm.dx2sq * pm.dp2sq, sm.dx3sq * sm.dp3sq
        source = "state"
    gamma = inequality.gamma_bound(K1, K2, K3)
    product_min, x_opt, y_opt = inequality.minimized_product(K1, K2, K3)
    report = {"source": source, "K1": K1, "K2": K2, "K3": K3, "gamma": gamma,
              "x_opt": x_opt, "y_opt": y_opt, "product_min": product_min}
    if source == "state":
        report["report"] = inequality.uncertainty_report(probe, system).to_dict()
    _emit(_json(report), args.out)
    return EXIT_OK


def cmd_kernel_check(args) -> int:
    h = dynamics.HamiltonianParams(args.m1, args.m2, args.m3, args.kappa)
    if not 0 < args.t1 < args.t:
        raise UsageError("need 0 < --t1 < --t")
    try:
        propagator.check_regular(h, args.t)
    except SingularConfiguration as exc:
        raise UsageError(f"singular configuration: {exc}") from None
    from .checks import run_kernel_checks

    results = run_kernel_checks(h, args.t, args.t1, seed=args.seed, trials=args.trials)
    lines = [f"kernel-check m=({fmt(h.m1)}, {fmt(h.m2)}, {fmt(h.m3)}) "
             f"kappa={fmt(h.kappa)} t={fmt(args.t)} t1={fmt(args.t1)} "
             f"seed={args.seed} trials={args.trials}"]
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}: worst={r.worst:.3e} "
                     f"tol={r.tol:.1e} {r.note}".rstrip())
    failed = [r.name for r in results if not r.passed]
    lines.append("all checks passed" if not failed else "failed: " + ", ".join(failed))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_CHECK if failed else EXIT_OK


# -- parser -------------------------------------------------------------------

def _add_state_flags(p, defaults=True):
    p.add_argument("--A", type=parse_complex, default=1 + 0j)
    p.add_argument("--B", type=parse_complex, default=1 + 0j)
    p.add_argument("--C", type=parse_complex, default=0j)
    p.add_argument("--D1", type=parse_complex, default=0j)
    p.add_argument("--D2", type=parse_complex, default=0j)
    p.add_argument("--A3", type=parse_complex, default=1 + 0j)
    p.add_argument("--D3", type=parse_complex, default=0j)


def _add_mass_flags(p):
    p.add_argument("--m1", type=float, default=1.0)
    p.add_argument("--m2", type=float, default=1.0)
    p.add_argument("--m3", type=float, default=1.0)


def _add_output_flags(p, formats=("json",)):
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arthurs-kelly",
        description="Arthurs-Kelly joint measurement with Gaussian probes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="Gamma_C vs Gamma over the (A_R, C_I) plane")
    p.add_argument("--br", type=float, default=1.0)
    p.add_argument("--cr", type=float, default=1.0)
    p.add_argument("--ar-min", type=float, default=1.05)
    p.add_argument("--ar-max", type=float, default=10.0)
    p.add_argument("--ar-steps", type=int, default=200)
    p.add_argument("--ci-min", type=float, default=-10.0)
    p.add_argument("--ci-max", type=float, default=10.0)
    p.add_argument("--ci-steps", type=int, default=200)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    _add_output_flags(p, ("csv", "json"))
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("propagate", help="propagate initial moments to t = 1/kappa")
    _add_state_flags(p)
    _add_mass_flags(p)
    p.add_argument("--kappa", type=float, default=1e4)
    p.add_argument("--time", type=float, default=None, help="default 1/kappa")
    p.add_argument("--mode", choices=("exact", "asymptotic", "both"), default="both")
    _add_output_flags(p)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("bound", help="generalized bound Gamma and its minimizer")
    p.add_argument("--K1", type=float)
    p.add_argument("--K2", type=float)
    p.add_argument("--K3", type=float)
    _add_state_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("kernel-check", help="self-checks of the Feynman kernel")
    _add_mass_flags(p)
    p.add_argument("--kappa", type=float, default=2.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--t1", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_kernel_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "threads", 1) < 1:
        parser.print_usage(sys.stderr)
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, InvalidParameters, SingularConfiguration) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergence as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
