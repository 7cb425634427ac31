"""Command-line entry point.

Exit codes: 0 success, 2 invalid arguments or config, 3 the request lies
entirely in a singular/unstable region (or has no solution there), 4 I/O
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from . import closedform as cf
from . import oracle
from .closedform import Form
from .errors import DPOError, InvalidParams, StepTooLarge
from .model import SystemParams, classify_regime, down_conversion_fraction, solve_steady_state, threshold_drive
from .search import find_entanglement_boundary, find_optimal_squeezing
from .sweep import DEFAULT_FIGURE_KAPPAS, DEFAULT_FIGURE_LAMBDA, SweepSpec, fmt, reproduce_figure, run_sweep, write_sweep_csv
from .validation import DEFAULT_TOL, validate

log = logging.getLogger("harmonic_dpo")

EXIT_OK, EXIT_USAGE, EXIT_SINGULAR, EXIT_IO = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


def _safe(fn):
    try:
        return fn()
    except DPOError as exc:
        return f"unavailable ({type(exc).__name__})"


def cmd_steady(args) -> int:
    params = SystemParams(args.kappa, args.lambda_c, args.drive)
    wp = solve_steady_state(params, args.branch)
    out = {
        "kappa": params.kappa,
        "lambda": params.lambda_c,
        "drive": params.epsilon_d,
        "threshold_drive": threshold_drive(params),
        "regime": classify_regime(params).value,
        "branch": wp.branch,
        "alpha": wp.alpha,
        "beta": wp.beta,
        "eps1": wp.eps1,
        "eps2": wp.eps2,
        "fraction": down_conversion_fraction(wp) if params.epsilon_d > 0 else 0.0,
    }
    for form in (Form.GENERAL, Form.REDUCED):
        out[f"closed_{form.value}"] = _safe(lambda: cf.observables(wp, form).as_dict())
    out["oracle"] = _safe(lambda: oracle.observables_from_moments(wp, oracle.steady_moments(wp)).as_dict())
    _print_json(out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = SweepSpec.from_json(args.config)
    result = run_sweep(spec, workers=args.workers)
    write_sweep_csv(result.rows, args.out)
    log.info("%d rows written, %d grid points skipped", len(result.rows), len(result.skipped))
    if result.skipped:
        print(f"skipped {len(result.skipped)} of {result.grid_size} grid points inside guard bands", file=sys.stderr)
    return EXIT_OK


def cmd_figure(args) -> int:
    table = reproduce_figure(
        args.n,
        args.out,
        kappas=args.kappas,
        lambda_c=args.lambda_c,
        eps1_max=args.eps1_max,
        count=args.count,
    )
    log.info("figure %d: %d rows -> %s", table.number, len(table.rows), args.out)
    return EXIT_OK


def cmd_optimum(args) -> int:
    opt = find_optimal_squeezing(args.kappa, args.lambda_c)
    _print_json(
        {
            "kappa": opt.kappa,
            "eps1_star": opt.eps1_star,
            "eps1_star_over_kappa": opt.eps1_star / opt.kappa,
            "var_minus_star": opt.var_minus_star,
            "squeezing_percent": opt.squeezing_percent,
        }
    )
    return EXIT_OK


def cmd_boundary(args) -> int:
    b = find_entanglement_boundary(args.kappa, args.lambda_c, pipeline=args.pipeline)
    _print_json({"kappa": b.kappa, "eps1": b.eps1, "eps1_over_kappa": b.ratio, "pipeline": b.pipeline})
    return EXIT_OK


def cmd_validate(args) -> int:
    spec = SweepSpec.from_json(args.config)
    report = validate(spec, tol=args.tol, top_k=args.top_k, workers=args.workers)
    if not report.points:
        print("no grid point could be evaluated by any pipeline", file=sys.stderr)
        return EXIT_SINGULAR
    report.write_json(args.out)
    summary = report.summary()
    print(
        f"{summary['evaluated_points']} points, {summary['skipped_points']} skipped, {summary['flag_count']} flags",
        file=sys.stderr,
    )
    return EXIT_OK


TRANSIENT_HEADER = (
    "t",
    "mean_a_oracle",
    "mean_b_oracle",
    "mean_a_closed",
    "mean_b_closed",
    "duan_sum",
    "var_plus",
    "var_minus",
    "nbar",
    "delta_I",
)


def cmd_transient(args) -> int:
    params = SystemParams(args.kappa, args.lambda_c, args.drive)
    wp = solve_steady_state(params, args.branch)
    dt = args.dt if args.dt is not None else oracle.DEFAULT_DT / params.kappa
    if dt > oracle.MAX_DT / params.kappa * (1 + 1e-12):
        raise StepTooLarge(f"dt = {dt} exceeds {oracle.MAX_DT}/kappa")
    every = max(1, args.every)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRANSIENT_HEADER)
        for i, ms in enumerate(oracle.iter_moments(wp, oracle.vacuum_state(wp), args.t_final, dt)):
            if i % every:
                continue
            obs = oracle.observables_from_moments(wp, ms)
            try:
                closed_a, closed_b = cf.mean_fields(wp, ms.t)
            except DPOError:
                closed_a = closed_b = None
            writer.writerow(
                [
                    fmt(v)
                    for v in (
                        ms.t,
                        obs.mean_a,
                        obs.mean_b,
                        closed_a,
                        closed_b,
                        obs.duan_sum,
                        obs.var_plus,
                        obs.var_minus,
                        obs.mean_photon,
                        obs.intensity_diff,
                    )
                ]
            )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="harmonic-dpo",
        description="Driven degenerate parametric oscillator: steady state, sweeps and closed-form/oracle checks.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("steady", help="steady state and observables for one parameter set")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--lambda", dest="lambda_c", type=float, required=True)
    p.add_argument("--drive", type=float, required=True)
    p.add_argument("--branch", type=int, choices=(1, -1), default=1)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep", help="evaluate a JSON sweep config to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="tabulate one of the four figure curves as CSV")
    p.add_argument("--n", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kappas", type=_floats, default=list(DEFAULT_FIGURE_KAPPAS))
    p.add_argument("--lambda", dest="lambda_c", type=float, default=DEFAULT_FIGURE_LAMBDA)
    p.add_argument("--eps1-max", type=float, default=2.0)
    p.add_argument("--count", type=int, default=400)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("optimum", help="eps1 of maximal two-mode squeezing")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--lambda", dest="lambda_c", type=float, default=0.5)
    p.set_defaults(func=cmd_optimum)

    p = sub.add_parser("boundary", help="eps1 where the Duan sum falls below 2")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--lambda", dest="lambda_c", type=float, default=0.5)
    p.add_argument("--pipeline", choices=("reduced", "general", "oracle"), default="reduced")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("validate", help="closed-form vs oracle report as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("transient", help="moment evolution from the vacuum as CSV")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--lambda", dest="lambda_c", type=float, required=True)
    p.add_argument("--drive", type=float, required=True)
    p.add_argument("--branch", type=int, choices=(1, -1), default=1)
    p.add_argument("--t-final", type=float, required=True)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--every", type=int, default=1, help="write every n-th step")
    p.set_defaults(func=cmd_transient)
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InvalidParams, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DPOError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
