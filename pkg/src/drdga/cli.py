"""Command-line front end: run experiments to CSV, or print the centralized solution.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import baseline, engine, metrics
from .config import ALGORITHMS, Experiment, parse_config
from .errors import ConfigError, InfeasibleProblemError
from .reference import solve_centralized

_REFERENCE_TOL = 1e-6

CSV_HEADER = "t,objective,gap,violation,violation_inst,disagreement,max_lambda,beta"


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def write_csv(rows, path) -> None:
    """Serialize metric rows, one line per round, floats at 12 significant digits."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [str(r.t)]
                + [
                    _fmt(v)
                    for v in (
                        r.objective,
                        r.gap,
                        r.violation,
                        r.violation_inst,
                        r.disagreement,
                        r.max_lambda,
                        r.beta,
                    )
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_summary(path, *, algorithm, stop_reason, rows, f_star, constants) -> None:
    last = rows[-1]
    pairs = [
        ("algorithm", algorithm),
        ("stop_reason", stop_reason),
        ("terminal_round", str(last.t)),
        ("objective", _fmt(last.objective)),
        ("f_star", _fmt(f_star) if f_star is not None else "unavailable"),
        ("gap", _fmt(last.gap)),
        ("violation", _fmt(last.violation)),
        ("violation_inst", _fmt(last.violation_inst)),
        ("empirical_D", _fmt(constants.D)),
        ("theorem2_bound", _fmt(metrics.theorem2_bound(last.t, constants))),
        ("theorem3_bound", _fmt(metrics.theorem3_bound(last.t, constants))),
    ]
    text = "\n".join(f"{k} = {v}" for k, v in pairs) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def run_experiment(exp: Experiment, out_path) -> tuple[str, list]:
    """Execute the configured algorithm and write the CSV plus summary sidecar."""
    try:
        f_star = solve_centralized(exp.problem, tol=_REFERENCE_TOL).objective
    except InfeasibleProblemError:
        f_star = None
    if exp.algorithm == "cdda":
        _, rows, reason = baseline.cdda_run_until(exp.problem, exp.seq, exp.run, f_star=f_star)
    else:
        _, rows, reason = engine.run_until(exp.problem, exp.seq, exp.run, f_star=f_star)
    constants = metrics.constants_from_run(
        exp.problem, exp.seq.window, exp.run.q, rows, theta0=exp.run.theta0
    )
    write_csv(rows, out_path)
    write_summary(
        str(out_path) + ".summary",
        algorithm=exp.algorithm,
        stop_reason=reason,
        rows=rows,
        f_star=f_star,
        constants=constants,
    )
    return reason, rows


def _cmd_run(args) -> int:
    exp = parse_config(
        args.config,
        algorithm=args.algorithm,
        seed=args.seed,
        t_max=args.tmax,
        epsilon=args.epsilon,
    )
    reason, rows = run_experiment(exp, args.out)
    print(f"{exp.algorithm}: {reason} after {rows[-1].t} rounds -> {args.out}")
    return 0


def _cmd_reference(args) -> int:
    exp = parse_config(args.config)
    solution = solve_centralized(exp.problem, tol=args.tol)
    np.set_printoptions(precision=10)
    for i, x in enumerate(solution.x, start=1):
        print(f"x*[{i}] = {x}")
    print(f"F* = {_fmt(solution.objective)}")
    print(f"lambda* = {solution.multiplier}")
    print(f"violation = {_fmt(solution.violation)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drdga",
        description="Distributed regularized dual gradient simulator over time-varying directed graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write per-round metrics CSV")
    run.add_argument("--config", required=True, help="experiment config file")
    run.add_argument("--out", required=True, help="output CSV path (summary goes to <out>.summary)")
    run.add_argument("--algorithm", choices=ALGORITHMS, default=None,
                     help="override the configured algorithm")
    run.add_argument("--seed", type=int, default=None, help="override the graph seed")
    run.add_argument("--tmax", type=int, default=None, help="override the round cap")
    run.add_argument("--epsilon", type=float, default=None, help="override the stopping tolerance")
    run.set_defaults(func=_cmd_run)

    ref = sub.add_parser("reference", help="print the centralized solution of the configured problem")
    ref.add_argument("--config", required=True, help="experiment config file")
    ref.add_argument("--tol", type=float, default=_REFERENCE_TOL,
                     help="coupling residual tolerance (default 1e-6)")
    ref.set_defaults(func=_cmd_reference)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
