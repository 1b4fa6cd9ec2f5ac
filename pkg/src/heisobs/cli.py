"""Command-line front end.

    heisobs analyze problem.json [--out report.json] [--json]
    heisobs flow problem.json --t 1.0 --point 1,0,0 [--steps N]
    heisobs sweep sweep.json [--out table.csv] [--jobs N]
    heisobs selftest [--seed N] [--trials N]

Exit status: 0 on success whatever the verdict, 1 when a self-test suite
fails, 2 on unparsable input, 3 on input that parses but is invalid.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .problem import SpecParseError, SpecValidationError, load_json, load_problem
from .report import analyze, compare_flow, render_flow, render_text
from .selftest import FAULTS, run_selftest
from .sweep import parse_sweep, run_sweep

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3


def _point(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("point needs three comma-separated numbers")
    return parts


def cmd_analyze(args) -> int:
    report = analyze(load_problem(args.spec))
    machine = report.to_json()
    if args.out:
        Path(args.out).write_text(machine)
    sys.stdout.write(machine if args.json else render_text(report))
    return EXIT_OK


def cmd_flow(args) -> int:
    problem = load_problem(args.spec)
    if args.steps is not None and args.steps < 1:
        raise SpecValidationError("--steps must be positive")
    cmp = compare_flow(problem, args.t, args.point, args.steps)
    sys.stdout.write(render_flow(cmp))
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = parse_sweep(load_json(args.spec))
    result = run_sweep(spec, jobs=args.jobs)
    table = result.to_csv()
    if args.out:
        Path(args.out).write_text(table)
        info = sys.stdout
    else:
        sys.stdout.write(table)
        info = sys.stderr
    info.write("summary " + json.dumps(result.summary(), sort_keys=True) + "\n")
    for finding in result.discrepancies:
        info.write(f"discrepancy [{finding.kind}] {finding.message} {json.dumps(finding.details, sort_keys=True)}\n")
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_selftest(seed=args.seed, trials=args.trials, fault=args.inject_fault)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status} {r.name:8s} {r.checks} checks"
        print(line + (f"  {r.detail}" if r.detail else ""))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heisobs", description="Observability of linear pairs on the Heisenberg group")
    parser.add_argument("-v", "--verbose", action="store_true", help="log rank-tolerance warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full analysis of one problem")
    p.add_argument("spec")
    p.add_argument("--out", help="also write the JSON report here")
    p.add_argument("--json", action="store_true", help="print the JSON report instead of text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("flow", help="closed-form flow against RK4")
    p.add_argument("spec")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--point", type=_point, required=True)
    p.add_argument("--steps", type=int)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("sweep", help="grid sweep, CSV output")
    p.add_argument("spec")
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selftest", help="run the invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SpecValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
