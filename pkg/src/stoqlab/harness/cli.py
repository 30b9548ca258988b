"""Command-line entry point.

Verbs: run a scenario file (or builtin name), list builtin scenarios,
check (run the whole acceptance suite), and plotdata.  The exit code is
nonzero iff any executed check fails.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from .plotdata import PlotDataError, emit_plotdata
from .runner import run_scenario
from .scenario import (ScenarioError, list_builtin_scenarios,
                       resolve_scenario)


def _print_report(report):
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {report.scenario}/{c.name}: "
              f"measured={c.measured:.6g} expected={c.expected:.6g} "
              f"tol={c.tolerance} ({c.detail})")


def _run_one(args):
    name, seed, out, check_only = args
    scenario = resolve_scenario(name)
    if seed is not None:
        scenario = replace(scenario, seed=seed)
    return run_scenario(scenario, out_dir=out, check_only=check_only)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="stoqlab",
        description="cross-validated engines for vacuum-noise dynamics")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("--scenario", required=True,
                       help="path to a .cfg file or a builtin name")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default="runs")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--check-only", action="store_true",
                       help="evaluate checks without writing artifacts")

    sub.add_parser("list-scenarios", help="list builtin scenarios")

    p_check = sub.add_parser("check", help="run the acceptance suite")
    p_check.add_argument("--out", default="runs")
    p_check.add_argument("--seed", type=int, default=None)
    p_check.add_argument("--jobs", type=int, default=1)
    p_check.add_argument("--filter", default="",
                         help="only scenarios whose name contains this")
    p_check.add_argument("--check-only", action="store_true")

    p_plot = sub.add_parser("plotdata", help="columnar plot exports")
    p_plot.add_argument("--run", required=True, help="scenario run directory")
    p_plot.add_argument("--kind", required=True)
    p_plot.add_argument("--out", default="plotdata")

    args = parser.parse_args(argv)

    try:
        if args.verb == "list-scenarios":
            for name in list_builtin_scenarios():
                print(name)
            return 0

        if args.verb == "plotdata":
            for path in emit_plotdata(args.run, args.kind, args.out):
                print(path)
            return 0

        if args.verb == "run":
            names = [args.scenario]
        else:
            names = [n for n in list_builtin_scenarios()
                     if args.filter in n]
            if not names:
                print(f"no scenarios match filter {args.filter!r}",
                      file=sys.stderr)
                return 2

        jobs = [(n, args.seed, args.out, args.check_only) for n in names]
        if getattr(args, "jobs", 1) > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                reports = list(pool.map(_run_one, jobs))
        else:
            reports = [_run_one(job) for job in jobs]

        ok = True
        for report in reports:
            _print_report(report)
            ok = ok and report.passed
        return 0 if ok else 1
    except (ScenarioError, PlotDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
