"""Command-line entry points: run sweeps, check oracles, fit rates, aggregate.

Exit status is 0 on success, 1 when an oracle suite fails, and 2 when a
config or input file is invalid.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import harness
from .errors import ConfigError, InsufficientData


def _cmd_run(args) -> int:
    config = harness.load_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
    if args.output is not None:
        config = dataclasses.replace(config, output_path=args.output)
    records = harness.run_experiment(config, jobs=args.jobs)
    n_ok = sum(1 for r in records if r.status == "ok")
    dest = config.output_path or "<stdout>"
    if not config.output_path:
        sys.stdout.write(harness.records_to_csv(records))
    print(f"{len(records)} records ({n_ok} ok) -> {dest}", file=sys.stderr)
    return 0


def _cmd_oracles(args) -> int:
    seed = 2026 if args.seed is None else args.seed
    report = harness.run_oracles(master_seed=seed, fast=args.fast)
    text = json.dumps(report, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    failed = [r["quantity"] for r in report if not r["pass"]]
    if failed:
        print(f"FAILED suites: {', '.join(failed)}", file=sys.stderr)
        return 1
    print(f"all {len(report)} oracle suites pass", file=sys.stderr)
    return 0


def _cmd_fit(args) -> int:
    with open(args.input) as fh:
        records = harness.records_from_csv(fh.read())
    slope, intercept, stderr = harness.fit_rate(records, args.method)
    print(json.dumps({
        "method": args.method,
        "slope": slope,
        "intercept": intercept,
        "stderr": stderr,
    }))
    return 0


def _cmd_aggregate(args) -> int:
    with open(args.input) as fh:
        records = harness.records_from_csv(fh.read())
    text = harness.aggregate_to_csv(harness.aggregate(records))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dppquad",
        description="kernel quadrature experiments with determinantal node sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None, help="master seed override")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--output", default=None, help="CSV path override")
    p_run.set_defaults(func=_cmd_run)

    p_or = sub.add_parser("oracles", help="run the numerical oracle suites")
    p_or.add_argument("--seed", type=int, default=None)
    p_or.add_argument("--output", default=None, help="JSON report path")
    p_or.add_argument("--fast", action="store_true", help="reduced Monte Carlo sizes")
    p_or.set_defaults(func=_cmd_oracles)

    p_fit = sub.add_parser("fit", help="fit a log-log rate for one method")
    p_fit.add_argument("--input", required=True, help="sweep CSV")
    p_fit.add_argument("--method", required=True)
    p_fit.set_defaults(func=_cmd_fit)

    p_agg = sub.add_parser("aggregate", help="mean and quartiles per (method, N)")
    p_agg.add_argument("--input", required=True, help="sweep CSV")
    p_agg.add_argument("--output", default=None)
    p_agg.set_defaults(func=_cmd_aggregate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, InsufficientData) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
