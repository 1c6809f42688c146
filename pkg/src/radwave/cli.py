"""Command line entry point: ``radwave <experiment> --scenario file.yaml``."""
from __future__ import annotations

import argparse
import sys

from . import runner


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radwave", description="Radial wave experiments driven by scenario files.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in runner.EXPERIMENTS:
        p = sub.add_parser(name, help=f"run a {name} scenario")
        p.add_argument("--scenario", required=True, help="YAML scenario file")
        p.add_argument("--out", default="runs", help="output directory (default: runs)")
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--check", action="store_true", help="only check the scenario's invariants")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = runner.load_scenario(args.scenario)
    except (runner.ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if sc.experiment != args.experiment:
        print(f"error: scenario is a {sc.experiment!r} run, not {args.experiment!r}", file=sys.stderr)
        return 2
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            print("error: --seed must lie in [0, 2**64)", file=sys.stderr)
            return 2
        sc.seed = args.seed
    if args.check:
        checks = runner.check_scenario(sc)
        for k, v in checks.items():
            print(f"{'ok  ' if v else 'FAIL'} {k}")
        return 0 if all(checks.values()) else 1
    record = runner.execute(sc)
    path = runner.write_record(record, args.out)
    print(f"wrote {path} ({record['timing']['wall_time_s']:.2f} s)")
    if record["body"]["error"]:
        print(f"numerical failure: {record['body']['error']}", file=sys.stderr)
    failed = runner.failed_assertions(record)
    for name in failed:
        print(f"invariant failed: {name}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
