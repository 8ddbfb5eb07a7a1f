"""Command-line entry point: ``cokl run`` and ``cokl validate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import CoklError, ConfigError
from .experiment import load_config, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ALL_FAILED = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cokl", description="Incomplete multi-view clustering experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep described by a JSON config")
    run.add_argument("config", help="path to the config JSON file")
    run.add_argument("--out", metavar="DIR", help="output directory (overrides output_dir)")
    run.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
    run.add_argument("--resume", action="store_true",
                     help="skip (method, rate, repeat) records already in runs.jsonl")

    val = sub.add_parser("validate", help="check a config and print its normalized form")
    val.add_argument("config", help="path to the config JSON file")
    return parser


def _report_config_error(exc: ConfigError):
    print("config error:", file=sys.stderr)
    for v in exc.violations:
        print(f"  {v}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        _report_config_error(exc)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        print(json.dumps(config.to_dict(), indent=2))
        return EXIT_OK

    if args.jobs < 1:
        print("--jobs must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_experiment(config, args.out, jobs=args.jobs, resume=args.resume)
    except (CoklError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    n_err = sum("error" in r for r in result.records)
    print(f"{len(result.records)} runs ({n_err} failed) written to {result.output_dir}")
    return EXIT_ALL_FAILED if result.all_failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
