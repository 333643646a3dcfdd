#!/usr/bin/env python3
"""
CLI for the experiments of the lab
Script CLI para los experimentos del laboratorio

Usage:
    python scripts/run_lab.py constants
    python scripts/run_lab.py dichotomy --resolution-scale 2 --out results/hi
    python scripts/run_lab.py single-run --config my_run.yaml --seed 3

Exit codes: 0 all assertions pass, 1 assertion failure, 2 configuration error.
"""

import argparse
import logging
import sys
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from modules.runner import RunResult, run_config_file, run_pack

SUBCOMMANDS = {
    "constants": "constants",
    "dichotomy": "dichotomy",
    "farcenter": "farcenter",
    "defocusing": "defocusing",
    "single-run": "single_run",
}

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def print_result(kind: str, result: RunResult) -> None:
    print(f"\n{'='*60}")
    print(f"Experiment: {kind}  (trace {result.trace_id[:8]}, {result.duration_ms} ms)")
    print(f"{'='*60}")

    if result.error:
        print(f"\n[FAIL] {result.error}")
        return

    summary = result.summary
    if summary.constants:
        print("\n[Constants]")
        for row in summary.constants:
            exact = "-" if row.exact is None else f"{row.exact:.8g}"
            error = "-" if row.relative_error is None else f"{row.relative_error:.2e}"
            print(f"  {row.name:<14} measured {row.measured:<16.10g} exact {exact:<14} rel.err {error}")

    if summary.bracket:
        b = summary.bracket
        print(f"\n[Bracket] [{b.low:.6g}, {b.high:.6g}]  {b.low_verdict} / {b.high_verdict}"
              f"  iterations {b.iterations}, widened {b.widened}")

    if summary.runs:
        print("\n[Runs]")
        for run_id, run in summary.runs.items():
            print(f"  {run_id:<24} {run.status}")

    print("\n[Assertions]")
    for name, ok in summary.assertions.items():
        print(f"  [{'OK' if ok else 'FAIL'}] {name}")
    if result.checks:
        for hit in result.checks.hits:
            print(f"  [{'OK' if hit.passed else 'FAIL'}] check {hit.check_id}: {hit.name} (observed {hit.observed})")

    print(f"\nSummary: {result.summary_path}")
    print(f"\n{'[OK] All assertions pass' if result.success else '[FAIL] Some assertions failed'}")


def main():
    """Main CLI entry point / Punto de entrada CLI principal"""
    parser = argparse.ArgumentParser(description="Numerical experiments for the energy-critical inhomogeneous NLS")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, help=f"Run the {name} experiment")
        sub.add_argument("--config", "-c", type=Path,
                         help="Config file (default: the experiment pack in config/yamls)")
        sub.add_argument("--out", "-o", type=Path, help="Output directory (overrides the config)")
        sub.add_argument("--resolution-scale", type=float,
                         help="Multiply node counts by FACTOR (dt follows h^2)")
        sub.add_argument("--seed", type=int, help="Random seed (overrides the config)")
        sub.add_argument("--log-level", default="INFO",
                         choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level")

    args = parser.parse_args()
    logging.basicConfig(level=args.log_level, format=LOG_FORMAT)

    kind = SUBCOMMANDS[args.command]
    overrides = {"output_dir": args.out, "resolution_scale": args.resolution_scale, "seed": args.seed}
    if args.config:
        result = run_config_file(args.config, kind=kind, **overrides)
    else:
        result = run_pack(kind, **overrides)

    print_result(kind, result)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
