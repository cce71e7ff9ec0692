"""Command line entry point: ``jkwalk <subcommand> --config PATH``.

Exit codes: 0 success, 1 invalid input or usage, 2 tolerance failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .errors import CapacityError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_TOLERANCE = 0, 1, 2

COMMANDS = {
    "simulate": harness.simulate,
    "theory": harness.theory_table,
    "compare": harness.compare,
    "genfun-check": harness.genfun_check,
    "scaled-dist": harness.run_fig4,
    "tree-check": harness.tree_check,
}
CHECKED = {"compare", "genfun-check", "scaled-dist", "tree-check"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="jkwalk", description="Quantum walks on joined half lines.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, type=Path, help="JSON experiment config")
    ap.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
    ap.add_argument("--t", type=int, help="override the config's time")
    ap.add_argument("--seed", type=int, help="override the config's seed")
    ap.add_argument("--tolerance", type=float, help="override the pass threshold")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    try:
        cfg = harness.ExperimentConfig.load(args.config).override(args.t, args.seed,
                                                                 args.tolerance)
        result = COMMANDS[args.command](cfg)
    except (ValidationError, CapacityError) as exc:
        print(f"jkwalk: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = result.to_csv()
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    if args.command in CHECKED and not result.passed:
        print(f"jkwalk: {args.command} exceeded tolerance", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
