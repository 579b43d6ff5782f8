"""Command line entry: `harness run <script> --expect <expectation>`.

Exit 0 when the recorded run matches the expectation, 1 on mismatch
(details on standard output), 2 when the script or the expectation
file cannot be processed.
"""

from __future__ import annotations

import argparse
import sys

from .runner import SchemaError, ScriptError, compare, load_expectation, run_script

EXIT_PASS = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harness",
        description="Replay a generated turtle script headlessly and compare it to its expectation file.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute a script against the recorder")
    run.add_argument("script", help="script produced by the generator")
    run.add_argument("--expect", required=True, metavar="FILE", help="expectation JSON")
    return parser


def run_cli(argv) -> int:
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as exc:
        code = exc.code or 0
        return EXIT_ERROR if code not in (0,) else 0

    try:
        recorded = run_script(args.script)
        expectation = load_expectation(args.expect)
    except (ScriptError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    report = compare(recorded, expectation)
    if report.passed:
        print(f"pass: {len(recorded.calls)} calls match; final pose "
              f"({recorded.x}, {recorded.y}, {recorded.heading}, {recorded.pen})")
        return EXIT_PASS
    for problem in report.problems:
        print(f"mismatch: {problem}")
    return EXIT_MISMATCH


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
