"""Command line front end.

Three subcommands: `check` runs the two verdicts on a world file and
an optional plan, `gen` writes artifacts for a valid plan, and `repl`
starts the interactive session. Exit codes: 0 all requested checks
pass, 1 plan invalid, 2 goal unreachable, 3 parse or configuration
error, 4 state bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import IO, Sequence

from .checking import ReachVerdict, check_goal, check_plan
from .codegen import CodegenOptions, generate_cspm, generate_expectation, generate_script, generate_svg
from .csp import DEFAULT_STATE_CAP, StateBoundExceeded
from .planio import ParseError, format_plan, parse_plan, parse_world
from .world import (
    Direction,
    EVENT_ORDER,
    InvalidWorld,
    Plan,
    PlanVerdict,
    Position,
    WorldSpec,
)

EXIT_OK = 0
EXIT_PLAN_INVALID = 1
EXIT_UNREACHABLE = 2
EXIT_CONFIG = 3
EXIT_BOUND = 4


class _CliError(Exception):
    """Configuration problem; message goes to stderr, exit code 3."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 3
        raise _CliError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="turtlecheck",
        description="Verify grid-world turtle plans and generate runnable artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="check a plan and goal reachability")
    _world_args(check)
    _plan_args(check, required=False)
    check.add_argument("--json", metavar="FILE", help="also write a JSON report")

    gen = sub.add_parser("gen", help="generate artifacts from a valid plan")
    _world_args(gen)
    _plan_args(gen, required=True)
    gen.add_argument("--script", metavar="FILE", help="write a turtle-package script")
    gen.add_argument("--svg", metavar="FILE", help="write an SVG rendering")
    gen.add_argument("--expect", metavar="FILE", help="write a JSON expectation file")
    gen.add_argument("--cspm", metavar="FILE", help="write a CSPM cross-validation script")
    gen.add_argument("--unit", type=int, default=50, help="canvas pixels per grid cell")

    repl = sub.add_parser("repl", help="interactive session")
    repl.add_argument(
        "--state-cap", type=int, default=DEFAULT_STATE_CAP, help=argparse.SUPPRESS
    )
    return parser


def _world_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--world", metavar="FILE", required=True, help="world description file")
    sub.add_argument(
        "--state-cap",
        type=int,
        default=DEFAULT_STATE_CAP,
        help="abort exploration past this many states",
    )


def _plan_args(sub: argparse.ArgumentParser, required: bool) -> None:
    group = sub.add_mutually_exclusive_group(required=required)
    group.add_argument("--plan", metavar="TOKENS", help="plan as a token string")
    group.add_argument("--plan-file", metavar="FILE", help="plan read from a file")


def run_batch(argv: Sequence[str], stdout: IO[str] | None = None, stderr: IO[str] | None = None) -> int:
    """Run one batch invocation; returns the exit code."""
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    try:
        args = build_parser().parse_args(list(argv))
    except _CliError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        if args.command == "check":
            return _cmd_check(args, out)
        if args.command == "gen":
            return _cmd_gen(args, out)
        return _cmd_repl(args)
    except _CliError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    except StateBoundExceeded as exc:
        print(f"error: {exc}", file=err)
        return EXIT_BOUND


def main() -> None:
    sys.exit(run_batch(sys.argv[1:]))


def _read_file(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc.strerror}") from exc


def _load_world(path: str) -> WorldSpec:
    try:
        return parse_world(_read_file(path))
    except ParseError as exc:
        raise _CliError(f"{path}: {exc}") from exc


def _load_plan(args) -> Plan | None:
    if args.plan is not None:
        text, origin = args.plan, "--plan"
    elif args.plan_file is not None:
        text, origin = _read_file(args.plan_file), args.plan_file
    else:
        return None
    try:
        return parse_plan(text)
    except ParseError as exc:
        raise _CliError(f"{origin}: {exc}") from exc


def _cmd_check(args, out: IO[str]) -> int:
    world = _load_world(args.world)
    plan = _load_plan(args)
    plan_verdict = check_plan(world, plan, state_cap=args.state_cap) if plan is not None else None
    reach = check_goal(world, state_cap=args.state_cap)

    print(_plan_line(plan_verdict, plan), file=out)
    print(_goal_line(reach), file=out)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as handle:
            handle.write(report_json(plan_verdict, reach))
    if plan_verdict is not None and not plan_verdict.valid:
        return EXIT_PLAN_INVALID
    if not reach.reachable:
        return EXIT_UNREACHABLE
    return EXIT_OK


def _cmd_gen(args, out: IO[str]) -> int:
    world = _load_world(args.world)
    plan = _load_plan(args)
    try:
        opts = CodegenOptions(unit=args.unit)
    except ValueError as exc:
        raise _CliError(str(exc)) from None

    verdict = check_plan(world, plan, state_cap=args.state_cap)
    if not verdict.valid:
        print(_plan_line(verdict, plan), file=out)
        print("no artifacts generated", file=out)
        return EXIT_PLAN_INVALID

    wrote = False
    for path, text in (
        (args.script, lambda: generate_script(world, plan, opts)),
        (args.svg, lambda: generate_svg(world, plan, opts)),
        (args.expect, lambda: generate_expectation(world, plan, opts)),
        (args.cspm, lambda: generate_cspm(world, plan)),
    ):
        if path:
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(text())
            print(f"wrote {path}", file=out)
            wrote = True
    if not wrote:
        print("plan is valid (no output files requested)", file=out)
    return EXIT_OK


def _cmd_repl(args) -> int:
    return run_repl(sys.stdin, sys.stdout, state_cap=args.state_cap)


# --- report formatting ------------------------------------------------------


def _plan_line(verdict: PlanVerdict | None, plan: Plan | None) -> str:
    if verdict is None:
        return "plan: not checked"
    if verdict.valid:
        count = len(plan or ())
        return f"plan: Valid ({count} event{'s' if count != 1 else ''})"
    ev = plan[verdict.failure_index]
    enabled = sorted(
        verdict.enabled_at_failure, key=lambda v: EVENT_ORDER.index(v.name)
    )
    enabled_text = " ".join(e.name for e in enabled) if enabled else "(none)"
    return (
        f"plan: Invalid at index {verdict.failure_index}: "
        f"{ev.name} refused ({verdict.reason.value}); enabled here: {enabled_text}"
    )


def _goal_line(reach: ReachVerdict) -> str:
    if reach.reachable:
        witness = format_plan(reach.witness) if reach.witness else "(already at goal)"
        return f"goal: Reachable; witness: {witness}"
    return "goal: Unreachable"


def report_json(plan_verdict: PlanVerdict | None, reach: ReachVerdict) -> str:
    """The machine-readable report; byte-stable for identical inputs."""
    if plan_verdict is None:
        plan_part = None
    else:
        plan_part = {
            "status": plan_verdict.status.value,
            "failure_index": plan_verdict.failure_index,
            "reason": plan_verdict.reason.value if plan_verdict.reason else None,
        }
    doc = {
        "plan": plan_part,
        "goal": {
            "status": reach.status.value,
            "witness": [e.name for e in reach.witness] if reach.witness is not None else None,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --- interactive session ----------------------------------------------------

_POSE_CHAR = {
    Direction.EAST: ">",
    Direction.NORTH: "^",
    Direction.WEST: "<",
    Direction.SOUTH: "v",
}

_REPL_COMMANDS = "world, obstacle, clear, goal, plan, check, map, gen, quit"


@dataclass
class SessionState:
    """What the interactive session has configured so far."""

    width: int | None = None
    height: int | None = None
    obstacles: set[Position] = field(default_factory=set)
    goal: Position | None = None
    plan: Plan | None = None
    report: tuple | None = None  # (PlanVerdict | None, ReachVerdict), last check

    def world(self) -> WorldSpec:
        if self.width is None:
            raise _ReplError("no world configured (use: world W H)")
        if self.goal is None:
            raise _ReplError("no goal configured (use: goal X Y)")
        return WorldSpec(self.width, self.height, self.goal, frozenset(self.obstacles))


class _ReplError(Exception):
    pass


def run_repl(in_stream: IO[str], out_stream: IO[str], state_cap: int = DEFAULT_STATE_CAP) -> int:
    """Line-oriented interactive session; errors leave state unchanged."""
    session = SessionState()
    for raw in in_stream:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "quit":
            break
        try:
            done_output = _repl_dispatch(session, line, state_cap)
        except _ReplError as exc:
            print(f"error: {exc}", file=out_stream)
            continue
        except StateBoundExceeded as exc:
            print(f"error: {exc}", file=out_stream)
            continue
        for text in done_output:
            print(text, file=out_stream)
    return EXIT_OK


def _repl_dispatch(session: SessionState, line: str, state_cap: int) -> list[str]:
    tokens = line.split()
    command, rest = tokens[0], tokens[1:]

    if command == "world":
        w, h = _two_ints(rest, "world W H")
        try:
            WorldSpec(w, h, Position(0, 0))
        except InvalidWorld as exc:
            raise _ReplError(str(exc)) from None
        session.width, session.height = w, h
        session.obstacles.clear()
        session.goal = None
        session.report = None
        return [f"world set: {w} x {h} (obstacles and goal cleared)"]

    if command == "obstacle":
        _need_world(session)
        pos = Position(*_two_ints(rest, "obstacle X Y"))
        if not (0 <= pos.x < session.width and 0 <= pos.y < session.height):
            raise _ReplError(f"obstacle {tuple(pos)} is outside the world")
        if pos == Position(0, 0):
            raise _ReplError("the start cell (0, 0) cannot be an obstacle")
        if pos == session.goal:
            raise _ReplError(f"obstacle {tuple(pos)} would sit on the goal")
        session.obstacles.add(pos)
        session.report = None
        return [f"obstacle added: ({pos.x}, {pos.y})"]

    if command == "clear":
        if rest:
            raise _ReplError("usage: clear")
        session.obstacles.clear()
        session.report = None
        return ["obstacles cleared"]

    if command == "goal":
        _need_world(session)
        pos = Position(*_two_ints(rest, "goal X Y"))
        if not (0 <= pos.x < session.width and 0 <= pos.y < session.height):
            raise _ReplError(f"goal {tuple(pos)} is outside the world")
        if pos in session.obstacles:
            raise _ReplError(f"goal {tuple(pos)} would sit on an obstacle")
        session.goal = pos
        session.report = None
        return [f"goal set: ({pos.x}, {pos.y})"]

    if command == "plan":
        try:
            plan = parse_plan(" ".join(rest))
        except ParseError as exc:
            raise _ReplError(exc.message) from None
        session.plan = plan
        session.report = None
        return [f"plan set: {format_plan(plan)}" if plan else "plan set: (empty)"]

    if command == "check":
        if rest:
            raise _ReplError("usage: check")
        world = session.world()
        plan_verdict = (
            check_plan(world, session.plan, state_cap=state_cap)
            if session.plan is not None
            else None
        )
        reach = check_goal(world, state_cap=state_cap)
        session.report = (plan_verdict, reach)
        lines = [_plan_line(plan_verdict, session.plan)]
        if session.plan is None:
            lines[0] = "plan: not set"
        lines.append(_goal_line(reach))
        return lines

    if command == "map":
        if rest:
            raise _ReplError("usage: map")
        _need_world(session)
        return _render_map(session)

    if command == "gen":
        if len(rest) != 1:
            raise _ReplError("usage: gen BASENAME")
        world = session.world()
        if session.plan is None:
            raise _ReplError("no plan configured (use: plan TOKENS)")
        verdict = check_plan(world, session.plan, state_cap=state_cap)
        if not verdict.valid:
            raise _ReplError(
                f"plan is Invalid at index {verdict.failure_index} "
                f"({verdict.reason.value}); nothing generated"
            )
        base = rest[0]
        opts = CodegenOptions()
        outputs = [
            (f"{base}.py", generate_script(world, session.plan, opts)),
            (f"{base}.svg", generate_svg(world, session.plan, opts)),
            (f"{base}.json", generate_expectation(world, session.plan, opts)),
            (f"{base}.csp", generate_cspm(world, session.plan)),
        ]
        lines = []
        for path, text in outputs:
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(text)
            lines.append(f"wrote {path}")
        return lines

    raise _ReplError(f"unknown command {command!r} (try: {_REPL_COMMANDS})")


def _need_world(session: SessionState) -> None:
    if session.width is None:
        raise _ReplError("no world configured (use: world W H)")


def _two_ints(tokens: list[str], usage: str) -> tuple[int, int]:
    if len(tokens) != 2:
        raise _ReplError(f"usage: {usage}")
    try:
        return int(tokens[0], 10), int(tokens[1], 10)
    except ValueError:
        raise _ReplError(f"usage: {usage} (integers)") from None


def _render_map(session: SessionState) -> list[str]:
    rows = []
    for y in range(session.height - 1, -1, -1):
        cells = []
        for x in range(session.width):
            pos = Position(x, y)
            if pos == Position(0, 0):
                cells.append(_POSE_CHAR[Direction.EAST])
            elif pos in session.obstacles:
                cells.append("#")
            elif pos == session.goal:
                cells.append("G")
            else:
                cells.append(".")
        rows.append(" ".join(cells))
    return rows
