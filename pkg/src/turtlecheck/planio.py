"""Parsing and serialization for world files and plan text.

World files are line based, one directive per line::

    world <width> <height>     required, first directive
    obstacle <x> <y>           zero or more
    goal <x> <y>               required, exactly once

Blank lines and lines starting with ``#`` are ignored. Plans are
alphabet tokens (fd bk lt rt pu pd goal) separated by whitespace
and/or commas.
"""

from __future__ import annotations

import re
from enum import Enum

from .world import ALPHABET, MAX_DIMENSION, InvalidWorld, Plan, Position, WorldSpec

_TOKEN = re.compile(r"[^\s,]+")
_EVENT_BY_NAME = {e.name: e for e in ALPHABET}


class ParseErrorCode(Enum):
    UNKNOWN_TOKEN = "UnknownToken"
    UNKNOWN_DIRECTIVE = "UnknownDirective"
    MALFORMED_DIRECTIVE = "MalformedDirective"
    MISSING_WORLD_LINE = "MissingWorldLine"
    DUPLICATE_WORLD = "DuplicateWorld"
    MISSING_GOAL = "MissingGoal"
    DUPLICATE_GOAL = "DuplicateGoal"
    OUT_OF_BOUNDS_COORDINATE = "OutOfBoundsCoordinate"
    OBSTACLE_AT_START = "ObstacleAtStart"
    GOAL_ON_OBSTACLE = "GoalOnObstacle"


class ParseError(Exception):
    """Positioned input error; line and column are 1-based."""

    def __init__(self, code: ParseErrorCode, message: str, line: int, column: int = 1, lexeme: str = ""):
        super().__init__(f"line {line}: {message}")
        self.code = code
        self.message = message
        self.line = line
        self.column = column
        self.lexeme = lexeme


def _is_comment(line: str) -> bool:
    stripped = line.strip()
    return not stripped or stripped.startswith("#")


def parse_plan(text: str) -> Plan:
    """Tokenize plan text into the event sequence, preserving order."""
    events = []
    ordinal = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if _is_comment(line):
            continue
        for match in _TOKEN.finditer(line):
            ordinal += 1
            token = match.group()
            ev = _EVENT_BY_NAME.get(token)
            if ev is None:
                raise ParseError(
                    ParseErrorCode.UNKNOWN_TOKEN,
                    f"unknown plan token {token!r} (token {ordinal})",
                    line=lineno,
                    column=match.start() + 1,
                    lexeme=token,
                )
            events.append(ev)
    return tuple(events)


def _coordinate(token: str, lineno: int, column: int) -> int:
    try:
        value = int(token, 10)
    except ValueError:
        raise ParseError(
            ParseErrorCode.MALFORMED_DIRECTIVE,
            f"expected an integer, got {token!r}",
            line=lineno,
            column=column,
            lexeme=token,
        ) from None
    if value < 0:
        raise ParseError(
            ParseErrorCode.OUT_OF_BOUNDS_COORDINATE,
            f"coordinates are non-negative, got {token}",
            line=lineno,
            column=column,
            lexeme=token,
        )
    return value


def parse_world(text: str) -> WorldSpec:
    """Parse a world file into a validated WorldSpec."""
    width = height = None
    world_line = None
    obstacles: set[Position] = set()
    goal: Position | None = None
    last_line = 1

    for lineno, line in enumerate(text.splitlines(), start=1):
        last_line = lineno
        if _is_comment(line):
            continue
        matches = list(_TOKEN.finditer(line))
        if not matches:  # only separators on the line
            continue
        keyword = matches[0].group()
        args = matches[1:]

        if keyword == "world":
            if world_line is not None:
                raise ParseError(
                    ParseErrorCode.DUPLICATE_WORLD,
                    "world dimensions already given",
                    line=lineno,
                    lexeme=keyword,
                )
            if len(args) != 2:
                raise ParseError(
                    ParseErrorCode.MALFORMED_DIRECTIVE,
                    "usage: world <width> <height>",
                    line=lineno,
                    lexeme=line.strip(),
                )
            width = _coordinate(args[0].group(), lineno, args[0].start() + 1)
            height = _coordinate(args[1].group(), lineno, args[1].start() + 1)
            if not (1 <= width <= MAX_DIMENSION and 1 <= height <= MAX_DIMENSION):
                raise ParseError(
                    ParseErrorCode.MALFORMED_DIRECTIVE,
                    f"world dimensions must be between 1 x 1 and "
                    f"{MAX_DIMENSION} x {MAX_DIMENSION}, got {width} x {height}",
                    line=lineno,
                    lexeme=line.strip(),
                )
            world_line = lineno
            continue

        if world_line is None:
            raise ParseError(
                ParseErrorCode.MISSING_WORLD_LINE,
                "the first directive must be: world <width> <height>",
                line=lineno,
                lexeme=keyword,
            )

        if keyword == "obstacle":
            pos = _point(args, lineno, "obstacle <x> <y>", line)
            if not (pos.x < width and pos.y < height):
                raise ParseError(
                    ParseErrorCode.OUT_OF_BOUNDS_COORDINATE,
                    f"obstacle {tuple(pos)} is outside the {width} x {height} world",
                    line=lineno,
                    lexeme=line.strip(),
                )
            if pos == Position(0, 0):
                raise ParseError(
                    ParseErrorCode.OBSTACLE_AT_START,
                    "the start cell (0, 0) cannot be an obstacle",
                    line=lineno,
                    lexeme=line.strip(),
                )
            if goal is not None and pos == goal:
                raise ParseError(
                    ParseErrorCode.GOAL_ON_OBSTACLE,
                    f"obstacle {tuple(pos)} would sit on the goal",
                    line=lineno,
                    lexeme=line.strip(),
                )
            obstacles.add(pos)
        elif keyword == "goal":
            if goal is not None:
                raise ParseError(
                    ParseErrorCode.DUPLICATE_GOAL,
                    "goal already given",
                    line=lineno,
                    lexeme=line.strip(),
                )
            pos = _point(args, lineno, "goal <x> <y>", line)
            if not (pos.x < width and pos.y < height):
                raise ParseError(
                    ParseErrorCode.OUT_OF_BOUNDS_COORDINATE,
                    f"goal {tuple(pos)} is outside the {width} x {height} world",
                    line=lineno,
                    lexeme=line.strip(),
                )
            if pos in obstacles:
                raise ParseError(
                    ParseErrorCode.GOAL_ON_OBSTACLE,
                    f"goal {tuple(pos)} would sit on an obstacle",
                    line=lineno,
                    lexeme=line.strip(),
                )
            goal = pos
        else:
            raise ParseError(
                ParseErrorCode.UNKNOWN_DIRECTIVE,
                f"unknown directive {keyword!r}",
                line=lineno,
                lexeme=keyword,
            )

    if world_line is None:
        raise ParseError(
            ParseErrorCode.MISSING_WORLD_LINE,
            "world file needs a `world <width> <height>` line",
            line=last_line,
        )
    if goal is None:
        raise ParseError(
            ParseErrorCode.MISSING_GOAL,
            "world file needs a `goal <x> <y>` line",
            line=last_line,
        )
    try:
        return WorldSpec(width, height, goal, frozenset(obstacles))
    except InvalidWorld as exc:  # parse-level checks should have caught this
        raise ParseError(
            ParseErrorCode.MALFORMED_DIRECTIVE, str(exc), line=world_line
        ) from exc


def _point(args, lineno: int, usage: str, line: str) -> Position:
    if len(args) != 2:
        raise ParseError(
            ParseErrorCode.MALFORMED_DIRECTIVE,
            f"usage: {usage}",
            line=lineno,
            lexeme=line.strip(),
        )
    x = _coordinate(args[0].group(), lineno, args[0].start() + 1)
    y = _coordinate(args[1].group(), lineno, args[1].start() + 1)
    return Position(x, y)


def serialize_world(world: WorldSpec) -> str:
    """Canonical text form; obstacles sorted by (y, x). Round-trips
    through parse_world."""
    lines = [f"world {world.width} {world.height}"]
    for pos in sorted(world.obstacles, key=lambda p: (p.y, p.x)):
        lines.append(f"obstacle {pos.x} {pos.y}")
    lines.append(f"goal {world.goal.x} {world.goal.y}")
    return "\n".join(lines)


def format_plan(plan: Plan) -> str:
    """Space-separated token form, the inverse of parse_plan."""
    return " ".join(e.name for e in plan)
