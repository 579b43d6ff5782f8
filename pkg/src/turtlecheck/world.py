"""Grid-world turtle: direct semantics and the CSP process model.

The agent lives on a bounded integer grid, starts at (0, 0) facing
East with the pen down, and reacts to seven events: fd, bk, lt, rt,
pu, pd, and goal. `enabled_events`/`apply_event` give the direct
transition semantics, `simulate` replays whole plans, and
`build_turtle_process` builds the equivalent CSP process (a navigation
process per direction, interleaved with a two-state pen flip-flop).
`reachable_cells` is the independent BFS oracle the refinement-based
goal check is tested against.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple, Sequence

from .csp import (
    Interleave,
    Prefix,
    ProcessEnv,
    ProcessExpr,
    Ref,
    Visible,
    choice,
)

FD = Visible("fd")
BK = Visible("bk")
LT = Visible("lt")
RT = Visible("rt")
PU = Visible("pu")
PD = Visible("pd")
GOAL = Visible("goal")

#: The turtle alphabet in canonical order (used for deterministic output).
ALPHABET = (FD, BK, LT, RT, PU, PD, GOAL)
EVENT_ORDER = tuple(e.name for e in ALPHABET)

#: Everything the goal-reachability check hides: movement, turning, and
#: pen events. Only `goal` stays observable.
NAV_EVENTS = frozenset((FD, BK, LT, RT, PU, PD))

MAX_DIMENSION = 64

Plan = tuple[Visible, ...]


class InvalidWorld(ValueError):
    """World description violates a structural invariant."""


class Direction(Enum):
    """Cardinal heading, valued in degrees (East = 0, counterclockwise)."""

    EAST = 0
    NORTH = 90
    WEST = 180
    SOUTH = 270

    @property
    def left(self) -> "Direction":
        return _LEFT[self]

    @property
    def right(self) -> "Direction":
        return _RIGHT[self]


_LEFT = {
    Direction.EAST: Direction.NORTH,
    Direction.NORTH: Direction.WEST,
    Direction.WEST: Direction.SOUTH,
    Direction.SOUTH: Direction.EAST,
}
_RIGHT = {v: k for k, v in _LEFT.items()}
_DELTA = {
    Direction.EAST: (1, 0),
    Direction.NORTH: (0, 1),
    Direction.WEST: (-1, 0),
    Direction.SOUTH: (0, -1),
}


class Position(NamedTuple):
    x: int
    y: int

    def moved(self, direction: Direction) -> "Position":
        dx, dy = _DELTA[direction]
        return Position(self.x + dx, self.y + dy)


class Pen(Enum):
    DOWN = "down"
    UP = "up"


@dataclass(frozen=True)
class WorldSpec:
    """Bounded grid with obstacles and a single goal cell.

    The start cell (0, 0) may never be an obstacle, and the goal may
    not sit on one either.
    """

    width: int
    height: int
    goal: Position
    obstacles: frozenset[Position] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "goal", Position(*self.goal))
        object.__setattr__(
            self, "obstacles", frozenset(Position(*p) for p in self.obstacles)
        )
        if self.width < 1 or self.height < 1:
            raise InvalidWorld("world dimensions must be at least 1 x 1")
        if self.width > MAX_DIMENSION or self.height > MAX_DIMENSION:
            raise InvalidWorld(
                f"world dimensions are capped at {MAX_DIMENSION} x {MAX_DIMENSION}"
            )
        for p in self.obstacles:
            if not self.in_bounds(p):
                raise InvalidWorld(f"obstacle {tuple(p)} is out of bounds")
        if not self.in_bounds(self.goal):
            raise InvalidWorld(f"goal {tuple(self.goal)} is out of bounds")
        if Position(0, 0) in self.obstacles:
            raise InvalidWorld("the start cell (0, 0) cannot be an obstacle")
        if self.goal in self.obstacles:
            raise InvalidWorld("the goal cannot sit on an obstacle")

    def in_bounds(self, pos: Position) -> bool:
        return 0 <= pos.x < self.width and 0 <= pos.y < self.height

    def passable(self, pos: Position) -> bool:
        return self.in_bounds(pos) and pos not in self.obstacles


@dataclass(frozen=True)
class TurtleState:
    pos: Position
    direction: Direction
    pen: Pen


START_STATE = TurtleState(Position(0, 0), Direction.EAST, Pen.DOWN)


class FailReason(Enum):
    OUT_OF_BOUNDS = "OutOfBounds"
    OBSTACLE = "Obstacle"
    PEN_REDUNDANT = "PenRedundant"
    GOAL_NOT_HERE = "GoalNotHere"


class EventNotEnabled(Exception):
    def __init__(self, ev: Visible, reason: FailReason):
        super().__init__(f"{ev.name} is not enabled here ({reason.value})")
        self.event = ev
        self.reason = reason


# Equal-but-distinct Visible instances are mapped onto the module
# singletons once at the API boundary; the hot paths then dispatch by
# identity.
_CANONICAL = {e: e for e in ALPHABET}


def _canon(ev: Visible) -> Visible:
    return _CANONICAL.get(ev, ev)


def _blocked_reason(world: WorldSpec, state: TurtleState, ev: Visible) -> FailReason | None:
    """Why ev is disabled at this state, or None when it is enabled.

    Expects a canonical event (see _canon)."""
    if ev is FD or ev is BK:
        dx, dy = _DELTA[state.direction]
        if ev is BK:
            dx, dy = -dx, -dy
        tx, ty = state.pos.x + dx, state.pos.y + dy
        if not (0 <= tx < world.width and 0 <= ty < world.height):
            return FailReason.OUT_OF_BOUNDS
        if (tx, ty) in world.obstacles:
            return FailReason.OBSTACLE
        return None
    if ev is LT or ev is RT:
        return None
    if ev is PU:
        return None if state.pen is Pen.DOWN else FailReason.PEN_REDUNDANT
    if ev is PD:
        return None if state.pen is Pen.UP else FailReason.PEN_REDUNDANT
    if ev is GOAL:
        return None if state.pos == world.goal else FailReason.GOAL_NOT_HERE
    raise ValueError(f"unknown turtle event {ev!r}")


def _opposite(direction: Direction) -> Direction:
    return direction.left.left


def _transition(state: TurtleState, ev: Visible) -> TurtleState:
    """Apply an already-checked canonical event."""
    if ev is FD:
        return TurtleState(state.pos.moved(state.direction), state.direction, state.pen)
    if ev is BK:
        return TurtleState(
            state.pos.moved(_opposite(state.direction)), state.direction, state.pen
        )
    if ev is LT:
        return TurtleState(state.pos, state.direction.left, state.pen)
    if ev is RT:
        return TurtleState(state.pos, state.direction.right, state.pen)
    if ev is PU:
        return TurtleState(state.pos, state.direction, Pen.UP)
    if ev is PD:
        return TurtleState(state.pos, state.direction, Pen.DOWN)
    return state  # goal: self-loop, state unchanged


def enabled_events(world: WorldSpec, state: TurtleState) -> frozenset[Visible]:
    """The turtle events available at this state."""
    out = {LT, RT, PU if state.pen is Pen.DOWN else PD}
    x, y = state.pos
    dx, dy = _DELTA[state.direction]
    tx, ty = x + dx, y + dy
    if 0 <= tx < world.width and 0 <= ty < world.height and (tx, ty) not in world.obstacles:
        out.add(FD)
    tx, ty = x - dx, y - dy
    if 0 <= tx < world.width and 0 <= ty < world.height and (tx, ty) not in world.obstacles:
        out.add(BK)
    if state.pos == world.goal:
        out.add(GOAL)
    return frozenset(out)


def apply_event(world: WorldSpec, state: TurtleState, ev: Visible) -> TurtleState:
    """Perform one enabled event; raises EventNotEnabled otherwise."""
    ev = _canon(ev)
    reason = _blocked_reason(world, state, ev)
    if reason is not None:
        raise EventNotEnabled(ev, reason)
    return _transition(state, ev)


class PlanStatus(Enum):
    VALID = "valid"
    INVALID = "invalid"


@dataclass(frozen=True)
class PlanVerdict:
    """Whether a plan replays, and where and why it failed if not."""

    status: PlanStatus
    failure_index: int | None = None
    reason: FailReason | None = None
    enabled_at_failure: frozenset[Visible] | None = None

    @property
    def valid(self) -> bool:
        return self.status is PlanStatus.VALID


@dataclass(frozen=True)
class SimResult:
    """Replay record: every intermediate state plus the drawn segments."""

    states: tuple[TurtleState, ...]
    segments: tuple[tuple[Position, Position], ...]
    verdict: PlanVerdict

    @property
    def final(self) -> TurtleState:
        return self.states[-1]


def simulate(world: WorldSpec, plan: Sequence[Visible]) -> SimResult:
    """Replay a plan from the start state under the direct semantics.

    Stops at the first disabled event; a unit segment is recorded for
    every move taken while the pen is down.
    """
    state = START_STATE
    states = [state]
    segments: list[tuple[Position, Position]] = []
    for i, ev in enumerate(plan):
        ev = _canon(ev)
        reason = _blocked_reason(world, state, ev)
        if reason is not None:
            verdict = PlanVerdict(
                PlanStatus.INVALID,
                failure_index=i,
                reason=reason,
                enabled_at_failure=enabled_events(world, state),
            )
            return SimResult(tuple(states), tuple(segments), verdict)
        nxt = _transition(state, ev)
        if (ev is FD or ev is BK) and state.pen is Pen.DOWN:
            segments.append((state.pos, nxt.pos))
        state = nxt
        states.append(state)
    return SimResult(tuple(states), tuple(segments), PlanVerdict(PlanStatus.VALID))


def reachable_cells(world: WorldSpec) -> frozenset[Position]:
    """Cells reachable from (0, 0); plain 4-adjacency BFS.

    Turning makes every free neighbour accessible, so reachability of
    the process model collapses to graph reachability. This is the
    oracle the refinement-based goal check is swept against.
    """
    start = Position(0, 0)
    seen = {start}
    queue = deque([start])
    while queue:
        pos = queue.popleft()
        for direction in Direction:
            nxt = pos.moved(direction)
            if nxt not in seen and world.passable(nxt):
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


# ---------------------------------------------------------------------------
# CSP process construction

_NAV_NAME = {
    Direction.EAST: "NavEast",
    Direction.NORTH: "NavNorth",
    Direction.WEST: "NavWest",
    Direction.SOUTH: "NavSouth",
}


def _nav_builder(world: WorldSpec, direction: Direction):
    def build(x: int, y: int) -> ProcessExpr:
        pos = Position(x, y)
        branches = []
        ahead = pos.moved(direction)
        if world.passable(ahead):
            branches.append(Prefix(FD, Ref(_NAV_NAME[direction], ahead)))
        behind = pos.moved(_opposite(direction))
        if world.passable(behind):
            branches.append(Prefix(BK, Ref(_NAV_NAME[direction], behind)))
        branches.append(Prefix(LT, Ref(_NAV_NAME[direction.left], pos)))
        branches.append(Prefix(RT, Ref(_NAV_NAME[direction.right], pos)))
        if pos == world.goal:
            branches.append(Prefix(GOAL, Ref(_NAV_NAME[direction], pos)))
        return choice(*branches)

    return build


@lru_cache(maxsize=64)
def build_turtle_process(world: WorldSpec) -> tuple[ProcessExpr, ProcessEnv]:
    """The turtle as a process: per-direction navigation, interleaved
    with the pen flip-flop, started at (0, 0) facing East.

    The navigation family offers exactly the movement, turning, and
    goal events that `enabled_events` allows; the flip-flop alternates
    pu and pd starting from pen-down.
    """
    env = ProcessEnv()
    for direction in Direction:
        env.define(_NAV_NAME[direction], 2, _nav_builder(world, direction))
    env.define("PenDown", 0, lambda: Prefix(PU, Ref("PenUp")))
    env.define("PenUp", 0, lambda: Prefix(PD, Ref("PenDown")))
    main = Interleave(Ref(_NAV_NAME[Direction.EAST], (0, 0)), Ref("PenDown"))
    return main, env
