"""Artifact generation from verified plans.

Four emitters: a runnable script for the standard turtle package, an
SVG rendering of the world and the drawn path, a JSON expectation file
for the external replay harness, and a CSPM script that reproduces the
model and both assertions for cross-validation in an external
refinement checker. The plan-dependent emitters refuse invalid plans;
the CSPM emitter takes any parsed plan (a failing assertion is itself
useful for cross-validation).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .checking import check_plan
from .world import (
    BK,
    Direction,
    FD,
    GOAL,
    LT,
    PD,
    PU,
    PlanVerdict,
    Position,
    RT,
    Visible,
    WorldSpec,
    simulate,
)

DEFAULT_UNIT = 50
DEFAULT_SPEED = 1


class PlanInvalid(Exception):
    """Raised instead of generating anything from an invalid plan."""

    def __init__(self, verdict: PlanVerdict):
        reason = verdict.reason.value if verdict.reason else "unknown"
        super().__init__(
            f"plan is invalid at index {verdict.failure_index} ({reason}); nothing generated"
        )
        self.verdict = verdict


@dataclass(frozen=True)
class CodegenOptions:
    unit: int = DEFAULT_UNIT  # canvas pixels per grid cell
    speed: int = DEFAULT_SPEED

    def __post_init__(self):
        if self.unit < 1:
            raise ValueError("unit must be at least 1 pixel per cell")


def _require_valid(world: WorldSpec, plan: Sequence[Visible]) -> None:
    verdict = check_plan(world, plan)
    if not verdict.valid:
        raise PlanInvalid(verdict)


def plan_calls(plan: Sequence[Visible], opts: CodegenOptions) -> list[tuple[str, int | None]]:
    """The turtle-package call per event, in plan order."""
    mapping = {
        FD: ("forward", opts.unit),
        BK: ("backward", opts.unit),
        LT: ("left", 90),
        RT: ("right", 90),
        PU: ("penup", None),
        PD: ("pendown", None),
        GOAL: ("stamp", None),
    }
    return [mapping[ev] for ev in plan]


def generate_script(
    world: WorldSpec, plan: Sequence[Visible], opts: CodegenOptions = CodegenOptions()
) -> str:
    """A standalone script for the standard turtle package.

    Setup (import, turtle creation, speed, an explicit initial
    pendown) is followed by one statement per plan event, then the
    idle call. Refuses invalid plans.
    """
    _require_valid(world, plan)
    lines = [
        "import turtle",
        "",
        "t = turtle.Turtle()",
        f"t.speed({opts.speed})",
        "t.pendown()",
    ]
    for name, arg in plan_calls(plan, opts):
        lines.append(f"t.{name}({arg if arg is not None else ''})")
    lines.append("turtle.done()")
    lines.append("")
    return "\n".join(lines)


def generate_expectation(
    world: WorldSpec, plan: Sequence[Visible], opts: CodegenOptions = CodegenOptions()
) -> str:
    """JSON record of the predicted run, for the replay harness.

    Coordinates are grid cells, heading is in degrees (East = 0,
    counterclockwise), and the call list matches the generated script
    one to one.
    """
    _require_valid(world, plan)
    sim = simulate(world, plan)
    final = sim.final
    doc = {
        "unit": opts.unit,
        "final": {
            "x": final.pos.x,
            "y": final.pos.y,
            "heading": final.direction.value,
            "pen": final.pen.value,
        },
        "calls": [[name, arg] for name, arg in plan_calls(plan, opts)],
        "segments": [[[a.x, a.y], [b.x, b.y]] for a, b in sim.segments],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --- SVG rendering ---------------------------------------------------------

_SVG_STYLE = {
    "grid": 'stroke="#c8c8c8" stroke-width="1"',
    "obstacle": 'fill="#3d3d3d"',
    "goal": 'fill="#f4c542"',
    "trail": 'stroke="#d64524" stroke-width="4" stroke-linecap="round"',
    "turtle": 'fill="#2e8b57"',
}


def generate_svg(
    world: WorldSpec, plan: Sequence[Visible], opts: CodegenOptions = CodegenOptions()
) -> str:
    """SVG map of the world with the plan's drawn path.

    Grid cell (0, 0) renders at the bottom-left (the y axis is flipped
    into SVG coordinates). Obstacles are filled squares, the goal cell
    is highlighted, each pen-down move is one `trail` line, and a
    triangle marks the final pose.
    """
    _require_valid(world, plan)
    sim = simulate(world, plan)
    unit = opts.unit
    w_px = world.width * unit
    h_px = world.height * unit

    def cx(pos: Position) -> float:
        return (pos.x + 0.5) * unit

    def cy(pos: Position) -> float:
        return (world.height - pos.y - 0.5) * unit

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w_px}" height="{h_px}" viewBox="0 0 {w_px} {h_px}">',
        f'  <rect x="0" y="0" width="{w_px}" height="{h_px}" fill="#ffffff"/>',
    ]
    for i in range(world.width + 1):
        parts.append(
            f'  <line class="grid" {_SVG_STYLE["grid"]} '
            f'x1="{i * unit}" y1="0" x2="{i * unit}" y2="{h_px}"/>'
        )
    for j in range(world.height + 1):
        parts.append(
            f'  <line class="grid" {_SVG_STYLE["grid"]} '
            f'x1="0" y1="{j * unit}" x2="{w_px}" y2="{j * unit}"/>'
        )
    for pos in sorted(world.obstacles, key=lambda p: (p.y, p.x)):
        parts.append(
            f'  <rect class="obstacle" {_SVG_STYLE["obstacle"]} '
            f'x="{pos.x * unit}" y="{(world.height - pos.y - 1) * unit}" '
            f'width="{unit}" height="{unit}"/>'
        )
    goal = world.goal
    pad = unit // 8
    parts.append(
        f'  <rect class="goal" {_SVG_STYLE["goal"]} '
        f'x="{goal.x * unit + pad}" y="{(world.height - goal.y - 1) * unit + pad}" '
        f'width="{unit - 2 * pad}" height="{unit - 2 * pad}"/>'
    )
    for a, b in sim.segments:
        parts.append(
            f'  <line class="trail" {_SVG_STYLE["trail"]} '
            f'x1="{cx(a)}" y1="{cy(a)}" x2="{cx(b)}" y2="{cy(b)}"/>'
        )
    parts.append(_turtle_marker(sim.final.pos, sim.final.direction, world, unit))
    parts.append("</svg>")
    parts.append("")
    return "\n".join(parts)


def _turtle_marker(pos: Position, direction: Direction, world: WorldSpec, unit: int) -> str:
    cx = (pos.x + 0.5) * unit
    cy = (world.height - pos.y - 0.5) * unit
    r = unit * 0.3
    # Triangle pointing along +x; SVG rotate() is clockwise, headings
    # are counterclockwise, hence the sign flip.
    points = f"{r},0 {-0.6 * r},{0.6 * r} {-0.6 * r},{-0.6 * r}"
    return (
        f'  <polygon class="turtle" {_SVG_STYLE["turtle"]} points="{points}" '
        f'transform="translate({cx},{cy}) rotate({-direction.value})"/>'
    )


# --- CSPM emission ---------------------------------------------------------

_CSPM_DIRECTIONS = (
    ("E", Direction.EAST),
    ("N", Direction.NORTH),
    ("W", Direction.WEST),
    ("S", Direction.SOUTH),
)
_CSPM_TURN = {"E": ("N", "S"), "N": ("W", "E"), "W": ("S", "N"), "S": ("E", "W")}
_CSPM_AHEAD = {"E": ("x + 1", "y"), "N": ("x", "y + 1"), "W": ("x - 1", "y"), "S": ("x", "y - 1")}
_CSPM_BEHIND = {"E": ("x - 1", "y"), "N": ("x", "y - 1"), "W": ("x + 1", "y"), "S": ("x", "y + 1")}


def generate_cspm(world: WorldSpec, plan: Sequence[Visible]) -> str:
    """CSPM source declaring the model, the world constants, and both
    assertions, loadable by a standard CSPM refinement checker."""
    obstacles = ", ".join(
        f"({p.x}, {p.y})" for p in sorted(world.obstacles, key=lambda p: (p.y, p.x))
    )
    plan_text = ", ".join(ev.name for ev in plan)
    lines = [
        "channel fd, bk, lt, rt, pu, pd, goal",
        "",
        f"Width = {world.width}",
        f"Height = {world.height}",
        f"Obstacles = {{{obstacles}}}",
        f"GoalCell = ({world.goal.x}, {world.goal.y})",
        "E = (Width, Height, Obstacles, GoalCell)",
        "",
        "nav_events = {fd, bk, lt, rt, pu, pd}",
        "",
        "free((w, h, obs, g))(x, y) =",
        "  0 <= x and x < w and 0 <= y and y < h and not member((x, y), obs)",
        "at_goal((w, h, obs, g))(x, y) = (x, y) == g",
        "",
    ]
    for suffix, _ in _CSPM_DIRECTIONS:
        left, right = _CSPM_TURN[suffix]
        ax, ay = _CSPM_AHEAD[suffix]
        bx, by = _CSPM_BEHIND[suffix]
        lines += [
            f"Turtle_nav_{suffix}(x, y)(env) =",
            f"     (free(env)({ax}, {ay}) & fd -> Turtle_nav_{suffix}({ax}, {ay})(env))",
            f"  [] (free(env)({bx}, {by}) & bk -> Turtle_nav_{suffix}({bx}, {by})(env))",
            f"  [] (lt -> Turtle_nav_{left}(x, y)(env))",
            f"  [] (rt -> Turtle_nav_{right}(x, y)(env))",
            f"  [] (at_goal(env)(x, y) & goal -> Turtle_nav_{suffix}(x, y)(env))",
            "",
        ]
    lines += [
        "Turtle_draw_pd = pu -> Turtle_draw_pu",
        "Turtle_draw_pu = pd -> Turtle_draw_pd",
        "",
        "Turtle_main(x, y)(env) = Turtle_nav_E(x, y)(env) ||| Turtle_draw_pd",
        "",
        "goalpoint = goal -> STOP",
        "",
        f"assert Turtle_main(0, 0)(E) :[has trace]: <{plan_text}>",
        "assert Turtle_main(0, 0)(E) \\ nav_events [T= goalpoint",
        "",
    ]
    return "\n".join(lines)
