"""World-file and plan-text parsing, and the canonical serializer."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from turtlecheck import (
    ParseError,
    ParseErrorCode,
    WorldSpec,
    format_plan,
    parse_plan,
    parse_world,
    serialize_world,
)

CANONICAL_TEXT = "world 3 3\nobstacle 1 1\nobstacle 1 2\ngoal 2 2"


# --- plans ------------------------------------------------------------------


def test_parse_plan_splits_on_whitespace():
    plan = parse_plan("fd fd lt pu fd pd")
    assert [e.name for e in plan] == ["fd", "fd", "lt", "pu", "fd", "pd"]


def test_parse_plan_accepts_commas_and_newlines():
    assert parse_plan("fd,fd , lt\n  rt") == parse_plan("fd fd lt rt")


def test_empty_plan():
    assert parse_plan("") == ()
    assert parse_plan("   \n  # just a comment\n") == ()


def test_unknown_token_is_positioned():
    with pytest.raises(ParseError) as excinfo:
        parse_plan("fd fwd")
    err = excinfo.value
    assert err.code is ParseErrorCode.UNKNOWN_TOKEN
    assert err.lexeme == "fwd"
    assert err.line == 1
    assert err.column == 4
    assert "token 2" in err.message


def test_unknown_token_reports_line_number():
    with pytest.raises(ParseError) as excinfo:
        parse_plan("fd\n# comment\nlt stop")
    assert excinfo.value.line == 3
    assert excinfo.value.lexeme == "stop"


def test_tokens_are_case_sensitive():
    with pytest.raises(ParseError):
        parse_plan("FD")


def test_format_plan_round_trips():
    plan = parse_plan("fd bk lt rt pu pd goal")
    assert parse_plan(format_plan(plan)) == plan


# --- world files ------------------------------------------------------------


def test_gap_world_parses():
    world = parse_world(CANONICAL_TEXT)
    assert world == WorldSpec(3, 3, (2, 2), {(1, 1), (1, 2)})


def test_comments_and_blank_lines_are_ignored():
    text = "# a map\n\nworld 3 3\n  # interior comment\ngoal 2 2\n"
    assert parse_world(text) == WorldSpec(3, 3, (2, 2))


def test_obstacle_at_start_is_an_error():
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 3\nobstacle 0 0\ngoal 2 2")
    assert excinfo.value.code is ParseErrorCode.OBSTACLE_AT_START
    assert excinfo.value.line == 2


def test_out_of_bounds_goal_is_positioned():
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 2 2\ngoal 5 5")
    assert excinfo.value.code is ParseErrorCode.OUT_OF_BOUNDS_COORDINATE
    assert excinfo.value.line == 2


def test_world_line_must_come_first():
    with pytest.raises(ParseError) as excinfo:
        parse_world("goal 1 1\nworld 3 3")
    assert excinfo.value.code is ParseErrorCode.MISSING_WORLD_LINE


def test_missing_goal():
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 3\nobstacle 1 1")
    assert excinfo.value.code is ParseErrorCode.MISSING_GOAL


def test_duplicate_goal_and_world():
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 3\ngoal 1 1\ngoal 2 2")
    assert excinfo.value.code is ParseErrorCode.DUPLICATE_GOAL
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 3\nworld 2 2\ngoal 1 1")
    assert excinfo.value.code is ParseErrorCode.DUPLICATE_WORLD


def test_goal_on_obstacle_in_either_order():
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 3\nobstacle 1 1\ngoal 1 1")
    assert excinfo.value.code is ParseErrorCode.GOAL_ON_OBSTACLE
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 3\ngoal 1 1\nobstacle 1 1")
    assert excinfo.value.code is ParseErrorCode.GOAL_ON_OBSTACLE


def test_unknown_directive_and_malformed_arguments():
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 3\nwall 1 1\ngoal 2 2")
    assert excinfo.value.code is ParseErrorCode.UNKNOWN_DIRECTIVE
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 3\nobstacle 1\ngoal 2 2")
    assert excinfo.value.code is ParseErrorCode.MALFORMED_DIRECTIVE
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 x\ngoal 1 1")
    assert excinfo.value.code is ParseErrorCode.MALFORMED_DIRECTIVE


def test_negative_coordinates_are_out_of_bounds():
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 3 3\nobstacle -1 0\ngoal 2 2")
    assert excinfo.value.code is ParseErrorCode.OUT_OF_BOUNDS_COORDINATE


def test_oversized_world_is_rejected_at_parse_time():
    with pytest.raises(ParseError) as excinfo:
        parse_world("world 65 3\ngoal 1 1")
    assert excinfo.value.code is ParseErrorCode.MALFORMED_DIRECTIVE


# --- serialization ----------------------------------------------------------


def test_serialize_orders_obstacles_by_row_then_column():
    world = WorldSpec(3, 3, (2, 2), {(1, 2), (1, 1)})
    assert serialize_world(world) == CANONICAL_TEXT


def test_serialize_minimal_world():
    assert serialize_world(WorldSpec(1, 1, (0, 0))) == "world 1 1\ngoal 0 0"


@st.composite
def world_specs(draw):
    width = draw(st.integers(min_value=1, max_value=8))
    height = draw(st.integers(min_value=1, max_value=8))
    cells = [(x, y) for x in range(width) for y in range(height)]
    goal = draw(st.sampled_from(cells))
    candidates = [c for c in cells if c != (0, 0) and c != goal]
    obstacles = draw(st.sets(st.sampled_from(candidates))) if candidates else set()
    return WorldSpec(width, height, goal, frozenset(obstacles))


@settings(max_examples=120, deadline=None)
@given(world_specs())
def test_world_round_trip(world):
    assert parse_world(serialize_world(world)) == world
