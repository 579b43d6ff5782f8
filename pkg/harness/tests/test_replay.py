"""Recorder replay, expectation comparison, and the end-to-end check
against the generator (driven through its public CLI)."""

from __future__ import annotations

import json
import random
import subprocess
import sys
import time
import types

import pytest

from turtlereplay import (
    SchemaError,
    ScriptError,
    compare,
    load_expectation,
    run_script,
)
from turtlereplay.cli import run_cli

GENERATED_STYLE = """\
import turtle

t = turtle.Turtle()
t.speed(1)
t.pendown()
{body}turtle.done()
"""


def write_script(tmp_path, body_lines):
    body = "".join(f"t.{line}\n" for line in body_lines)
    path = tmp_path / "script.py"
    path.write_text(GENERATED_STYLE.format(body=body))
    return str(path)


def expectation_doc(unit=50, x=0, y=0, heading=0, pen="down", calls=(), segments=()):
    return {
        "unit": unit,
        "final": {"x": x, "y": y, "heading": heading, "pen": pen},
        "calls": [list(c) for c in calls],
        "segments": [list(s) for s in segments],
    }


# --- run_script -------------------------------------------------------------


def test_l_shaped_run_records_calls_and_pose(tmp_path):
    path = write_script(tmp_path, ["forward(50)", "left(90)", "forward(50)"])
    run = run_script(path)
    assert run.calls == (("forward", 50), ("left", 90), ("forward", 50))
    assert (run.x, run.y, run.heading, run.pen) == (50, 50, 90, "down")


def test_empty_plan_script(tmp_path):
    path = write_script(tmp_path, [])
    run = run_script(path)
    assert run.calls == ()
    assert (run.x, run.y, run.heading, run.pen) == (0, 0, 0, "down")


def test_pen_and_stamp_replay(tmp_path):
    path = write_script(tmp_path, ["penup()", "forward(10)", "pendown()", "stamp()"])
    run = run_script(path)
    assert run.pen == "down"
    assert (run.x, run.y) == (10, 0)


def test_backward_and_right_replay(tmp_path):
    path = write_script(tmp_path, ["right(90)", "backward(20)"])
    run = run_script(path)
    # Facing South, moving backward: the turtle ends up going north.
    assert (run.x, run.y, run.heading) == (0, 20, 270)


def test_heading_normalizes_to_one_turn(tmp_path):
    path = write_script(tmp_path, ["left(90)", "left(90)", "left(90)", "left(90)", "left(90)"])
    assert run_script(path).heading == 90


def test_unknown_module_function_is_a_script_error(tmp_path):
    path = tmp_path / "bad.py"
    path.write_text("import turtle\nturtle.mainloop()\n")
    with pytest.raises(ScriptError) as excinfo:
        run_script(path.as_posix())
    assert "mainloop" in str(excinfo.value)


def test_unknown_method_is_a_script_error(tmp_path):
    path = write_script(tmp_path, ["circle(30)"])
    with pytest.raises(ScriptError) as excinfo:
        run_script(path)
    assert "circle" in str(excinfo.value)


def test_missing_prologue_is_a_script_error(tmp_path):
    path = tmp_path / "noprologue.py"
    path.write_text("import turtle\nt = turtle.Turtle()\nt.forward(50)\nturtle.done()\n")
    with pytest.raises(ScriptError):
        run_script(path.as_posix())


def test_crashing_script_is_reported(tmp_path):
    path = tmp_path / "crash.py"
    path.write_text("raise RuntimeError('boom')\n")
    with pytest.raises(ScriptError) as excinfo:
        run_script(path.as_posix())
    assert "boom" in str(excinfo.value)


def test_prior_turtle_module_is_restored(tmp_path):
    # The real turtle module needs a display stack; a sentinel stands in.
    sentinel = types.ModuleType("turtle")
    previous = sys.modules.get("turtle")
    sys.modules["turtle"] = sentinel
    try:
        run_script(write_script(tmp_path, []))
        assert sys.modules["turtle"] is sentinel
    finally:
        if previous is None:
            sys.modules.pop("turtle", None)
        else:
            sys.modules["turtle"] = previous


# --- compare ----------------------------------------------------------------


def test_matching_run_passes(tmp_path):
    path = write_script(tmp_path, ["forward(50)", "left(90)"])
    run = run_script(path)
    report = compare(
        run,
        expectation_doc(x=1, y=0, heading=90, calls=[("forward", 50), ("left", 90)]),
    )
    assert report.passed
    assert report.problems == ()


def test_extra_expected_call_reports_first_divergence(tmp_path):
    path = write_script(tmp_path, ["forward(50)"])
    run = run_script(path)
    report = compare(
        run,
        expectation_doc(x=1, calls=[("forward", 50), ("left", 90)]),
    )
    assert not report.passed
    assert any(p.startswith("call 1:") for p in report.problems)


def test_wrong_call_argument_reports_index(tmp_path):
    path = write_script(tmp_path, ["forward(50)"])
    run = run_script(path)
    report = compare(run, expectation_doc(x=1, calls=[("forward", 20)]))
    assert not report.passed
    assert any(p.startswith("call 0:") for p in report.problems)


def test_pose_mismatch_is_reported(tmp_path):
    path = write_script(tmp_path, ["forward(50)"])
    run = run_script(path)
    report = compare(run, expectation_doc(x=2, calls=[("forward", 50)]))
    assert not report.passed
    assert any(p.startswith("pose:") for p in report.problems)


def test_malformed_expectation_raises_schema_error(tmp_path):
    path = write_script(tmp_path, [])
    run = run_script(path)
    with pytest.raises(SchemaError):
        compare(run, {"unit": 50})
    with pytest.raises(SchemaError):
        compare(run, expectation_doc(pen="sideways"))
    with pytest.raises(SchemaError):
        compare(run, expectation_doc(calls=[["forward", "fast"]]))


def test_load_expectation_rejects_bad_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        load_expectation(str(bad))


# --- CLI --------------------------------------------------------------------


def test_cli_pass_and_mismatch(tmp_path, capsys):
    script = write_script(tmp_path, ["forward(50)"])
    good = tmp_path / "good.json"
    good.write_text(json.dumps(expectation_doc(x=1, calls=[("forward", 50)])))
    assert run_cli(["run", script, "--expect", str(good)]) == 0
    assert "pass" in capsys.readouterr().out

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(expectation_doc(x=3, calls=[("forward", 50)])))
    assert run_cli(["run", script, "--expect", str(bad)]) == 1
    assert "mismatch" in capsys.readouterr().out


def test_cli_script_error_exit_code(tmp_path):
    crash = tmp_path / "crash.py"
    crash.write_text("raise ValueError('no')\n")
    expect = tmp_path / "e.json"
    expect.write_text(json.dumps(expectation_doc()))
    assert run_cli(["run", str(crash), "--expect", str(expect)]) == 2


# --- end to end against the generator ----------------------------------------
#
# The generator is driven through its installed CLI; the walker below is
# an independent reimplementation of the movement rules, so agreement
# here crosses both the language gap and the implementation gap.


def passable(width, height, obstacles, x, y):
    return 0 <= x < width and 0 <= y < height and (x, y) not in obstacles


def random_world(rng):
    width = rng.randint(1, 5)
    height = rng.randint(1, 5)
    cells = [(x, y) for x in range(width) for y in range(height)]
    candidates = [c for c in cells if c != (0, 0)]
    rng.shuffle(candidates)
    obstacles = set(candidates[: rng.randint(0, len(candidates) // 2)])
    goal = rng.choice([c for c in cells if c not in obstacles])
    return width, height, obstacles, goal


def random_valid_plan(rng, width, height, obstacles, goal, length):
    x, y, dx, dy = 0, 0, 1, 0
    pen_down = True
    plan = []
    for _ in range(length):
        options = ["lt", "rt", "pu" if pen_down else "pd"]
        if passable(width, height, obstacles, x + dx, y + dy):
            options.append("fd")
        if passable(width, height, obstacles, x - dx, y - dy):
            options.append("bk")
        if (x, y) == goal:
            options.append("goal")
        ev = rng.choice(options)
        plan.append(ev)
        if ev == "lt":
            dx, dy = -dy, dx
        elif ev == "rt":
            dx, dy = dy, -dx
        elif ev == "fd":
            x, y = x + dx, y + dy
        elif ev == "bk":
            x, y = x - dx, y - dy
        elif ev == "pu":
            pen_down = False
        elif ev == "pd":
            pen_down = True
    return plan


def generate_with_primary(tmp_path, index, world, plan_tokens):
    width, height, obstacles, goal = world
    lines = [f"world {width} {height}"]
    lines += [f"obstacle {x} {y}" for (x, y) in sorted(obstacles)]
    lines.append(f"goal {goal[0]} {goal[1]}")
    world_file = tmp_path / f"w{index}.world"
    world_file.write_text("\n".join(lines) + "\n")

    script = tmp_path / f"s{index}.py"
    expect = tmp_path / f"e{index}.json"
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "turtlecheck",
            "gen",
            "--world",
            str(world_file),
            "--plan",
            " ".join(plan_tokens),
            "--script",
            str(script),
            "--expect",
            str(expect),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, (proc.stdout, proc.stderr)
    return str(script), str(expect)


def test_replay_matches_expectation_for_random_plans(tmp_path):
    started = time.perf_counter()
    rng = random.Random(4242)
    runs = 24
    for index in range(runs):
        world = random_world(rng)
        plan = random_valid_plan(rng, *world, length=rng.randint(0, 14))
        script, expect = generate_with_primary(tmp_path, index, world, plan)
        report = compare(run_script(script), load_expectation(expect))
        assert report.passed, (world, plan, report.problems)
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    print(f"PASS: {runs} generated scripts replayed against expectations in {elapsed:.1f}s")
