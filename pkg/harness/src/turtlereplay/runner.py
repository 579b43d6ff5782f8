"""Execute a generated script headlessly and compare it to expectations.

The recorded call list has the fixed setup (speed, the initial
pendown) and the trailing done() stripped, matching the scope of the
expectation file's call list. The final pose is replayed from the
event calls alone: pixel coordinates, headings in degrees with East
at 0 growing counterclockwise, normalized to [0, 360).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .recorder import ScriptError, recording_turtle_module


class SchemaError(Exception):
    """Expectation file does not match the generator's schema."""


# Unit vectors for the four replayable headings.
_HEADING_STEP = {0: (1, 0), 90: (0, 1), 180: (-1, 0), 270: (0, -1)}


@dataclass(frozen=True)
class RecordedRun:
    """Event calls plus the pose they replay to (pixels, degrees)."""

    calls: tuple[tuple[str, object], ...]
    x: int
    y: int
    heading: int
    pen: str


@dataclass(frozen=True)
class ComparisonReport:
    passed: bool
    problems: tuple[str, ...] = ()


def run_script(path: str) -> RecordedRun:
    """Load and execute a generated script against the recorder."""
    with open(path, encoding="utf-8") as handle:
        source = handle.read()
    code = compile(source, path, "exec")
    log: list = []
    with recording_turtle_module(log):
        try:
            exec(code, {"__name__": "__main__", "__file__": path})
        except ScriptError:
            raise
        except Exception as exc:
            raise ScriptError(f"script raised {type(exc).__name__}: {exc}") from exc
    return RecordedRun(calls=_event_calls(log), **_replay(_event_calls(log)))


def _event_calls(log: list) -> tuple:
    """Strip the fixed prologue and teardown emitted by the generator."""
    if len(log) < 3 or log[0][0] != "speed" or log[1] != ("pendown", None):
        raise ScriptError("script does not start with the standard setup (speed, pendown)")
    if log[-1] != ("done", None):
        raise ScriptError("script does not end with done()")
    return tuple(log[2:-1])


def _replay(calls: tuple) -> dict:
    x, y = 0, 0
    heading = 0
    pen = "down"
    for name, arg in calls:
        if name in ("forward", "backward"):
            step = _HEADING_STEP.get(heading % 360)
            if step is None:
                raise ScriptError(f"cannot replay a move at heading {heading}")
            if not isinstance(arg, int):
                raise ScriptError(f"{name} expects an integer distance, got {arg!r}")
            sign = 1 if name == "forward" else -1
            x += sign * arg * step[0]
            y += sign * arg * step[1]
        elif name in ("left", "right"):
            if not isinstance(arg, int):
                raise ScriptError(f"{name} expects an integer angle, got {arg!r}")
            heading += arg if name == "left" else -arg
        elif name == "penup":
            pen = "up"
        elif name == "pendown":
            pen = "down"
        elif name == "stamp":
            pass
        else:
            raise ScriptError(f"unexpected call in the event section: {name}")
    return {"x": x, "y": y, "heading": heading % 360, "pen": pen}


def load_expectation(path: str) -> dict:
    """Read and structurally validate an expectation file."""
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot load expectation file: {exc}") from exc
    return validate_expectation(doc)


def validate_expectation(doc) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError("expectation must be a JSON object")
    for key in ("unit", "final", "calls", "segments"):
        if key not in doc:
            raise SchemaError(f"expectation is missing {key!r}")
    if not isinstance(doc["unit"], int) or doc["unit"] < 1:
        raise SchemaError("unit must be a positive integer")
    final = doc["final"]
    if not isinstance(final, dict):
        raise SchemaError("final must be an object")
    for key in ("x", "y", "heading"):
        if not isinstance(final.get(key), int):
            raise SchemaError(f"final.{key} must be an integer")
    if final.get("pen") not in ("up", "down"):
        raise SchemaError("final.pen must be 'up' or 'down'")
    calls = doc["calls"]
    if not isinstance(calls, list):
        raise SchemaError("calls must be a list")
    for i, entry in enumerate(calls):
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not isinstance(entry[0], str)
            or not (entry[1] is None or isinstance(entry[1], int))
        ):
            raise SchemaError(f"calls[{i}] must be [name, int|null]")
    return doc


def compare(run: RecordedRun, expectation: dict) -> ComparisonReport:
    """Pass iff the call lists match exactly and the replayed pixel pose
    equals the expected grid pose scaled by the unit."""
    expectation = validate_expectation(expectation)
    problems: list[str] = []

    expected_calls = [tuple(entry) for entry in expectation["calls"]]
    recorded = list(run.calls)
    for i, (want, got) in enumerate(zip(expected_calls, recorded)):
        if want != got:
            problems.append(f"call {i}: expected {want}, recorded {got}")
            break
    else:
        if len(expected_calls) != len(recorded):
            index = min(len(expected_calls), len(recorded))
            problems.append(
                f"call {index}: expected {len(expected_calls)} calls, recorded {len(recorded)}"
            )

    unit = expectation["unit"]
    final = expectation["final"]
    want_pose = (final["x"] * unit, final["y"] * unit, final["heading"] % 360, final["pen"])
    got_pose = (run.x, run.y, run.heading % 360, run.pen)
    if want_pose != got_pose:
        problems.append(f"pose: expected {want_pose}, replayed {got_pose}")

    return ComparisonReport(passed=not problems, problems=tuple(problems))
