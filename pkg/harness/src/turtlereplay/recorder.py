"""A stand-in for the turtle module that records instead of drawing.

The fake module exposes a Turtle class whose supported methods append
(name, argument) pairs to a shared log, plus a module-level done().
Anything else raises ScriptError naming the offending call, so scripts
that stray outside the generated vocabulary fail loudly instead of
silently diverging.
"""

from __future__ import annotations

import sys
import types
from contextlib import contextmanager


class ScriptError(Exception):
    """The script raised, or called something the recorder does not support."""


class RecordingTurtle:
    """Records supported method calls; ignores drawing entirely."""

    def __init__(self, log: list):
        self._log = log

    def speed(self, value=None):
        self._log.append(("speed", value))

    def pendown(self):
        self._log.append(("pendown", None))

    def penup(self):
        self._log.append(("penup", None))

    def forward(self, distance):
        self._log.append(("forward", distance))

    def backward(self, distance):
        self._log.append(("backward", distance))

    def left(self, angle):
        self._log.append(("left", angle))

    def right(self, angle):
        self._log.append(("right", angle))

    def stamp(self):
        self._log.append(("stamp", None))

    def __getattr__(self, name):
        raise ScriptError(f"unsupported turtle command: {name}")


class _FakeTurtleModule(types.ModuleType):
    def __init__(self, log: list):
        super().__init__("turtle")
        self._log = log
        self.Turtle = lambda: RecordingTurtle(log)
        self.done = lambda: log.append(("done", None))

    def __getattr__(self, name):
        raise ScriptError(f"unsupported turtle command: {name}")


@contextmanager
def recording_turtle_module(log: list):
    """Swap the real turtle module for the recorder while a script runs."""
    fake = _FakeTurtleModule(log)
    previous = sys.modules.get("turtle")
    sys.modules["turtle"] = fake
    try:
        yield fake
    finally:
        if previous is None:
            sys.modules.pop("turtle", None)
        else:
            sys.modules["turtle"] = previous
