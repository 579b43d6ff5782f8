"""Headless cross-check for generated turtle scripts.

Runs a script with the turtle package substituted by a recorder,
replays the recorded calls into a final pose, and compares both
against the generator's expectation file.
"""

from .runner import (
    ComparisonReport,
    RecordedRun,
    SchemaError,
    ScriptError,
    compare,
    load_expectation,
    run_script,
)

__version__ = "0.1.0"
