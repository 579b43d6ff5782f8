"""Verified turtle plans for bounded grid worlds.

A small finite-state CSP engine models a turtle agent on an integer
grid; plans are checked as traces of that process, goal reachability
as a trace refinement with everything but the goal event hidden, and
verified plans are turned into runnable turtle scripts, SVG
renderings, replay expectations, and CSPM cross-validation sources.
"""

from .checking import CheckReport, ReachStatus, ReachVerdict, check_all, check_goal, check_plan
from .codegen import (
    CodegenOptions,
    PlanInvalid,
    generate_cspm,
    generate_expectation,
    generate_script,
    generate_svg,
)
from .csp import (
    DEFAULT_STATE_CAP,
    CspError,
    DetAutomaton,
    Event,
    EventSet,
    ExtChoice,
    Hide,
    Interleave,
    Prefix,
    ProcessEnv,
    ProcessExpr,
    Ref,
    RefinementVerdict,
    SKIP,
    STOP,
    Skip,
    StateBoundExceeded,
    Stop,
    TAU,
    TICK,
    TraceVerdict,
    UnguardedRecursion,
    UnresolvedReference,
    Visible,
    choice,
    event,
    has_trace,
    hide,
    initials,
    interleave,
    normalize,
    prefix,
    ref,
    refines_traces,
    step,
    tau_closure,
    traces_upto,
)
from .planio import ParseError, ParseErrorCode, format_plan, parse_plan, parse_world, serialize_world
from .world import (
    ALPHABET,
    BK,
    Direction,
    EVENT_ORDER,
    EventNotEnabled,
    FD,
    FailReason,
    GOAL,
    InvalidWorld,
    LT,
    NAV_EVENTS,
    PD,
    PU,
    Pen,
    Plan,
    PlanStatus,
    PlanVerdict,
    Position,
    RT,
    SimResult,
    START_STATE,
    TurtleState,
    WorldSpec,
    apply_event,
    build_turtle_process,
    enabled_events,
    reachable_cells,
    simulate,
)

__version__ = "0.1.0"
