"""The two verdicts: plan validity and goal reachability.

Plan validity asks whether the user's event sequence is a trace of the
turtle process. Goal reachability hides every event except `goal` and
asks whether the one-event process `goal -> STOP` trace-refines the
result. The two checks are independent of each other; a report simply
carries both.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .csp import (
    DEFAULT_STATE_CAP,
    Hide,
    Prefix,
    ProcessEnv,
    ProcessExpr,
    STOP,
    StateBoundExceeded,
    Visible,
    _event_key,
    has_trace,
    initials,
    refines_traces,
    step,
    tau_closure,
)
from .world import (
    EVENT_ORDER,
    GOAL,
    NAV_EVENTS,
    PlanStatus,
    PlanVerdict,
    START_STATE,
    WorldSpec,
    _CANONICAL,
    _blocked_reason,
    apply_event,
    build_turtle_process,
)

__all__ = [
    "CheckReport",
    "ReachStatus",
    "ReachVerdict",
    "check_all",
    "check_goal",
    "check_plan",
]


class ReachStatus(Enum):
    REACHABLE = "reachable"
    UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class ReachVerdict:
    """Goal reachability, with a shortest event path when reachable."""

    status: ReachStatus
    witness: tuple[Visible, ...] | None = None

    @property
    def reachable(self) -> bool:
        return self.status is ReachStatus.REACHABLE


@dataclass(frozen=True)
class CheckReport:
    plan: PlanVerdict
    goal: ReachVerdict


def check_plan(
    world: WorldSpec, plan: Sequence[Visible], state_cap: int = DEFAULT_STATE_CAP
) -> PlanVerdict:
    """Is the plan a trace of the turtle process for this world?

    The verdict comes from the kernel's trace-membership check; on
    failure the reason is recomputed from the direct semantics at the
    failing step.
    """
    canon = []
    for ev in plan:
        known = _CANONICAL.get(ev)
        if known is None:
            raise ValueError(f"{ev!r} is not a turtle event")
        canon.append(known)
    plan = tuple(canon)
    main, env = build_turtle_process(world)
    verdict = has_trace(main, plan, env, state_cap=state_cap)
    if verdict.holds:
        return PlanVerdict(PlanStatus.VALID)
    idx = verdict.failure_index
    state = START_STATE
    for ev in plan[:idx]:
        state = apply_event(world, state, ev)
    reason = _blocked_reason(world, state, plan[idx])
    if reason is None:  # the kernel and the direct semantics disagree
        raise AssertionError(
            f"kernel refused {plan[idx]} at index {idx} but the event is enabled"
        )
    return PlanVerdict(
        PlanStatus.INVALID,
        failure_index=idx,
        reason=reason,
        enabled_at_failure=verdict.enabled_at_failure,
    )


def check_goal(world: WorldSpec, state_cap: int = DEFAULT_STATE_CAP) -> ReachVerdict:
    """Is the goal cell reachable from the start?

    Decided by trace refinement: with everything except `goal` hidden,
    the turtle process must admit the one trace of `goal -> STOP`. The
    witness is the shortest unhidden event path after which `goal` is
    enabled (empty when the start cell is the goal).
    """
    main, env = build_turtle_process(world)
    spec = Hide(main, NAV_EVENTS)
    impl = Prefix(GOAL, STOP)
    verdict = refines_traces(spec, impl, env, bound=state_cap, order=EVENT_ORDER)
    if not verdict.holds:
        return ReachVerdict(ReachStatus.UNREACHABLE)
    witness = _goal_witness(main, env, state_cap)
    if witness is None:  # refinement said reachable; the LTS must agree
        raise AssertionError("goal refinement holds but no witness path exists")
    return ReachVerdict(ReachStatus.REACHABLE, witness=witness)


def check_all(
    world: WorldSpec, plan: Sequence[Visible], state_cap: int = DEFAULT_STATE_CAP
) -> CheckReport:
    """Run both checks; neither gates the other."""
    return CheckReport(
        plan=check_plan(world, plan, state_cap=state_cap),
        goal=check_goal(world, state_cap=state_cap),
    )


def _goal_witness(
    main: ProcessExpr, env: ProcessEnv, state_cap: int
) -> tuple[Visible, ...] | None:
    """Shortest visible path of the unhidden process that enables `goal`.

    Breadth-first in the canonical event order, so the witness is
    deterministic.
    """
    key = _event_key(EVENT_ORDER)
    start = tau_closure((main,), env, state_cap=state_cap)
    nodes: list[tuple[frozenset[ProcessExpr], int, Visible | None]] = [(start, -1, None)]
    seen = {start}
    frontier = 0
    while frontier < len(nodes):
        me = frontier
        frontier += 1
        closure = nodes[me][0]
        enabled = {e for c in closure for e in initials(c, env) if isinstance(e, Visible)}
        if GOAL in enabled:
            path = []
            idx = me
            while idx >= 0:
                _, parent, ev = nodes[idx]
                if ev is not None:
                    path.append(ev)
                idx = parent
            path.reverse()
            return tuple(path)
        for e in sorted(enabled, key=key):
            succ = set()
            for c in closure:
                succ |= step(c, e, env)
            nxt = tau_closure(succ, env, state_cap=state_cap)
            if nxt not in seen:
                if len(seen) >= state_cap:
                    raise StateBoundExceeded(state_cap)
                seen.add(nxt)
                nodes.append((nxt, me, e))
    return None
