"""Finite-state CSP engine.

Process terms are immutable trees built from Stop, Skip, event
prefixing, external choice, interleaving, hiding, and named references
that resolve in a :class:`ProcessEnv`. Their behaviour is the standard
labelled transition system: :func:`initials` and :func:`step` give the
one-step operational semantics, and on top of those sit a brute-force
trace oracle (:func:`traces_upto`), a trace-membership check
(:func:`has_trace`), a determinizing normalizer (:func:`normalize`),
and a traces-refinement check (:func:`refines_traces`) that reports a
shortest counterexample when refinement fails.

Two internal events exist alongside the visible alphabet: ``TAU`` (the
invisible event produced by hiding) and ``TICK`` (successful
termination, offered by Skip). Traces record visible events plus an
optional final TICK; TAU never appears in a trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

DEFAULT_STATE_CAP = 1_000_000


class CspError(Exception):
    """Base class for kernel failures."""


class UnresolvedReference(CspError):
    """A Ref names a definition the environment does not contain."""

    def __init__(self, name: str, arity: int):
        super().__init__(f"no definition for {name}/{arity}")
        self.name = name
        self.arity = arity


class UnguardedRecursion(CspError):
    """A definition reaches itself again without consuming an event."""

    def __init__(self, name: str):
        super().__init__(f"definition {name} recurses without an event guard")
        self.name = name


class StateBoundExceeded(CspError):
    """Exploration grew past the configured state cap."""

    def __init__(self, bound: int):
        super().__init__(f"state exploration exceeded the cap of {bound}")
        self.bound = bound


# ---------------------------------------------------------------------------
# Events


class _Internal:
    """Marker event (tau or tick); never equal to any visible event."""

    __slots__ = ("_label",)

    def __init__(self, label: str):
        self._label = label

    def __repr__(self) -> str:
        return self._label


TAU = _Internal("tau")
TICK = _Internal("tick")


class Visible:
    """A named event drawn from the model's alphabet."""

    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        if not name:
            raise ValueError("visible events need a nonempty name")
        self.name = name
        self._hash = hash(("csp.Visible", name))

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Visible) and self.name == other.name

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.name


Event = Visible | _Internal
EventSet = frozenset[Visible]
Trace = tuple[Event, ...]


# ---------------------------------------------------------------------------
# Process terms
#
# Hand-rolled value classes instead of dataclasses: every node caches its
# structural hash at construction time, which keeps the memo tables in
# ProcessEnv cheap for the exhaustive sweeps the tests run.


class ProcessExpr:
    """Base class for process terms. Instances are immutable values."""

    __slots__ = ("_hash",)

    def __hash__(self) -> int:
        return self._hash


class Stop(ProcessExpr):
    """Deadlock: accepts no events and never terminates."""

    __slots__ = ()

    def __init__(self):
        self._hash = hash("csp.Stop")

    def __eq__(self, other):
        return isinstance(other, Stop)

    __hash__ = ProcessExpr.__hash__

    def __repr__(self) -> str:
        return "STOP"


class Skip(ProcessExpr):
    """Immediate successful termination: offers TICK, then nothing."""

    __slots__ = ()

    def __init__(self):
        self._hash = hash("csp.Skip")

    def __eq__(self, other):
        return isinstance(other, Skip)

    __hash__ = ProcessExpr.__hash__

    def __repr__(self) -> str:
        return "SKIP"


STOP = Stop()
SKIP = Skip()


class Prefix(ProcessExpr):
    """``event -> cont``: communicate the event, then behave like cont."""

    __slots__ = ("event", "cont")

    def __init__(self, event: Visible, cont: ProcessExpr):
        if not isinstance(event, Visible):
            raise TypeError(f"prefix events must be visible, got {event!r}")
        self.event = event
        self.cont = cont
        self._hash = hash(("csp.Prefix", event, cont))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Prefix)
            and self._hash == other._hash
            and self.event == other.event
            and self.cont == other.cont
        )

    __hash__ = ProcessExpr.__hash__

    def __repr__(self) -> str:
        return f"({self.event} -> {self.cont!r})"


class ExtChoice(ProcessExpr):
    """External choice: the environment picks a branch by its first event."""

    __slots__ = ("left", "right")

    def __init__(self, left: ProcessExpr, right: ProcessExpr):
        self.left = left
        self.right = right
        self._hash = hash(("csp.ExtChoice", left, right))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, ExtChoice)
            and self._hash == other._hash
            and self.left == other.left
            and self.right == other.right
        )

    __hash__ = ProcessExpr.__hash__

    def __repr__(self) -> str:
        return f"({self.left!r} [] {self.right!r})"


class Interleave(ProcessExpr):
    """Parallel composition with no synchronisation (termination excepted)."""

    __slots__ = ("left", "right")

    def __init__(self, left: ProcessExpr, right: ProcessExpr):
        self.left = left
        self.right = right
        self._hash = hash(("csp.Interleave", left, right))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Interleave)
            and self._hash == other._hash
            and self.left == other.left
            and self.right == other.right
        )

    __hash__ = ProcessExpr.__hash__

    def __repr__(self) -> str:
        return f"({self.left!r} ||| {self.right!r})"


class Hide(ProcessExpr):
    """Run the body with the given visible events turned into TAU."""

    __slots__ = ("body", "hidden")

    def __init__(self, body: ProcessExpr, hidden: Iterable[Visible]):
        hidden = frozenset(hidden)
        for e in hidden:
            if not isinstance(e, Visible):
                raise TypeError(f"only visible events can be hidden, got {e!r}")
        self.body = body
        self.hidden = hidden
        self._hash = hash(("csp.Hide", body, hidden))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Hide)
            and self._hash == other._hash
            and self.body == other.body
            and self.hidden == other.hidden
        )

    __hash__ = ProcessExpr.__hash__

    def __repr__(self) -> str:
        names = ", ".join(sorted(e.name for e in self.hidden))
        return f"({self.body!r} \\ {{{names}}})"


class Ref(ProcessExpr):
    """Reference to a named definition, with integer arguments."""

    __slots__ = ("name", "args")

    def __init__(self, name: str, args: Iterable[int] = ()):
        args = tuple(args)
        for a in args:
            if not isinstance(a, int):
                raise TypeError(f"definition arguments must be integers, got {a!r}")
        self.name = name
        self.args = args
        self._hash = hash(("csp.Ref", name, args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Ref)
            and self._hash == other._hash
            and self.name == other.name
            and self.args == other.args
        )

    __hash__ = ProcessExpr.__hash__

    def __repr__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(map(str, self.args))})"


# Convenience constructors, mainly for tests and model building.


def event(name: str) -> Visible:
    return Visible(name)


def prefix(ev: Visible | str, cont: ProcessExpr) -> Prefix:
    if isinstance(ev, str):
        ev = Visible(ev)
    return Prefix(ev, cont)


def choice(*branches: ProcessExpr) -> ProcessExpr:
    """Fold any number of branches into nested external choices."""
    if not branches:
        return STOP
    out = branches[0]
    for b in branches[1:]:
        out = ExtChoice(out, b)
    return out


def interleave(left: ProcessExpr, right: ProcessExpr) -> Interleave:
    return Interleave(left, right)


def hide(body: ProcessExpr, events: Iterable[Visible | str]) -> Hide:
    return Hide(body, frozenset(Visible(e) if isinstance(e, str) else e for e in events))


def ref(name: str, *args: int) -> Ref:
    return Ref(name, args)


# ---------------------------------------------------------------------------
# Environments


class ProcessEnv:
    """Named, integer-parametrized process definitions.

    Definitions are registered as builder callables; ``Ref(name, args)``
    unfolds by calling the builder with the arguments. Unfoldings and
    per-term semantic queries are memoized on the environment, so
    repeated exploration of the same state space stays cheap.
    """

    def __init__(self):
        self._defs: dict[tuple[str, int], Callable[..., ProcessExpr]] = {}
        self._bodies: dict[tuple[str, tuple[int, ...]], ProcessExpr] = {}
        self._initials: dict[ProcessExpr, frozenset[Event]] = {}
        self._steps: dict[tuple[ProcessExpr, Event], frozenset[ProcessExpr]] = {}
        # Queries currently being evaluated; re-entering one means a
        # definition recurses without consuming an event.
        self._initials_in_progress: set[ProcessExpr] = set()
        self._steps_in_progress: set[tuple[ProcessExpr, Event]] = set()

    def define(self, name: str, arity: int, builder: Callable[..., ProcessExpr]) -> None:
        key = (name, arity)
        if key in self._defs:
            raise ValueError(f"duplicate definition {name}/{arity}")
        self._defs[key] = builder

    def unfold(self, r: Ref) -> ProcessExpr:
        key = (r.name, r.args)
        body = self._bodies.get(key)
        if body is None:
            builder = self._defs.get((r.name, len(r.args)))
            if builder is None:
                raise UnresolvedReference(r.name, len(r.args))
            body = builder(*r.args)
            self._bodies[key] = body
        return body


_EMPTY_ENV = ProcessEnv()


def _env(env: ProcessEnv | None) -> ProcessEnv:
    return env if env is not None else _EMPTY_ENV


# ---------------------------------------------------------------------------
# One-step operational semantics


def initials(p: ProcessExpr, env: ProcessEnv | None = None) -> frozenset[Event]:
    """The events (visible, TAU, or TICK) that p can perform first."""
    return _initials(p, _env(env))


def _initials(p, env) -> frozenset[Event]:
    cached = env._initials.get(p)
    if cached is not None:
        return cached
    in_progress = env._initials_in_progress
    if p in in_progress:
        raise UnguardedRecursion(p.name if isinstance(p, Ref) else repr(p))
    in_progress.add(p)
    try:
        if isinstance(p, Stop):
            result = frozenset()
        elif isinstance(p, Skip):
            result = frozenset((TICK,))
        elif isinstance(p, Prefix):
            result = frozenset((p.event,))
        elif isinstance(p, ExtChoice):
            result = _initials(p.left, env) | _initials(p.right, env)
        elif isinstance(p, Interleave):
            il = _initials(p.left, env)
            ir = _initials(p.right, env)
            result = (il | ir) - {TICK}
            if TICK in il and TICK in ir:
                result |= {TICK}
        elif isinstance(p, Hide):
            result = frozenset(
                TAU if isinstance(e, Visible) and e in p.hidden else e
                for e in _initials(p.body, env)
            )
        elif isinstance(p, Ref):
            result = _initials(env.unfold(p), env)
        else:
            raise TypeError(f"not a process term: {p!r}")
    finally:
        in_progress.discard(p)

    env._initials[p] = result
    return result


def step(p: ProcessExpr, ev: Event, env: ProcessEnv | None = None) -> frozenset[ProcessExpr]:
    """All successor terms after p performs ev (empty if ev is refused)."""
    return _step(p, ev, _env(env))


def _step(p, ev, env) -> frozenset[ProcessExpr]:
    key = (p, ev)
    cached = env._steps.get(key)
    if cached is not None:
        return cached
    in_progress = env._steps_in_progress
    if key in in_progress:
        raise UnguardedRecursion(p.name if isinstance(p, Ref) else repr(p))
    in_progress.add(key)
    try:
        if isinstance(p, Stop):
            result = frozenset()
        elif isinstance(p, Skip):
            result = frozenset((STOP,)) if ev is TICK else frozenset()
        elif isinstance(p, Prefix):
            result = frozenset((p.cont,)) if ev == p.event else frozenset()
        elif isinstance(p, ExtChoice):
            if ev is TAU:
                # An internal step does not resolve the choice.
                result = frozenset(
                    ExtChoice(l2, p.right) for l2 in _step(p.left, TAU, env)
                ) | frozenset(ExtChoice(p.left, r2) for r2 in _step(p.right, TAU, env))
            else:
                result = _step(p.left, ev, env) | _step(p.right, ev, env)
        elif isinstance(p, Interleave):
            if ev is TICK:
                # Distributed termination: both sides tick together.
                result = frozenset(
                    Interleave(l2, r2)
                    for l2 in _step(p.left, TICK, env)
                    for r2 in _step(p.right, TICK, env)
                )
            else:
                result = frozenset(
                    Interleave(l2, p.right) for l2 in _step(p.left, ev, env)
                ) | frozenset(Interleave(p.left, r2) for r2 in _step(p.right, ev, env))
        elif isinstance(p, Hide):
            if ev is TAU:
                succ = set(_step(p.body, TAU, env))
                for hidden_ev in p.hidden:
                    succ |= _step(p.body, hidden_ev, env)
                result = frozenset(Hide(b, p.hidden) for b in succ)
            elif isinstance(ev, Visible) and ev in p.hidden:
                result = frozenset()
            else:
                result = frozenset(Hide(b, p.hidden) for b in _step(p.body, ev, env))
        elif isinstance(p, Ref):
            result = _step(env.unfold(p), ev, env)
        else:
            raise TypeError(f"not a process term: {p!r}")
    finally:
        in_progress.discard(key)

    env._steps[key] = result
    return result


# ---------------------------------------------------------------------------
# Exploration helpers


class _Budget:
    """Counts distinct configurations against a cap."""

    __slots__ = ("cap", "seen")

    def __init__(self, cap: int):
        self.cap = cap
        self.seen: set[ProcessExpr] = set()

    def charge(self, config: ProcessExpr) -> None:
        if config not in self.seen:
            self.seen.add(config)
            if len(self.seen) > self.cap:
                raise StateBoundExceeded(self.cap)


def _tau_closure_set(configs, env, budget) -> set[ProcessExpr]:
    seen: set[ProcessExpr] = set()
    stack = list(configs)
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        budget.charge(c)
        if TAU in _initials(c, env):
            for s in _step(c, TAU, env):
                if s not in seen:
                    stack.append(s)
    return seen


def _tau_closure(configs, env, budget) -> frozenset[ProcessExpr]:
    return frozenset(_tau_closure_set(configs, env, budget))


def tau_closure(
    configs: Iterable[ProcessExpr],
    env: ProcessEnv | None = None,
    state_cap: int = DEFAULT_STATE_CAP,
) -> frozenset[ProcessExpr]:
    """Close a configuration set under internal (TAU) steps."""
    return _tau_closure(configs, _env(env), _Budget(state_cap))


def _visible_initials(closure, env) -> set[Visible]:
    out: set[Visible] = set()
    for c in closure:
        for e in _initials(c, env):
            if isinstance(e, Visible):
                out.add(e)
    return out


def _offers_tick(closure, env) -> bool:
    return any(TICK in _initials(c, env) for c in closure)


def _step_closure(closure, ev, env, budget) -> frozenset[ProcessExpr]:
    nxt: set[ProcessExpr] = set()
    for c in closure:
        nxt |= _step(c, ev, env)
    return _tau_closure(nxt, env, budget)


def _event_key(order: Sequence[str] | None) -> Callable[[Visible], tuple]:
    """Sort key for visible events; `order` names rank first, rest by name."""
    if order is None:
        return lambda v: (0, v.name)
    rank = {name: i for i, name in enumerate(order)}
    fallback = len(rank)
    return lambda v: (rank.get(v.name, fallback), v.name)


# ---------------------------------------------------------------------------
# Trace oracle and membership


def traces_upto(
    p: ProcessExpr,
    depth: int,
    env: ProcessEnv | None = None,
    state_cap: int = DEFAULT_STATE_CAP,
) -> set[Trace]:
    """Every trace of length <= depth, by exhaustive exploration.

    Traces contain visible events plus an optional final TICK; TAU
    steps are erased. This is the brute-force oracle the richer checks
    are tested against, so it stays deliberately simple.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    env = _env(env)
    budget = _Budget(state_cap)
    start = _tau_closure((p,), env, budget)

    out: set[Trace] = {()}
    menu: dict[frozenset[ProcessExpr], tuple] = {}
    stack: list[tuple[frozenset[ProcessExpr], Trace]] = [(start, ())]
    while stack:
        closure, trace = stack.pop()
        if len(trace) >= depth:
            continue
        entry = menu.get(closure)
        if entry is None:
            succs = tuple(
                (e, _step_closure(closure, e, env, budget))
                for e in sorted(_visible_initials(closure, env), key=lambda v: v.name)
            )
            entry = (_offers_tick(closure, env), succs)
            menu[closure] = entry
        tick, succs = entry
        if tick:
            out.add(trace + (TICK,))
        for e, nxt in succs:
            extended = trace + (e,)
            out.add(extended)
            stack.append((nxt, extended))
    return out


@dataclass(frozen=True)
class TraceVerdict:
    """Outcome of a trace-membership check."""

    holds: bool
    failure_index: int | None = None
    enabled_at_failure: frozenset[Visible] | None = None

    def __bool__(self) -> bool:
        return self.holds


def has_trace(
    p: ProcessExpr,
    trace: Sequence[Visible],
    env: ProcessEnv | None = None,
    state_cap: int = DEFAULT_STATE_CAP,
) -> TraceVerdict:
    """Decide whether the visible-event sequence is a trace of p.

    Membership is existential over nondeterministic paths, with TAU
    closure between visible steps. On failure the verdict carries the
    index of the first refused event and the visible events that were
    enabled at that point.
    """
    events = tuple(trace)
    for e in events:
        if not isinstance(e, Visible):
            raise TypeError(f"plans may contain visible events only, got {e!r}")
    env = _env(env)
    budget = _Budget(state_cap)
    here = _tau_closure_set((p,), env, budget)
    for i, e in enumerate(events):
        if len(here) == 1:
            nxt = _step(next(iter(here)), e, env)
        else:
            stepped: set[ProcessExpr] = set()
            for c in here:
                stepped |= _step(c, e, env)
            nxt = stepped
        if not nxt:
            return TraceVerdict(False, i, frozenset(_visible_initials(here, env)))
        if any(TAU in _initials(c, env) for c in nxt):
            here = _tau_closure_set(nxt, env, budget)
        else:
            budget.seen.update(nxt)
            if len(budget.seen) > budget.cap:
                raise StateBoundExceeded(budget.cap)
            here = nxt
    return TraceVerdict(True)


# ---------------------------------------------------------------------------
# Normalization and refinement


@dataclass(frozen=True)
class DetAutomaton:
    """Deterministic, TAU-free automaton with the same finite traces.

    Macro-states are TAU-closed configuration sets, numbered from 0 in
    discovery order; `tick_states` marks the macro-states where
    termination is available.
    """

    initial: int
    macro_states: tuple[frozenset[ProcessExpr], ...]
    transitions: tuple[dict[Visible, int], ...]
    tick_states: frozenset[int]

    @property
    def num_states(self) -> int:
        return len(self.macro_states)

    def transition(self, state: int, ev: Visible) -> int | None:
        return self.transitions[state].get(ev)

    def accepts(self, trace: Sequence[Event]) -> bool:
        """Walk the automaton; TICK is allowed only as a final element."""
        state = self.initial
        for i, e in enumerate(trace):
            if e is TICK:
                return i == len(trace) - 1 and state in self.tick_states
            nxt = self.transitions[state].get(e)
            if nxt is None:
                return False
            state = nxt
        return True

    def traces_upto(self, depth: int) -> set[Trace]:
        """Accepted traces of length <= depth (for oracle comparisons)."""
        out: set[Trace] = set()
        stack: list[tuple[int, Trace]] = [(self.initial, ())]
        while stack:
            state, trace = stack.pop()
            out.add(trace)
            if len(trace) >= depth:
                continue
            if state in self.tick_states:
                out.add(trace + (TICK,))
            for e, nxt in self.transitions[state].items():
                stack.append((nxt, trace + (e,)))
        return out

    def dump(self) -> str:
        """Transition list, one `state -event-> state` line per edge."""
        lines = []
        for sid, edges in enumerate(self.transitions):
            for e, target in edges.items():
                lines.append(f"{sid} -{e.name}-> {target}")
        return "\n".join(lines)


def normalize(
    p: ProcessExpr,
    env: ProcessEnv | None = None,
    bound: int = DEFAULT_STATE_CAP,
    order: Sequence[str] | None = None,
) -> DetAutomaton:
    """Subset construction over the TAU-closed configuration graph."""
    env = _env(env)
    budget = _Budget(bound)
    key = _event_key(order)

    start = _tau_closure((p,), env, budget)
    states = [start]
    index = {start: 0}
    transitions: list[dict[Visible, int]] = [{}]
    ticks = [_offers_tick(start, env)]

    frontier = 0
    while frontier < len(states):
        sid = frontier
        frontier += 1
        closure = states[sid]
        for e in sorted(_visible_initials(closure, env), key=key):
            nxt = _step_closure(closure, e, env, budget)
            tid = index.get(nxt)
            if tid is None:
                tid = len(states)
                if tid >= bound:
                    raise StateBoundExceeded(bound)
                index[nxt] = tid
                states.append(nxt)
                transitions.append({})
                ticks.append(_offers_tick(nxt, env))
            transitions[sid][e] = tid
    return DetAutomaton(
        initial=0,
        macro_states=tuple(states),
        transitions=tuple(transitions),
        tick_states=frozenset(i for i, t in enumerate(ticks) if t),
    )


@dataclass(frozen=True)
class RefinementVerdict:
    """Outcome of a traces-refinement check.

    The counterexample, present exactly when the check fails, is a
    shortest trace of the implementation that the specification cannot
    perform.
    """

    holds: bool
    counterexample: Trace | None = None

    def __bool__(self) -> bool:
        return self.holds


def refines_traces(
    spec: ProcessExpr,
    impl: ProcessExpr,
    env: ProcessEnv | None = None,
    bound: int = DEFAULT_STATE_CAP,
    order: Sequence[str] | None = None,
) -> RefinementVerdict:
    """Check that every finite trace of impl is also a trace of spec.

    Simulates impl's reachable configurations against the normalized
    spec automaton, breadth first, expanding events in the canonical
    order so the counterexample is deterministic.
    """
    env = _env(env)
    aut = normalize(spec, env, bound=bound, order=order)
    key = _event_key(order)
    budget = _Budget(bound)

    start = _tau_closure((impl,), env, budget)
    # BFS with parent links: (closure, spec state, parent index, event).
    nodes: list[tuple[frozenset[ProcessExpr], int, int, Event | None]] = [
        (start, aut.initial, -1, None)
    ]
    visited = {(start, aut.initial)}
    frontier = 0
    while frontier < len(nodes):
        me = frontier
        frontier += 1
        closure, sid, _, _ = nodes[me]
        for e in sorted(_visible_initials(closure, env), key=key):
            tid = aut.transitions[sid].get(e)
            if tid is None:
                return RefinementVerdict(False, _trace_to(nodes, me) + (e,))
            nxt = _step_closure(closure, e, env, budget)
            if (nxt, tid) not in visited:
                visited.add((nxt, tid))
                nodes.append((nxt, tid, me, e))
        if _offers_tick(closure, env) and sid not in aut.tick_states:
            return RefinementVerdict(False, _trace_to(nodes, me) + (TICK,))
    return RefinementVerdict(True)


def _trace_to(nodes, idx) -> Trace:
    out = []
    while idx >= 0:
        closure, sid, parent, ev = nodes[idx]
        if ev is not None:
            out.append(ev)
        idx = parent
    out.reverse()
    return tuple(out)
