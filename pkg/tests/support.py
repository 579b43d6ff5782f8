"""Shared test helpers: a seeded process-term generator and the
independent trace oracles the kernel laws are checked against."""

from __future__ import annotations

import random
from typing import Iterable

from turtlecheck import (
    ExtChoice,
    Hide,
    Interleave,
    Prefix,
    ProcessExpr,
    SKIP,
    STOP,
    TICK,
    Visible,
    initials,
    step,
)

EVENTS = (Visible("a"), Visible("b"), Visible("c"))


def random_term(rng: random.Random, depth: int = 4) -> ProcessExpr:
    """A Ref-free process term over a three-event alphabet."""
    if depth == 0 or rng.random() < 0.2:
        return rng.choice((STOP, SKIP))
    kind = rng.choice(("prefix", "prefix", "prefix", "choice", "inter", "hide"))
    if kind == "prefix":
        return Prefix(rng.choice(EVENTS), random_term(rng, depth - 1))
    if kind == "choice":
        return ExtChoice(random_term(rng, depth - 1), random_term(rng, depth - 1))
    if kind == "inter":
        return Interleave(random_term(rng, depth - 1), random_term(rng, depth - 1))
    hidden = frozenset(rng.sample(EVENTS, rng.randint(1, len(EVENTS))))
    return Hide(random_term(rng, depth - 1), hidden)


def prefix_count(p: ProcessExpr) -> int:
    """Upper bound on visible trace length: total prefix nodes."""
    if isinstance(p, Prefix):
        return 1 + prefix_count(p.cont)
    if isinstance(p, (ExtChoice, Interleave)):
        return prefix_count(p.left) + prefix_count(p.right)
    if isinstance(p, Hide):
        return prefix_count(p.body)
    return 0


def trace_bound(*terms: ProcessExpr) -> int:
    """Exploration depth at which the full trace set is reached."""
    return sum(prefix_count(t) for t in terms) + 1  # +1 for a final tick


def shuffles(u: tuple, v: tuple) -> set[tuple]:
    """All interleavings of two event sequences (no tick handling)."""
    if not u:
        return {v}
    if not v:
        return {u}
    return {(u[0],) + rest for rest in shuffles(u[1:], v)} | {
        (v[0],) + rest for rest in shuffles(u, v[1:])
    }


def interleave_oracle(left_traces: set[tuple], right_traces: set[tuple]) -> set[tuple]:
    """Traces of an interleaving, with distributed termination: a tick
    appears only when both component traces end in one."""
    out: set[tuple] = set()
    for u in left_traces:
        u_ticks = bool(u) and u[-1] is TICK
        uu = u[:-1] if u_ticks else u
        for v in right_traces:
            v_ticks = bool(v) and v[-1] is TICK
            vv = v[:-1] if v_ticks else v
            for s in shuffles(uu, vv):
                out.add(s)
                if u_ticks and v_ticks:
                    out.add(s + (TICK,))
    return out


def hide_oracle(traces: set[tuple], hidden: frozenset[Visible]) -> set[tuple]:
    """Traces after hiding: the hidden events are deleted."""
    return {
        tuple(e for e in t if not (isinstance(e, Visible) and e in hidden))
        for t in traces
    }


def count_configs(p: ProcessExpr, env=None) -> int:
    """Reachable kernel configurations of p, over every event kind."""
    seen = {p}
    stack = [p]
    while stack:
        c = stack.pop()
        for e in initials(c, env):
            for s in step(c, e, env):
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
    return len(seen)


def erase_tick(traces: Iterable[tuple]) -> set[tuple]:
    return {tuple(e for e in t if e is not TICK) for t in traces}
