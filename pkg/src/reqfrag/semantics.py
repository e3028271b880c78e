"""Finite-trace semantics for fully inlined requirements.

A requirement is evaluated against a trace in three layers:

* ``segments`` turns the scope into half-open tick intervals the
  requirement governs (the whole trace, in-mode runs, before/after a mode).
* ``triggers`` finds the ticks inside a segment where the condition
  conjunction becomes true: the segment start if already true, plus every
  rising edge. An unconditioned requirement triggers once, at the start.
* ``obligation_holds`` checks the timing/response obligation spawned by one
  trigger:

    default, always   response at every tick from the trigger to segment end
    immediately       response at the trigger tick
    never             response false from the trigger to segment end
    eventually        response somewhere between trigger and segment end
    until (q)         response at every tick before the first q (weak: q may
                      never arrive; the response is not required at q itself)
    within n ticks    response at some tick in [t, t+n], but strictly before
                      the segment end: a deadline cut off by the segment
                      still fails
    for n ticks       response at every tick in [t, t+n] clipped to the
                      segment: ticks that do not exist are not demanded

The requirement holds iff every obligation of every trigger of every
segment holds. No triggers (for instance a condition that never rises)
makes the requirement vacuously true.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import MissingAtom
from .model import (
    And,
    Atom,
    AtomExpr,
    BoolExpr,
    ConditionClause,
    FragmentRef,
    Implies,
    Not,
    Or,
    Requirement,
    Scope,
    ScopeKind,
    Timing,
    TimingKind,
    referenced_fragments,
    requirement_atoms,
)

Interval = tuple[int, int]  # half-open [begin, end)


@dataclass(frozen=True)
class Trace:
    """Finite sequence of truth assignments to a fixed atom list."""

    atoms: tuple[Atom, ...]
    steps: tuple[tuple[bool, ...], ...]
    _index: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not self.steps:
            raise ValueError("a trace needs at least one tick")
        width = len(self.atoms)
        for row in self.steps:
            if len(row) != width:
                raise ValueError("every tick must assign every atom")
        object.__setattr__(self, "_index", {a.text: i for i, a in enumerate(self.atoms)})

    def __len__(self) -> int:
        return len(self.steps)

    def column(self, atom: Atom) -> int:
        try:
            return self._index[atom.text]
        except KeyError:
            raise MissingAtom(atom.text) from None

    def value(self, atom: Atom, tick: int) -> bool:
        return self.steps[tick][self.column(atom)]


def eval_expr(e: BoolExpr, trace: Trace, tick: int) -> bool:
    if isinstance(e, AtomExpr):
        return trace.value(e.atom, tick)
    if isinstance(e, Not):
        return not eval_expr(e.operand, trace, tick)
    if isinstance(e, And):
        return all(eval_expr(op, trace, tick) for op in e.operands)
    if isinstance(e, Or):
        return any(eval_expr(op, trace, tick) for op in e.operands)
    if isinstance(e, Implies):
        return (not eval_expr(e.left, trace, tick)) or eval_expr(e.right, trace, tick)
    if isinstance(e, FragmentRef):
        raise ValueError(f"cannot evaluate unresolved fragment reference '@{e.name}'")
    raise TypeError(f"not an expression: {e!r}")


def segments(scope: Scope, mode_truth: Sequence[bool], trace_len: int) -> list[Interval]:
    """Scope intervals over a trace of trace_len ticks."""
    if scope.kind is ScopeKind.GLOBAL:
        return [(0, trace_len)]
    runs = _true_runs(mode_truth, trace_len)
    if scope.kind is ScopeKind.IN:
        return runs
    if scope.kind is ScopeKind.BEFORE:
        if not runs:
            return [(0, trace_len)]
        first_true = runs[0][0]
        return [] if first_true == 0 else [(0, first_true)]
    if scope.kind is ScopeKind.AFTER:
        if not runs:
            return []
        end_of_first = runs[0][1]
        return [] if end_of_first == trace_len else [(end_of_first, trace_len)]
    raise TypeError(f"not a scope kind: {scope.kind!r}")


def _true_runs(truth: Sequence[bool], n: int) -> list[Interval]:
    runs: list[Interval] = []
    start = None
    for t in range(n):
        if truth[t]:
            if start is None:
                start = t
        elif start is not None:
            runs.append((start, t))
            start = None
    if start is not None:
        runs.append((start, n))
    return runs


def scope_segments(scope: Scope, trace: Trace) -> list[Interval]:
    if scope.kind is ScopeKind.GLOBAL:
        return [(0, len(trace))]
    col = trace.column(scope.mode)  # type: ignore[arg-type]
    truth = [row[col] for row in trace.steps]
    return segments(scope, truth, len(trace))


def triggers(
    conditions: tuple[ConditionClause, ...] | list[ConditionClause],
    segment: Interval,
    trace: Trace,
) -> list[int]:
    """Ticks in the segment where the condition conjunction becomes true."""
    begin, end = segment
    if not conditions:
        return [begin]
    exprs = [c.expr for c in conditions]

    def holds(t: int) -> bool:
        return all(eval_expr(e, trace, t) for e in exprs)

    out = []
    prev = False
    for t in range(begin, end):
        cur = holds(t)
        if cur and (t == begin or not prev):
            out.append(t)
        prev = cur
    return out


def obligation_holds(
    timing: Timing,
    response: BoolExpr,
    trigger: int,
    segment: Interval,
    trace: Trace,
) -> bool:
    begin, end = segment
    if not (begin <= trigger < end):
        raise ValueError("trigger must lie inside the segment")
    kind = timing.kind

    if kind in (TimingKind.DEFAULT, TimingKind.ALWAYS):
        return all(eval_expr(response, trace, j) for j in range(trigger, end))
    if kind is TimingKind.IMMEDIATELY:
        return eval_expr(response, trace, trigger)
    if kind is TimingKind.NEVER:
        return not any(eval_expr(response, trace, j) for j in range(trigger, end))
    if kind is TimingKind.EVENTUALLY:
        return any(eval_expr(response, trace, j) for j in range(trigger, end))
    if kind is TimingKind.UNTIL:
        stop = end
        for j in range(trigger, end):
            if eval_expr(timing.expr, trace, j):  # type: ignore[arg-type]
                stop = j
                break
        return all(eval_expr(response, trace, j) for j in range(trigger, stop))
    if kind is TimingKind.WITHIN:
        last = min(trigger + timing.bound, end - 1)  # type: ignore[operator]
        return any(eval_expr(response, trace, j) for j in range(trigger, last + 1))
    if kind is TimingKind.FOR:
        last = min(trigger + timing.bound, end - 1)  # type: ignore[operator]
        return all(eval_expr(response, trace, j) for j in range(trigger, last + 1))
    raise TypeError(f"not a timing kind: {kind!r}")


def evaluate(req: Requirement, trace: Trace, check_atoms: bool = True) -> bool:
    """True iff every trigger in every scope segment meets its obligation.

    The requirement must be fully inlined (no fragment references). With
    check_atoms, a trace that misses any of the requirement's atoms raises
    MissingAtom even if the atom would never be consulted.
    """
    if referenced_fragments(req):
        raise ValueError(f"requirement '{req.id}' still references fragments")
    if check_atoms:
        for atom in requirement_atoms(req):
            trace.column(atom)
    for segment in scope_segments(req.scope, trace):
        for t in triggers(req.conditions, segment, trace):
            if not obligation_holds(req.timing, req.response, t, segment, trace):
                return False
    return True
