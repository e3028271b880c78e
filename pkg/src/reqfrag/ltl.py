"""Temporal-logic formulas over trace atoms, with finite-trace evaluation.

``to_ltl`` gives a global-scope, fully inlined requirement an explicit
formula. With C the condition conjunction and T the timing/response formula
(always -> G R, immediately -> R, never -> G !R, eventually -> F R,
until q -> R W q, within n -> F<=n R, for n -> G<=n R), the emission is

    (C -> T) & G((!C & X C) -> X T)

or T alone when there is no condition. The first conjunct covers a
condition already true at the start, the second re-arms the obligation at
every rising edge, matching the trigger semantics exactly.

``eval_ltl`` interprets formulas on finite traces: X is strong (false at the
last tick), G/F/U/W quantify over the remaining suffix, and the bounded
operators clip their window to the trace end with the same strict (F<=n) and
lenient (G<=n) truncation as the within/for timings.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsupportedScope
from .model import (
    And as BAnd,
    Atom as ModelAtom,
    AtomExpr,
    BoolExpr,
    Comparison,
    FragmentRef,
    Implies as BImplies,
    Not as BNot,
    Or as BOr,
    Requirement,
    TimingKind,
)
from .semantics import Trace


class LtlFormula:
    """Base class for formula nodes."""


@dataclass(frozen=True)
class Atom(LtlFormula):
    atom: ModelAtom


@dataclass(frozen=True)
class Literal(LtlFormula):
    value: bool


@dataclass(frozen=True)
class Not(LtlFormula):
    operand: LtlFormula


@dataclass(frozen=True)
class And(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Or(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Implies(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Next(LtlFormula):
    """Strong next: false at the last tick."""

    operand: LtlFormula


@dataclass(frozen=True)
class Globally(LtlFormula):
    operand: LtlFormula


@dataclass(frozen=True)
class Finally(LtlFormula):
    operand: LtlFormula


@dataclass(frozen=True)
class Until(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class WeakUntil(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class BoundedFinally(LtlFormula):
    bound: int
    operand: LtlFormula


@dataclass(frozen=True)
class BoundedGlobally(LtlFormula):
    bound: int
    operand: LtlFormula


# ---------------------------------------------------------------------------
# Emission


def bool_to_ltl(e: BoolExpr) -> LtlFormula:
    if isinstance(e, AtomExpr):
        return Atom(e.atom)
    if isinstance(e, BNot):
        return Not(bool_to_ltl(e.operand))
    if isinstance(e, (BAnd, BOr)):
        ctor = And if isinstance(e, BAnd) else Or
        out = bool_to_ltl(e.operands[0])
        for op in e.operands[1:]:
            out = ctor(out, bool_to_ltl(op))
        return out
    if isinstance(e, BImplies):
        return Implies(bool_to_ltl(e.left), bool_to_ltl(e.right))
    if isinstance(e, FragmentRef):
        raise ValueError(f"cannot emit unresolved fragment reference '@{e.name}'")
    raise TypeError(f"not an expression: {e!r}")


def _timing_formula(req: Requirement) -> LtlFormula:
    response = bool_to_ltl(req.response)
    kind = req.timing.kind
    if kind in (TimingKind.DEFAULT, TimingKind.ALWAYS):
        return Globally(response)
    if kind is TimingKind.IMMEDIATELY:
        return response
    if kind is TimingKind.NEVER:
        return Globally(Not(response))
    if kind is TimingKind.EVENTUALLY:
        return Finally(response)
    if kind is TimingKind.UNTIL:
        return WeakUntil(response, bool_to_ltl(req.timing.expr))  # type: ignore[arg-type]
    if kind is TimingKind.WITHIN:
        return BoundedFinally(req.timing.bound, response)  # type: ignore[arg-type]
    if kind is TimingKind.FOR:
        return BoundedGlobally(req.timing.bound, response)  # type: ignore[arg-type]
    raise TypeError(f"not a timing kind: {kind!r}")


def to_ltl(req: Requirement) -> LtlFormula:
    """Formula for a fully inlined, global-scope requirement."""
    if not req.scope.is_global:
        raise UnsupportedScope(
            f"formula emission covers global scope only, not '{req.scope.kind.value}'"
        )
    if req.uses:
        raise ValueError(f"requirement '{req.id}' still references fragments")
    obligation = _timing_formula(req)
    if not req.conditions:
        return obligation
    condition = bool_to_ltl(req.conditions[0].expr)
    for clause in req.conditions[1:]:
        condition = And(condition, bool_to_ltl(clause.expr))
    rearm = Globally(
        Implies(And(Not(condition), Next(condition)), Next(obligation))
    )
    return And(Implies(condition, obligation), rearm)


# ---------------------------------------------------------------------------
# Finite-trace evaluation


def eval_ltl(f: LtlFormula, trace: Trace, position: int = 0) -> bool:
    n = len(trace)
    if not 0 <= position < n:
        raise ValueError(f"position {position} outside trace of length {n}")
    return _eval(f, trace, position, n)


def _eval(f: LtlFormula, trace: Trace, i: int, n: int) -> bool:
    if isinstance(f, Atom):
        return trace.value(f.atom, i)
    if isinstance(f, Literal):
        return f.value
    if isinstance(f, Not):
        return not _eval(f.operand, trace, i, n)
    if isinstance(f, And):
        return _eval(f.left, trace, i, n) and _eval(f.right, trace, i, n)
    if isinstance(f, Or):
        return _eval(f.left, trace, i, n) or _eval(f.right, trace, i, n)
    if isinstance(f, Implies):
        return (not _eval(f.left, trace, i, n)) or _eval(f.right, trace, i, n)
    if isinstance(f, Next):
        return i + 1 < n and _eval(f.operand, trace, i + 1, n)
    if isinstance(f, Globally):
        return all(_eval(f.operand, trace, j, n) for j in range(i, n))
    if isinstance(f, Finally):
        return any(_eval(f.operand, trace, j, n) for j in range(i, n))
    if isinstance(f, Until):
        for k in range(i, n):
            if _eval(f.right, trace, k, n):
                return all(_eval(f.left, trace, j, n) for j in range(i, k))
        return False
    if isinstance(f, WeakUntil):
        for k in range(i, n):
            if _eval(f.right, trace, k, n):
                return all(_eval(f.left, trace, j, n) for j in range(i, k))
        return all(_eval(f.left, trace, j, n) for j in range(i, n))
    if isinstance(f, BoundedFinally):
        last = min(i + f.bound, n - 1)
        return any(_eval(f.operand, trace, j, n) for j in range(i, last + 1))
    if isinstance(f, BoundedGlobally):
        last = min(i + f.bound, n - 1)
        return all(_eval(f.operand, trace, j, n) for j in range(i, last + 1))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Rendering

_PREC_IMPL = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_BINTEMP = 4  # U, W (right-associative)
_PREC_UNARY = 5
_PREC_LEAF = 6


def _prec(f: LtlFormula) -> int:
    if isinstance(f, Implies):
        return _PREC_IMPL
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, (Until, WeakUntil)):
        return _PREC_BINTEMP
    if isinstance(f, (Not, Next, Globally, Finally, BoundedFinally, BoundedGlobally)):
        return _PREC_UNARY
    return _PREC_LEAF


def formula_text(f: LtlFormula) -> str:
    """Conventional rendering: G, F, X, U, W, F<=n, G<=n, &, |, !, ->."""
    if isinstance(f, Atom):
        if isinstance(f.atom, Comparison):
            return f"({f.atom.text})"
        return f.atom.text
    if isinstance(f, Literal):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return "!" + _wrap(f.operand, _PREC_UNARY)
    if isinstance(f, Next):
        return "X " + _wrap(f.operand, _PREC_UNARY)
    if isinstance(f, Globally):
        return "G " + _wrap(f.operand, _PREC_UNARY)
    if isinstance(f, Finally):
        return "F " + _wrap(f.operand, _PREC_UNARY)
    if isinstance(f, BoundedFinally):
        return f"F<={f.bound} " + _wrap(f.operand, _PREC_UNARY)
    if isinstance(f, BoundedGlobally):
        return f"G<={f.bound} " + _wrap(f.operand, _PREC_UNARY)
    if isinstance(f, Until):
        return _binary_temporal(f.left, "U", f.right)
    if isinstance(f, WeakUntil):
        return _binary_temporal(f.left, "W", f.right)
    if isinstance(f, And):
        return f"{_wrap(f.left, _PREC_AND, strict=False)} & {_wrap(f.right, _PREC_AND, strict=False)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, _PREC_OR, strict=False)} | {_wrap(f.right, _PREC_OR, strict=False)}"
    if isinstance(f, Implies):
        return f"{_wrap(f.left, _PREC_IMPL, strict=True)} -> {_wrap(f.right, _PREC_IMPL, strict=False)}"
    raise TypeError(f"not a formula: {f!r}")


def _binary_temporal(left: LtlFormula, op: str, right: LtlFormula) -> str:
    # right-associative: parenthesize a same-precedence left side
    return f"{_wrap(left, _PREC_BINTEMP, strict=True)} {op} {_wrap(right, _PREC_BINTEMP, strict=False)}"


def _wrap(f: LtlFormula, parent_prec: int, strict: bool = True) -> str:
    text = formula_text(f)
    mine = _prec(f)
    if mine < parent_prec or (strict and mine == parent_prec and mine != _PREC_UNARY):
        return f"({text})"
    return text
