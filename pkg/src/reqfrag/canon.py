"""Canonical forms: expression text, structural normalization, stable hashing.

Normalization rewrites a boolean expression to a fixed point:

  * ``a => b`` becomes ``!a | b``
  * double negation is eliminated
  * nested And/And and Or/Or are flattened
  * duplicate And/Or operands are dropped
  * And/Or operands are sorted by (canonical hash, canonical text); a
    single surviving operand replaces the node

No constant folding, De Morgan, or absorption happens: atoms are opaque and
the goal is a deterministic matching key, not a minimal form.
"""
from __future__ import annotations

import hashlib

from .model import (
    And,
    AtomExpr,
    BoolExpr,
    Comparison,
    ConditionClause,
    FragmentRef,
    Ident,
    Implies,
    Not,
    Or,
    Requirement,
    Scope,
    Timing,
    TimingKind,
)

# Precedence levels for printing: higher binds tighter.
_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4
_PREC_LEAF = 5


def _prec(e: BoolExpr) -> int:
    if isinstance(e, Implies):
        return _PREC_IMPLIES
    if isinstance(e, Or):
        return _PREC_OR
    if isinstance(e, And):
        return _PREC_AND
    if isinstance(e, Not):
        return _PREC_NOT
    return _PREC_LEAF


def expr_text(e: BoolExpr) -> str:
    """Canonical rendering with minimal parentheses.

    Comparison atoms are always parenthesized so they read as units inside
    operator chains; nested same-operator nodes keep their parentheses so the
    text is injective on structure.
    """
    if isinstance(e, AtomExpr):
        if isinstance(e.atom, Comparison):
            return f"({e.atom.text})"
        return e.atom.text
    if isinstance(e, FragmentRef):
        return f"@{e.name}"
    if isinstance(e, Not):
        if _prec(e.operand) < _PREC_NOT or isinstance(e.operand, Not):
            return f"!({expr_text(e.operand)})"
        return f"!{expr_text(e.operand)}"
    if isinstance(e, (And, Or)):
        sep = " & " if isinstance(e, And) else " | "
        mine = _prec(e)
        parts = []
        for op in e.operands:
            text = expr_text(op)
            if _prec(op) < mine or type(op) is type(e):
                text = f"({text})"
            parts.append(text)
        return sep.join(parts)
    if isinstance(e, Implies):
        left = expr_text(e.left)
        if _prec(e.left) <= _PREC_IMPLIES:
            left = f"({left})"
        right = expr_text(e.right)
        if _prec(e.right) < _PREC_IMPLIES:
            right = f"({right})"
        return f"{left} => {right}"
    raise TypeError(f"not an expression: {e!r}")


def group_text(e: BoolExpr) -> str:
    """Text for an expr that already sits inside structural parentheses."""
    if isinstance(e, AtomExpr) and isinstance(e.atom, Comparison):
        return e.atom.text
    return expr_text(e)


def _digest(text: str) -> int:
    return int.from_bytes(
        hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "big"
    )


def normalize(e: BoolExpr) -> BoolExpr:
    if isinstance(e, (AtomExpr, FragmentRef)):
        return e
    if isinstance(e, Not):
        inner = normalize(e.operand)
        if isinstance(inner, Not):
            return inner.operand
        return Not(inner)
    if isinstance(e, Implies):
        return normalize(Or((Not(e.left), e.right)))
    if isinstance(e, (And, Or)):
        flat: list[BoolExpr] = []
        for op in e.operands:
            n = normalize(op)
            if type(n) is type(e):
                flat.extend(n.operands)  # type: ignore[attr-defined]
            else:
                flat.append(n)
        unique: list[tuple[int, str, BoolExpr]] = []
        seen: set[str] = set()
        for n in flat:
            text = expr_text(n)
            if text not in seen:
                seen.add(text)
                unique.append((_digest(text), text, n))
        unique.sort(key=lambda item: (item[0], item[1]))
        if len(unique) == 1:
            return unique[0][2]
        ctor = And if isinstance(e, And) else Or
        return ctor(tuple(item[2] for item in unique))
    raise TypeError(f"not an expression: {e!r}")


def canonical_hash(e: BoolExpr) -> int:
    """64-bit digest equal for all expressions sharing a normal form."""
    return _digest(expr_text(normalize(e)))


def normalize_timing(t: Timing) -> Timing:
    if t.kind is TimingKind.UNTIL:
        return Timing(TimingKind.UNTIL, expr=normalize(t.expr))  # type: ignore[arg-type]
    return t


def timing_key(t: Timing) -> tuple:
    n = normalize_timing(t)
    return (
        n.kind.value,
        expr_text(n.expr) if n.expr is not None else None,
        n.bound,
    )


def scope_key(s: Scope) -> tuple:
    return (s.kind.value, s.mode.text if s.mode is not None else None)


def condition_key(conditions: tuple[ConditionClause, ...]) -> str | None:
    """Normalized conjunction of all clause expressions, keyword-blind.

    ``when`` and ``if`` clauses carry identical semantics, so the key erases
    the keyword and clause boundaries.
    """
    exprs = [c.expr for c in conditions]
    if not exprs:
        return None
    if len(exprs) == 1:
        return expr_text(normalize(exprs[0]))
    return expr_text(normalize(And(tuple(exprs))))


def requirement_key(req: Requirement) -> tuple:
    """Comparable fingerprint of a requirement modulo normalization.

    Intended for inlined requirements; a leftover fragment reference in
    `uses` is included so unequal things never collide.
    """
    return (
        scope_key(req.scope),
        condition_key(req.conditions),
        tuple(sorted(req.uses)),
        req.component.text,
        timing_key(req.timing),
        expr_text(normalize(req.response)),
    )
