"""Core domain model: atoms, boolean expressions, requirements, fragments.

All types are immutable values; transformations build new objects. Atoms are
opaque truth carriers: a comparison such as ``x > 5`` is a single atom whose
identity is its canonical text, never an arithmetic statement.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    CyclicFragment,
    DuplicateId,
    FragmentNotConditionOnly,
    NameCollision,
    UnknownFragment,
    UnknownRequirement,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

RELOPS = ("<", "<=", ">", ">=", "=", "!=")


@dataclass(frozen=True)
class SourceSpan:
    """1-based, inclusive position range used for error reporting."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


def merge_spans(a: SourceSpan | None, b: SourceSpan | None) -> SourceSpan | None:
    if a is None:
        return b
    if b is None:
        return a
    return SourceSpan(a.file, a.start_line, a.start_col, b.end_line, b.end_col)


# ---------------------------------------------------------------------------
# Terms (the insides of comparison atoms; never interpreted numerically)


class Term:
    """Base class for comparison operands."""


@dataclass(frozen=True)
class NameTerm(Term):
    name: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class NumberTerm(Term):
    literal: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CallTerm(Term):
    function: str
    args: tuple[Term, ...]
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ArithTerm(Term):
    """Additive chain node; the parser always associates these to the left."""

    left: Term
    op: str  # "+" or "-"
    right: Term
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


def term_text(t: Term) -> str:
    if isinstance(t, NameTerm):
        return t.name
    if isinstance(t, NumberTerm):
        return t.literal
    if isinstance(t, CallTerm):
        return f"{t.function}({','.join(term_text(a) for a in t.args)})"
    if isinstance(t, ArithTerm):
        return f"{term_text(t.left)} {t.op} {term_text(t.right)}"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Atoms


class Atom:
    """Opaque truth carrier; equal iff canonical texts are equal."""

    text: str


@dataclass(frozen=True)
class Ident(Atom):
    name: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not IDENT_RE.match(self.name):
            raise ValueError(f"invalid identifier atom: {self.name!r}")

    @property
    def text(self) -> str:
        return self.name


@dataclass(frozen=True)
class Comparison(Atom):
    lhs: Term
    op: str
    rhs: Term
    span: SourceSpan | None = field(default=None, compare=False, repr=False)
    _text: str = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.op not in RELOPS:
            raise ValueError(f"invalid relational operator: {self.op!r}")
        object.__setattr__(
            self, "_text", f"{term_text(self.lhs)} {self.op} {term_text(self.rhs)}"
        )

    @property
    def text(self) -> str:
        return self._text


# ---------------------------------------------------------------------------
# Boolean expressions


class BoolExpr:
    """Base class for boolean expressions over atoms and fragment references."""


@dataclass(frozen=True)
class AtomExpr(BoolExpr):
    atom: Atom
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FragmentRef(BoolExpr):
    name: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not(BoolExpr):
    operand: BoolExpr
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And(BoolExpr):
    operands: tuple[BoolExpr, ...]
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("And needs at least two operands")


@dataclass(frozen=True)
class Or(BoolExpr):
    operands: tuple[BoolExpr, ...]
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("Or needs at least two operands")


@dataclass(frozen=True)
class Implies(BoolExpr):
    left: BoolExpr
    right: BoolExpr
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


def conjoin(exprs: Iterable[BoolExpr]) -> BoolExpr | None:
    """Conjunction of exprs: None for zero, the expr itself for one."""
    items = tuple(exprs)
    if not items:
        return None
    if len(items) == 1:
        return items[0]
    return And(items)


# ---------------------------------------------------------------------------
# Clauses, scopes, timings


class Keyword(Enum):
    WHEN = "when"
    IF = "if"


@dataclass(frozen=True)
class ConditionClause:
    keyword: Keyword
    expr: BoolExpr
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


class ScopeKind(Enum):
    GLOBAL = "global"
    IN = "in"
    BEFORE = "before"
    AFTER = "after"


@dataclass(frozen=True)
class Scope:
    kind: ScopeKind = ScopeKind.GLOBAL
    mode: Ident | None = None
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind is ScopeKind.GLOBAL:
            if self.mode is not None:
                raise ValueError("global scope takes no mode")
        elif self.mode is None:
            raise ValueError(f"{self.kind.value} scope requires a mode atom")

    @property
    def is_global(self) -> bool:
        return self.kind is ScopeKind.GLOBAL


GLOBAL_SCOPE = Scope()


class TimingKind(Enum):
    DEFAULT = "default"
    IMMEDIATELY = "immediately"
    ALWAYS = "always"
    NEVER = "never"
    EVENTUALLY = "eventually"
    UNTIL = "until"
    WITHIN = "within"
    FOR = "for"


@dataclass(frozen=True)
class Timing:
    kind: TimingKind = TimingKind.DEFAULT
    expr: BoolExpr | None = None  # UNTIL stop condition
    bound: int | None = None  # WITHIN / FOR tick count
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind is TimingKind.UNTIL:
            if self.expr is None:
                raise ValueError("until timing requires a stop expression")
        elif self.expr is not None:
            raise ValueError(f"{self.kind.value} timing takes no expression")
        if self.kind in (TimingKind.WITHIN, TimingKind.FOR):
            if self.bound is None or self.bound < 1:
                raise ValueError(f"{self.kind.value} timing requires a tick count >= 1")
        elif self.bound is not None:
            raise ValueError(f"{self.kind.value} timing takes no tick count")

    @property
    def is_default(self) -> bool:
        return self.kind is TimingKind.DEFAULT


DEFAULT_TIMING = Timing()


# ---------------------------------------------------------------------------
# Requirements, fragments, sets


@dataclass(frozen=True, kw_only=True)
class Requirement:
    id: str
    scope: Scope = GLOBAL_SCOPE
    conditions: tuple[ConditionClause, ...] = ()
    uses: tuple[str, ...] = ()
    component: Ident
    timing: Timing = DEFAULT_TIMING
    response: BoolExpr
    parent: str | None = None
    comments: tuple[str, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, kw_only=True)
class Fragment:
    name: str
    scope: Scope = GLOBAL_SCOPE
    conditions: tuple[ConditionClause, ...] = ()
    uses: tuple[str, ...] = ()
    timing: Timing = DEFAULT_TIMING
    response: BoolExpr | None = None
    comments: tuple[str, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def is_condition_only(self) -> bool:
        """True when the fragment contributes nothing but condition clauses."""
        return self.scope.is_global and self.timing.is_default and self.response is None


@dataclass(frozen=True)
class RequirementSet:
    requirements: dict[str, Requirement]
    fragments: dict[str, Fragment]

    def requirement(self, requirement_id: str) -> Requirement:
        try:
            return self.requirements[requirement_id]
        except KeyError:
            raise UnknownRequirement(requirement_id) from None

    def fragment(self, name: str) -> Fragment:
        try:
            return self.fragments[name]
        except KeyError:
            raise UnknownFragment(name) from None


def build_set(
    requirements: Iterable[Requirement], fragments: Iterable[Fragment] = ()
) -> RequirementSet:
    """Assemble and validate a set, rejecting duplicate names."""
    req_map: dict[str, Requirement] = {}
    frag_map: dict[str, Fragment] = {}
    for f in fragments:
        if f.name in frag_map:
            raise DuplicateId(f.name, f.span)
        frag_map[f.name] = f
    for r in requirements:
        if r.id in req_map:
            raise DuplicateId(r.id, r.span)
        req_map[r.id] = r
    s = RequirementSet(req_map, frag_map)
    validate_set(s)
    return s


# ---------------------------------------------------------------------------
# Structure walks


def iter_subexprs(e: BoolExpr) -> Iterator[BoolExpr]:
    """Yield e and every expression nested inside it, outermost first."""
    yield e
    if isinstance(e, Not):
        yield from iter_subexprs(e.operand)
    elif isinstance(e, (And, Or)):
        for op in e.operands:
            yield from iter_subexprs(op)
    elif isinstance(e, Implies):
        yield from iter_subexprs(e.left)
        yield from iter_subexprs(e.right)


def expr_atoms(e: BoolExpr) -> Iterator[Atom]:
    for sub in iter_subexprs(e):
        if isinstance(sub, AtomExpr):
            yield sub.atom


def expr_refs(e: BoolExpr) -> Iterator[FragmentRef]:
    for sub in iter_subexprs(e):
        if isinstance(sub, FragmentRef):
            yield sub


def _item_exprs(item: Requirement | Fragment) -> Iterator[BoolExpr]:
    for clause in item.conditions:
        yield clause.expr
    if item.timing.expr is not None:
        yield item.timing.expr
    if item.response is not None:
        yield item.response


def requirement_atoms(req: Requirement | Fragment) -> list[Atom]:
    """Atoms a trace must cover to evaluate req, in first-appearance order.

    The component is metadata, not a trace variable, so it is excluded.
    """
    seen: set[str] = set()
    out: list[Atom] = []
    candidates: list[Atom] = []
    if req.scope.mode is not None:
        candidates.append(req.scope.mode)
    for e in _item_exprs(req):
        candidates.extend(expr_atoms(e))
    for a in candidates:
        if a.text not in seen:
            seen.add(a.text)
            out.append(a)
    return out


def referenced_fragments(item: Requirement | Fragment) -> list[str]:
    """Directly referenced fragment names: uses entries plus inline refs."""
    seen: set[str] = set()
    out: list[str] = []
    for name in item.uses:
        if name not in seen:
            seen.add(name)
            out.append(name)
    for e in _item_exprs(item):
        for ref in expr_refs(e):
            if ref.name not in seen:
                seen.add(ref.name)
                out.append(ref.name)
    return out


# ---------------------------------------------------------------------------
# Whole-set validation


def validate_set(s: RequirementSet) -> None:
    """Check referential integrity, acyclicity, and naming invariants."""
    for rid, req in s.requirements.items():
        if req.id != rid:
            raise ValueError(f"requirement keyed as {rid!r} has id {req.id!r}")
        if req.parent is not None and req.parent not in s.requirements:
            raise UnknownRequirement(req.parent)
    for name, frag in s.fragments.items():
        if frag.name != name:
            raise ValueError(f"fragment keyed as {name!r} has name {frag.name!r}")

    atom_names = {
        a.text
        for item in (*s.requirements.values(), *s.fragments.values())
        for a in requirement_atoms(item)
        if isinstance(a, Ident)
    }
    atom_names.update(r.component.name for r in s.requirements.values())
    for name in s.fragments:
        if name in atom_names:
            raise NameCollision(name, "fragment name is also used as an atom identifier")

    for item in (*s.requirements.values(), *s.fragments.values()):
        for name in item.uses:
            if name not in s.fragments:
                raise UnknownFragment(name)
        for e in _item_exprs(item):
            for ref in expr_refs(e):
                if ref.name not in s.fragments:
                    raise UnknownFragment(ref.name, ref.span)
                _check_condition_only(s, ref.name)

    _check_acyclic(s)


def _check_condition_only(s: RequirementSet, name: str, _seen: set[str] | None = None) -> None:
    """Inline-referenced fragments must contribute conditions only, transitively."""
    seen = _seen if _seen is not None else set()
    if name in seen:
        return
    seen.add(name)
    frag = s.fragments[name]
    if not frag.scope.is_global:
        raise FragmentNotConditionOnly(name, "it contributes a scope")
    if not frag.timing.is_default:
        raise FragmentNotConditionOnly(name, "it contributes a timing")
    if frag.response is not None:
        raise FragmentNotConditionOnly(name, "it contributes a response")
    for dep in referenced_fragments(frag):
        if dep in s.fragments:
            _check_condition_only(s, dep, seen)


def _check_acyclic(s: RequirementSet) -> None:
    state: dict[str, int] = {}  # 1 = visiting, 2 = done

    def visit(name: str, path: list[str]) -> None:
        mark = state.get(name)
        if mark == 2:
            return
        if mark == 1:
            cycle = path[path.index(name) :] + [name]
            raise CyclicFragment(tuple(cycle))
        state[name] = 1
        path.append(name)
        frag = s.fragments.get(name)
        if frag is not None:
            for dep in referenced_fragments(frag):
                if dep in s.fragments:
                    visit(dep, path)
        path.pop()
        state[name] = 2

    for name in s.fragments:
        visit(name, [])


# ---------------------------------------------------------------------------
# JSON serialization (one way; stable field names, arrays for ordered maps)


def term_to_json(t: Term) -> dict:
    if isinstance(t, NameTerm):
        return {"kind": "name", "name": t.name}
    if isinstance(t, NumberTerm):
        return {"kind": "number", "literal": t.literal}
    if isinstance(t, CallTerm):
        return {
            "kind": "call",
            "function": t.function,
            "args": [term_to_json(a) for a in t.args],
        }
    if isinstance(t, ArithTerm):
        return {
            "kind": "arith",
            "left": term_to_json(t.left),
            "op": t.op,
            "right": term_to_json(t.right),
        }
    raise TypeError(f"not a term: {t!r}")


def atom_to_json(a: Atom) -> dict:
    if isinstance(a, Ident):
        return {"kind": "identifier", "text": a.text}
    if isinstance(a, Comparison):
        return {
            "kind": "comparison",
            "text": a.text,
            "lhs": term_to_json(a.lhs),
            "op": a.op,
            "rhs": term_to_json(a.rhs),
        }
    raise TypeError(f"not an atom: {a!r}")


def expr_to_json(e: BoolExpr) -> dict:
    if isinstance(e, AtomExpr):
        return {"kind": "atom", "atom": atom_to_json(e.atom)}
    if isinstance(e, FragmentRef):
        return {"kind": "ref", "name": e.name}
    if isinstance(e, Not):
        return {"kind": "not", "operand": expr_to_json(e.operand)}
    if isinstance(e, And):
        return {"kind": "and", "operands": [expr_to_json(op) for op in e.operands]}
    if isinstance(e, Or):
        return {"kind": "or", "operands": [expr_to_json(op) for op in e.operands]}
    if isinstance(e, Implies):
        return {
            "kind": "implies",
            "left": expr_to_json(e.left),
            "right": expr_to_json(e.right),
        }
    raise TypeError(f"not an expression: {e!r}")


def scope_to_json(s: Scope) -> dict:
    out: dict = {"kind": s.kind.value}
    if s.mode is not None:
        out["mode"] = s.mode.text
    return out


def timing_to_json(t: Timing) -> dict:
    out: dict = {"kind": t.kind.value}
    if t.expr is not None:
        out["expr"] = expr_to_json(t.expr)
    if t.bound is not None:
        out["bound"] = t.bound
    return out


def clause_to_json(c: ConditionClause) -> dict:
    return {"keyword": c.keyword.value, "expr": expr_to_json(c.expr)}


def requirement_to_json(r: Requirement) -> dict:
    return {
        "id": r.id,
        "parent": r.parent,
        "scope": scope_to_json(r.scope),
        "conditions": [clause_to_json(c) for c in r.conditions],
        "uses": list(r.uses),
        "component": r.component.text,
        "timing": timing_to_json(r.timing),
        "response": expr_to_json(r.response),
        "comments": list(r.comments),
    }


def fragment_to_json(f: Fragment) -> dict:
    return {
        "name": f.name,
        "scope": scope_to_json(f.scope),
        "conditions": [clause_to_json(c) for c in f.conditions],
        "uses": list(f.uses),
        "timing": timing_to_json(f.timing),
        "response": expr_to_json(f.response) if f.response is not None else None,
        "comments": list(f.comments),
    }


def set_to_json(s: RequirementSet) -> dict:
    return {
        "fragments": [fragment_to_json(f) for f in s.fragments.values()],
        "requirements": [requirement_to_json(r) for r in s.requirements.values()],
    }
