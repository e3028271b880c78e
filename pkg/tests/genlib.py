"""Seeded random generators shared by the property-style test suites.

Everything takes an explicit random.Random so failures reproduce exactly.
"""
from __future__ import annotations

import random

from reqfrag.errors import ReqfragError
from reqfrag.model import (
    And,
    Atom,
    AtomExpr,
    BoolExpr,
    CallTerm,
    Comparison,
    ConditionClause,
    Fragment,
    GLOBAL_SCOPE,
    DEFAULT_TIMING,
    Ident,
    Implies,
    Keyword,
    NameTerm,
    Not,
    NumberTerm,
    Or,
    Requirement,
    RequirementSet,
    Scope,
    ScopeKind,
    Timing,
    TimingKind,
    build_set,
)
from reqfrag.refactor import ExtractionSpec, extract_fragment
from reqfrag.semantics import Trace

_IDENT_NAMES = [
    "engaged", "stable", "armed", "cooling", "holding",
    "primed", "venting", "sync", "manual", "backup",
]
_TERM_NAMES = ["level", "rate", "margin", "load", "cap", "drift"]


def gen_atom_pool(rng: random.Random, count: int) -> list[Atom]:
    """Distinct atoms: identifiers with the occasional opaque comparison."""
    atoms: list[Atom] = []
    names = rng.sample(_IDENT_NAMES, min(count, len(_IDENT_NAMES)))
    for i in range(count):
        if i < len(names) and rng.random() < 0.7:
            atoms.append(Ident(names[i]))
        else:
            lhs = rng.choice(
                [
                    NameTerm(rng.choice(_TERM_NAMES)),
                    CallTerm(rng.choice(_TERM_NAMES), (NameTerm("x"),)),
                ]
            )
            op = rng.choice(["<", "<=", ">", ">=", "=", "!="])
            rhs = rng.choice(
                [NumberTerm(str(rng.randint(0, 9))), NameTerm(rng.choice(_TERM_NAMES))]
            )
            atom = Comparison(lhs, op, rhs)
            if any(a.text == atom.text for a in atoms):
                atom = Comparison(lhs, op, NumberTerm(str(10 + i)))
            atoms.append(atom)
    # drop accidental duplicates while keeping order
    seen: set[str] = set()
    unique = [a for a in atoms if not (a.text in seen or seen.add(a.text))]
    while len(unique) < count:
        filler = Ident(f"aux{len(unique)}")
        if filler.text not in seen:
            seen.add(filler.text)
            unique.append(filler)
    return unique[:count]


def gen_expr(rng: random.Random, atoms: list[Atom], depth: int = 3) -> BoolExpr:
    if depth <= 0 or rng.random() < 0.4:
        return AtomExpr(rng.choice(atoms))
    roll = rng.random()
    if roll < 0.2:
        return Not(gen_expr(rng, atoms, depth - 1))
    if roll < 0.55:
        n = rng.randint(2, 3)
        return And(tuple(gen_expr(rng, atoms, depth - 1) for _ in range(n)))
    if roll < 0.9:
        n = rng.randint(2, 3)
        return Or(tuple(gen_expr(rng, atoms, depth - 1) for _ in range(n)))
    return Implies(gen_expr(rng, atoms, depth - 1), gen_expr(rng, atoms, depth - 1))


def gen_timing(rng: random.Random, atoms: list[Atom], allow_default: bool = True) -> Timing:
    kinds = [
        TimingKind.ALWAYS,
        TimingKind.IMMEDIATELY,
        TimingKind.NEVER,
        TimingKind.EVENTUALLY,
        TimingKind.UNTIL,
        TimingKind.WITHIN,
        TimingKind.FOR,
    ]
    if allow_default:
        kinds = [TimingKind.DEFAULT, TimingKind.DEFAULT] + kinds
    kind = rng.choice(kinds)
    if kind is TimingKind.UNTIL:
        return Timing(TimingKind.UNTIL, expr=gen_expr(rng, atoms, 1))
    if kind in (TimingKind.WITHIN, TimingKind.FOR):
        return Timing(kind, bound=rng.randint(1, 3))
    return Timing(kind)


def gen_scope(rng: random.Random, atoms: list[Atom], global_only: bool = False) -> Scope:
    idents = [a for a in atoms if isinstance(a, Ident)]
    if global_only or not idents or rng.random() < 0.7:
        return GLOBAL_SCOPE
    kind = rng.choice([ScopeKind.IN, ScopeKind.BEFORE, ScopeKind.AFTER])
    return Scope(kind, rng.choice(idents))


def gen_requirement(
    rng: random.Random,
    rid: str,
    atoms: list[Atom],
    global_only: bool = False,
    clause_pool: list[BoolExpr] | None = None,
) -> Requirement:
    conditions = []
    for _ in range(rng.randint(0, 2)):
        if clause_pool and rng.random() < 0.7:
            expr = rng.choice(clause_pool)
        else:
            expr = gen_expr(rng, atoms, 2)
        keyword = rng.choice([Keyword.WHEN, Keyword.IF])
        conditions.append(ConditionClause(keyword, expr))
    return Requirement(
        id=rid,
        scope=gen_scope(rng, atoms, global_only),
        conditions=tuple(conditions),
        component=Ident("Controller"),
        timing=gen_timing(rng, atoms),
        response=gen_expr(rng, atoms, 2),
    )


def gen_set(
    rng: random.Random,
    n_requirements: int,
    atom_count: int = 6,
    atoms_per_requirement: int = 3,
) -> RequirementSet:
    """A fragment-free set whose requirements share clause material, so
    duplicate mining and extraction have something to find."""
    pool = gen_atom_pool(rng, atom_count)
    shared_atoms = rng.sample(pool, min(atoms_per_requirement, len(pool)))
    clause_pool = [gen_expr(rng, shared_atoms, 2) for _ in range(2)]
    requirements = []
    for i in range(n_requirements):
        local = rng.sample(pool, min(atoms_per_requirement, len(pool)))
        requirements.append(
            gen_requirement(rng, f"Q{i + 1}", local, clause_pool=clause_pool)
        )
    return build_set(requirements)


def gen_trace(rng: random.Random, atoms: list[Atom], max_len: int) -> Trace:
    length = rng.randint(1, max_len)
    steps = tuple(
        tuple(rng.random() < 0.5 for _ in atoms) for _ in range(length)
    )
    return Trace(tuple(atoms), steps)


# ---------------------------------------------------------------------------
# Random applicable extractions


def applicable_targets(s: RequirementSet, body: Fragment) -> list[str]:
    """Requirement ids the body extracts from cleanly (probed one by one)."""
    ids = []
    for rid in s.requirements:
        try:
            extract_fragment(s, ExtractionSpec("probeFx", body, (rid,)))
        except ReqfragError:
            continue
        ids.append(rid)
    return ids


def gen_extraction(
    rng: random.Random, s: RequirementSet, name: str
) -> ExtractionSpec | None:
    """A randomly chosen extraction that is applicable to at least one
    requirement of s, or None when ten attempts found nothing."""
    reqs = [r for r in s.requirements.values() if r.conditions]
    if not reqs:
        return None
    for _ in range(10):
        req = rng.choice(reqs)
        clause = rng.choice(req.conditions)
        style = rng.random()
        if style < 0.4:
            # a subexpression of one clause (possibly the whole expression)
            candidates = _subexprs(clause.expr)
            body = Fragment(
                name=name, conditions=(ConditionClause(Keyword.IF, rng.choice(candidates)),)
            )
        elif style < 0.75 or req.timing.is_default:
            # the whole clause
            body = Fragment(name=name, conditions=(clause,))
        else:
            # cross-field: clause plus the requirement's timing
            body = Fragment(name=name, conditions=(clause,), timing=req.timing)
        targets = applicable_targets(s, body)
        if targets:
            return ExtractionSpec(name, body, tuple(targets))
    return None


def _subexprs(e: BoolExpr) -> list[BoolExpr]:
    from reqfrag.model import iter_subexprs

    return [sub for sub in iter_subexprs(e) if not isinstance(sub, AtomExpr)] or [e]


# ---------------------------------------------------------------------------
# Semantics-changing mutations


def mutate_requirement(rng: random.Random, req: Requirement) -> Requirement:
    """Return a mutated copy that usually differs semantically."""
    from dataclasses import replace

    choice = rng.randrange(4)
    if choice == 0:
        new_kind = (
            TimingKind.EVENTUALLY
            if req.timing.kind in (TimingKind.DEFAULT, TimingKind.ALWAYS)
            else TimingKind.ALWAYS
        )
        return replace(req, timing=Timing(new_kind))
    if choice == 1:
        return replace(req, response=Not(req.response))
    if choice == 2 and req.conditions:
        clause = req.conditions[0]
        flipped = replace(clause, expr=Not(clause.expr))
        return replace(req, conditions=(flipped,) + req.conditions[1:])
    return replace(req, timing=Timing(TimingKind.NEVER))
