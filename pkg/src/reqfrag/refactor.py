"""Extract Fragment, Inline Fragment, and the template-combination rule.

Combining a requirement with the fragments it references takes the union of
the scope, condition, and timing fields: conditions concatenate (they are a
conjunction), while scope and timing are single-valued, so two contributors
both supplying a non-default value is a hard conflict, never summed or
prioritized. Inline ``@name`` references inside expressions stand for the
referenced fragment's condition conjunction and are substituted in place.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .canon import expr_text, normalize, scope_key, timing_key
from .errors import (
    FragmentNotConditionOnly,
    NameCollision,
    NoMatch,
    ScopeConflict,
    TimingConflict,
)
from .model import (
    And,
    BoolExpr,
    ConditionClause,
    Fragment,
    FragmentRef,
    GLOBAL_SCOPE,
    DEFAULT_TIMING,
    Implies,
    Not,
    Or,
    Requirement,
    RequirementSet,
    Scope,
    Timing,
    TimingKind,
    conjoin,
    validate_set,
)


@dataclass(frozen=True)
class ExtractionSpec:
    """A fragment body to pull out of the given target requirements."""

    fragment_name: str
    body: Fragment
    targets: tuple[str, ...]

    def __post_init__(self):
        b = self.body
        if not (
            b.conditions
            or b.uses
            or not b.timing.is_default
            or not b.scope.is_global
            or b.response is not None
        ):
            raise ValueError("extraction body must not be empty")


# ---------------------------------------------------------------------------
# Inline substitution


def _condition_conjunction(s: RequirementSet, name: str) -> BoolExpr:
    """Fully inlined conjunction of a condition-only fragment's clauses."""
    frag = s.fragment(name)
    exprs = [substitute_refs(c.expr, s) for c in frag.conditions]
    exprs.extend(_condition_conjunction(s, used) for used in frag.uses)
    combined = conjoin(exprs)
    if combined is None:
        raise FragmentNotConditionOnly(name, "it has no condition clauses to substitute")
    return combined


def substitute_refs(e: BoolExpr, s: RequirementSet) -> BoolExpr:
    """Replace every inline fragment reference by its condition conjunction."""
    if isinstance(e, FragmentRef):
        return _condition_conjunction(s, e.name)
    if isinstance(e, Not):
        inner = substitute_refs(e.operand, s)
        return e if inner is e.operand else Not(inner)
    if isinstance(e, (And, Or)):
        ops = tuple(substitute_refs(op, s) for op in e.operands)
        if all(a is b for a, b in zip(ops, e.operands)):
            return e
        return And(ops) if isinstance(e, And) else Or(ops)
    if isinstance(e, Implies):
        left = substitute_refs(e.left, s)
        right = substitute_refs(e.right, s)
        if left is e.left and right is e.right:
            return e
        return Implies(left, right)
    return e


# ---------------------------------------------------------------------------
# Template combination


def _transitive_uses(req: Requirement, s: RequirementSet) -> list[Fragment]:
    """Fragments pulled in through `uses`, depth-first, each at most once."""
    out: list[Fragment] = []
    seen: set[str] = set()

    def visit(names: tuple[str, ...]) -> None:
        for name in names:
            if name in seen:
                continue
            seen.add(name)
            frag = s.fragment(name)
            out.append(frag)
            visit(frag.uses)

    visit(req.uses)
    return out


def combine_templates(req: Requirement, s: RequirementSet) -> Requirement:
    """Fold every referenced fragment into req, yielding a self-contained
    requirement with no fragment references."""
    frags = _transitive_uses(req, s)

    scope_sources = [(req.id, req.scope)] if not req.scope.is_global else []
    scope_sources += [(f.name, f.scope) for f in frags if not f.scope.is_global]
    if len(scope_sources) > 1:
        raise ScopeConflict(tuple(name for name, _ in scope_sources), req.id)
    scope: Scope = scope_sources[0][1] if scope_sources else GLOBAL_SCOPE

    timing_sources = [(req.id, req.timing)] if not req.timing.is_default else []
    timing_sources += [(f.name, f.timing) for f in frags if not f.timing.is_default]
    if len(timing_sources) > 1:
        raise TimingConflict(tuple(name for name, _ in timing_sources), req.id)
    timing: Timing = timing_sources[0][1] if timing_sources else DEFAULT_TIMING
    if timing.kind is TimingKind.UNTIL:
        timing = Timing(TimingKind.UNTIL, expr=substitute_refs(timing.expr, s))  # type: ignore[arg-type]

    conditions: list[ConditionClause] = []
    for clause in req.conditions:
        conditions.append(replace(clause, expr=substitute_refs(clause.expr, s)))
    for frag in frags:
        for clause in frag.conditions:
            conditions.append(replace(clause, expr=substitute_refs(clause.expr, s)))

    responses = [substitute_refs(req.response, s)]
    responses.extend(
        substitute_refs(f.response, s) for f in frags if f.response is not None
    )
    response = responses[0] if len(responses) == 1 else And(tuple(responses))

    return Requirement(
        id=req.id,
        parent=req.parent,
        scope=scope,
        conditions=tuple(conditions),
        uses=(),
        component=req.component,
        timing=timing,
        response=response,
        comments=req.comments,
        span=req.span,
    )


def inline_all(s: RequirementSet) -> RequirementSet:
    """Recombine every requirement with its fragments and drop the fragments."""
    inlined = {rid: combine_templates(req, s) for rid, req in s.requirements.items()}
    result = RequirementSet(inlined, {})
    validate_set(result)
    return result


# ---------------------------------------------------------------------------
# Extraction


def extract_fragment(s: RequirementSet, spec: ExtractionSpec) -> RequirementSet:
    """Add spec.body as a fragment and replace its material in each target
    with a reference. Non-target requirements are returned untouched."""
    name = spec.fragment_name
    if name in s.fragments or name in s.requirements:
        raise NameCollision(name, "a declaration with this name already exists")
    for target in spec.targets:
        s.requirement(target)  # raises UnknownRequirement

    body = replace(spec.body, name=name)
    new_requirements = dict(s.requirements)
    for target in spec.targets:
        new_requirements[target] = _rewrite_target(s.requirements[target], body, name)
    new_fragments = dict(s.fragments)
    new_fragments[name] = body
    result = RequirementSet(new_requirements, new_fragments)
    validate_set(result)
    return result


def _rewrite_target(req: Requirement, body: Fragment, name: str) -> Requirement:
    condition_only = body.is_condition_only and not body.uses
    try:
        return _whole_rewrite(req, body, name)
    except NoMatch:
        if condition_only and len(body.conditions) == 1:
            return _subexpr_rewrite(req, body.conditions[0].expr, name)
        raise


def _whole_rewrite(req: Requirement, body: Fragment, name: str) -> Requirement:
    """Match every body part wholesale and replace it with a uses entry."""
    remaining = list(req.conditions)
    for bc in body.conditions:
        key = (bc.keyword, expr_text(normalize(bc.expr)))
        for i, clause in enumerate(remaining):
            if (clause.keyword, expr_text(normalize(clause.expr))) == key:
                del remaining[i]
                break
        else:
            raise NoMatch(req.id, f"condition clause `{bc.keyword.value} ({key[1]})`")

    timing = req.timing
    if not body.timing.is_default:
        if timing_key(req.timing) != timing_key(body.timing):
            raise NoMatch(req.id, f"timing `{body.timing.kind.value}`")
        timing = DEFAULT_TIMING

    scope = req.scope
    if not body.scope.is_global:
        if scope_key(req.scope) != scope_key(body.scope):
            raise NoMatch(req.id, f"scope `{body.scope.kind.value}`")
        scope = GLOBAL_SCOPE

    response = req.response
    if body.response is not None:
        response = _remove_response_conjunct(req, body.response)

    return replace(
        req,
        scope=scope,
        conditions=tuple(remaining),
        uses=req.uses + (name,),
        timing=timing,
        response=response,
    )


def _remove_response_conjunct(req: Requirement, pattern: BoolExpr) -> BoolExpr:
    """Drop the matched conjunct from the response; something must remain,
    because a requirement cannot stand without a response of its own."""
    pattern_key = expr_text(normalize(pattern))
    if expr_text(normalize(req.response)) == pattern_key:
        raise NoMatch(
            req.id, f"response `{pattern_key}` (extracting it would leave no response)"
        )
    if isinstance(req.response, And):
        kept = [
            op
            for op in req.response.operands
            if expr_text(normalize(op)) != pattern_key
        ]
        if len(kept) == len(req.response.operands):
            raise NoMatch(req.id, f"response conjunct `{pattern_key}`")
        if not kept:
            raise NoMatch(
                req.id,
                f"response `{pattern_key}` (extracting it would leave no response)",
            )
        return kept[0] if len(kept) == 1 else And(tuple(kept))
    raise NoMatch(req.id, f"response conjunct `{pattern_key}`")


def _subexpr_rewrite(req: Requirement, pattern: BoolExpr, name: str) -> Requirement:
    """Replace every occurrence of the pattern inside the target's condition
    expressions with an inline reference."""
    pattern_norm = normalize(pattern)
    pattern_key = expr_text(pattern_norm)
    new_clauses: list[ConditionClause] = []
    total = 0
    for clause in req.conditions:
        new_expr, count = _replace_in_expr(clause.expr, pattern_norm, pattern_key, name)
        total += count
        new_clauses.append(replace(clause, expr=new_expr) if count else clause)
    if total == 0:
        raise NoMatch(req.id, f"condition subexpression `{pattern_key}`")
    return replace(req, conditions=tuple(new_clauses))


def _replace_in_expr(
    e: BoolExpr, pattern_norm: BoolExpr, pattern_key: str, name: str
) -> tuple[BoolExpr, int]:
    if expr_text(normalize(e)) == pattern_key:
        return FragmentRef(name), 1
    if isinstance(e, Not):
        inner, count = _replace_in_expr(e.operand, pattern_norm, pattern_key, name)
        return (Not(inner) if count else e), count
    if isinstance(e, And) and isinstance(pattern_norm, And):
        # conjunct-subset match: the pattern's operands all occur among ours
        op_keys = [expr_text(normalize(op)) for op in e.operands]
        wanted = {expr_text(op) for op in pattern_norm.operands}
        if wanted <= set(op_keys):
            kept: list[BoolExpr] = []
            count = 1
            inserted = False
            for op, key in zip(e.operands, op_keys):
                if key in wanted:
                    if not inserted:
                        kept.append(FragmentRef(name))
                        inserted = True
                    continue
                sub, c = _replace_in_expr(op, pattern_norm, pattern_key, name)
                count += c
                kept.append(sub)
            return (kept[0] if len(kept) == 1 else And(tuple(kept))), count
    if isinstance(e, (And, Or)):
        ops: list[BoolExpr] = []
        count = 0
        for op in e.operands:
            sub, c = _replace_in_expr(op, pattern_norm, pattern_key, name)
            count += c
            ops.append(sub)
        if count == 0:
            return e, 0
        ctor = And if isinstance(e, And) else Or
        return ctor(tuple(ops)), count
    if isinstance(e, Implies):
        left, cl = _replace_in_expr(e.left, pattern_norm, pattern_key, name)
        right, cr = _replace_in_expr(e.right, pattern_norm, pattern_key, name)
        if cl or cr:
            return Implies(left, right), cl + cr
        return e, 0
    return e, 0
