"""Duplicate-fragment mining, dependency graph, and change-impact analysis.

``find_duplicates`` works in three phases:

1. every requirement contributes items: each whole condition clause, every
   subtree of its normalized condition expressions, and its timing (when not
   the default); response subtrees join only on request. Support is the set
   of requirements containing an item.
2. items sharing an identical support set merge into one multi-part
   candidate, which is how a clause that always travels with a timing
   constraint surfaces as a single cross-field candidate.
3. within a candidate, parts subsumed by other parts (an expression nested
   in a bigger shared expression, or duplicating a shared clause) are
   dropped, and candidates consisting of nothing but lone identifier atoms
   need support of at least 4 to be reported.

Candidates sort by support size, then part size, then text, so the callers
and the batch extractor see the biggest wins first.
"""
from __future__ import annotations

from dataclasses import dataclass

from .canon import expr_text, group_text, normalize, normalize_timing
from .errors import ReqfragError
from .model import (
    AtomExpr,
    BoolExpr,
    ConditionClause,
    Fragment,
    FragmentRef,
    GLOBAL_SCOPE,
    DEFAULT_TIMING,
    Ident,
    Keyword,
    RequirementSet,
    Timing,
    conjoin,
    iter_subexprs,
    referenced_fragments,
)
from .printer import timing_text
from .refactor import ExtractionSpec, extract_fragment

_KIND_ORDER = {"clause": 0, "expr": 1, "timing": 2, "response": 3}


@dataclass(frozen=True)
class DupPart:
    """One shared piece: a whole clause, an expression, or a timing."""

    kind: str  # "clause" | "expr" | "timing" | "response"
    keyword: Keyword | None = None
    expr: BoolExpr | None = None  # stored normalized
    timing: Timing | None = None  # stored normalized

    @property
    def text(self) -> str:
        if self.kind == "clause":
            return f"{self.keyword.value} ({group_text(self.expr)})"  # type: ignore[union-attr,arg-type]
        if self.kind == "expr":
            return expr_text(self.expr)  # type: ignore[arg-type]
        if self.kind == "timing":
            return timing_text(self.timing)  # type: ignore[arg-type,return-value]
        return f"satisfy ({group_text(self.expr)})"  # type: ignore[arg-type]

    @property
    def size(self) -> int:
        if self.kind == "timing":
            expr = self.timing.expr if self.timing is not None else None
            return 1 + (_expr_size(expr) if expr is not None else 0)
        return _expr_size(self.expr)  # type: ignore[arg-type]

    def key(self) -> tuple:
        return (self.kind, self.keyword.value if self.keyword else None, self.text)


def _expr_size(e: BoolExpr) -> int:
    return sum(1 for _ in iter_subexprs(e))


@dataclass(frozen=True)
class DupCandidate:
    parts: tuple[DupPart, ...]
    support: tuple[str, ...]  # requirement ids in declaration order
    size: int

    @property
    def text(self) -> str:
        return "; ".join(p.text for p in self.parts)


def find_duplicates(
    s: RequirementSet, min_support: int = 2, include_responses: bool = False
) -> list[DupCandidate]:
    order = {rid: i for i, rid in enumerate(s.requirements)}
    supports: dict[tuple, set[str]] = {}
    parts: dict[tuple, DupPart] = {}

    def add(rid: str, part: DupPart) -> None:
        key = part.key()
        parts.setdefault(key, part)
        supports.setdefault(key, set()).add(rid)

    for rid, req in s.requirements.items():
        for clause in req.conditions:
            norm = normalize(clause.expr)
            add(rid, DupPart("clause", keyword=clause.keyword, expr=norm))
            for sub in iter_subexprs(norm):
                add(rid, DupPart("expr", expr=sub))
        if not req.timing.is_default:
            add(rid, DupPart("timing", timing=normalize_timing(req.timing)))
        if include_responses:
            for sub in iter_subexprs(normalize(req.response)):
                add(rid, DupPart("response", expr=sub))

    groups: dict[frozenset, list[DupPart]] = {}
    for key, ids in supports.items():
        if len(ids) >= min_support:
            groups.setdefault(frozenset(ids), []).append(parts[key])

    candidates = []
    for ids, group in groups.items():
        kept = _prune_parts(group)
        if not kept:
            continue
        if len(ids) < 4 and all(_is_lone_leaf(p) for p in kept):
            continue
        support = tuple(sorted(ids, key=order.__getitem__))
        candidates.append(
            DupCandidate(tuple(kept), support, sum(p.size for p in kept))
        )

    candidates.sort(key=lambda c: (-len(c.support), -c.size, c.text))
    return candidates


def _prune_parts(group: list[DupPart]) -> list[DupPart]:
    """Drop parts contained in other parts of the same candidate.

    An expression equal to a shared whole clause is redundant next to that
    clause; among what remains, anything nested inside a bigger surviving
    expression is likewise redundant.
    """
    clause_exprs = {expr_text(p.expr) for p in group if p.kind == "clause"}  # type: ignore[arg-type]
    survivors = []
    for p in group:
        if p.kind == "expr" and expr_text(p.expr) in clause_exprs:  # type: ignore[arg-type]
            continue
        survivors.append(p)

    nested: set[str] = set()
    for p in survivors:
        if p.kind in ("expr", "response"):
            for sub in iter_subexprs(p.expr):  # type: ignore[arg-type]
                if sub is not p.expr:
                    nested.add(expr_text(sub))

    kept = [
        p
        for p in survivors
        if not (p.kind in ("expr", "response") and expr_text(p.expr) in nested)  # type: ignore[arg-type]
    ]
    kept.sort(key=lambda p: (_KIND_ORDER[p.kind], p.text))
    return kept


def _is_lone_leaf(p: DupPart) -> bool:
    if p.kind not in ("expr", "response"):
        return False
    e = p.expr
    if isinstance(e, FragmentRef):
        return True
    return isinstance(e, AtomExpr) and isinstance(e.atom, Ident)


# ---------------------------------------------------------------------------
# Dependency graph


@dataclass(frozen=True)
class DependencyGraph:
    requirement_ids: tuple[str, ...]
    fragment_names: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]  # (dependent, fragment)


def dependency_graph(s: RequirementSet) -> DependencyGraph:
    edges: list[tuple[str, str]] = []
    for rid, req in s.requirements.items():
        edges.extend((rid, f) for f in referenced_fragments(req))
    for name, frag in s.fragments.items():
        edges.extend((name, f) for f in referenced_fragments(frag))
    return DependencyGraph(
        tuple(s.requirements), tuple(s.fragments), tuple(edges)
    )


def to_dot(g: DependencyGraph) -> str:
    lines = ["digraph dependencies {", "  node [shape=box];"]
    for rid in g.requirement_ids:
        lines.append(f'  "{rid}";')
    for name in g.fragment_names:
        lines.append(f'  "{name}" [style=filled, fillcolor=lightgrey];')
    for src, dst in g.edges:
        lines.append(f'  "{src}" -> "{dst}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def impact(s: RequirementSet, fragment_name: str) -> list[str]:
    """Requirements that transitively depend on the fragment, in declaration
    order."""
    s.fragment(fragment_name)  # raises UnknownFragment
    reaches: dict[str, bool] = {}

    def fragment_reaches(name: str) -> bool:
        if name == fragment_name:
            return True
        if name in reaches:
            return reaches[name]
        reaches[name] = False  # cycle guard; sets are validated acyclic anyway
        result = any(
            fragment_reaches(dep)
            for dep in referenced_fragments(s.fragments[name])
            if dep in s.fragments
        )
        reaches[name] = result
        return result

    return [
        rid
        for rid, req in s.requirements.items()
        if any(fragment_reaches(f) for f in referenced_fragments(req))
    ]


# ---------------------------------------------------------------------------
# Candidate application


def extraction_from_candidate(
    candidate: DupCandidate, name: str
) -> ExtractionSpec | None:
    """Shape a mined candidate into an extraction body, or None when nothing
    extractable remains (for instance subexpressions co-occurring with whole
    clauses that already cover them)."""
    clauses = [
        ConditionClause(p.keyword, p.expr)  # type: ignore[arg-type]
        for p in candidate.parts
        if p.kind == "clause"
    ]
    timing = DEFAULT_TIMING
    for p in candidate.parts:
        if p.kind == "timing":
            timing = p.timing  # type: ignore[assignment]
    response = conjoin(p.expr for p in candidate.parts if p.kind == "response")  # type: ignore[misc]

    clause_exprs: set[str] = set()
    for p in candidate.parts:
        if p.kind == "clause":
            clause_exprs.update(expr_text(sub) for sub in iter_subexprs(p.expr))  # type: ignore[arg-type]
    leftovers = [
        p.expr
        for p in candidate.parts
        if p.kind == "expr" and expr_text(p.expr) not in clause_exprs  # type: ignore[arg-type]
    ]
    if leftovers and not clauses and timing.is_default and response is None:
        combined = leftovers[0] if len(leftovers) == 1 else conjoin(leftovers)
        clauses = [ConditionClause(Keyword.IF, combined)]  # type: ignore[arg-type]

    if not clauses and timing.is_default and response is None:
        return None
    body = Fragment(
        name=name,
        scope=GLOBAL_SCOPE,
        conditions=tuple(clauses),
        timing=timing,
        response=response,
    )
    return ExtractionSpec(name, body, candidate.support)


def apply_duplicates(
    s: RequirementSet,
    candidates: list[DupCandidate],
    name_prefix: str = "frag",
) -> tuple[RequirementSet, list[str]]:
    """Extract candidates largest-first under generated names; candidates a
    previous extraction invalidated are skipped and logged, not fatal."""
    current = s
    log: list[str] = []
    for i, candidate in enumerate(candidates, start=1):
        name = f"{name_prefix}{i}"
        spec = extraction_from_candidate(candidate, name)
        if spec is None:
            log.append(f"skipped {name}: no extractable material ({candidate.text})")
            continue
        try:
            current = extract_fragment(current, spec)
        except ReqfragError as exc:
            log.append(f"skipped {name}: {exc}")
            continue
        log.append(
            f"extracted {name} ({candidate.text}) from {len(candidate.support)} requirements"
        )
    return current, log


def candidate_to_json(c: DupCandidate) -> dict:
    return {
        "parts": [
            {"kind": p.kind, "text": p.text}
            | ({"keyword": p.keyword.value} if p.keyword else {})
            for p in c.parts
        ],
        "support": list(c.support),
        "support_count": len(c.support),
        "size": c.size,
    }
