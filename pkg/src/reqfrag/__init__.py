"""reqfrag: structured requirements with reusable fragments.

Parse `.fret` requirement files, give requirements a finite-trace semantics,
refactor repeated material into callable fragments, and check that
refactorings preserve behaviour on bounded traces.
"""
from .analysis import (
    DependencyGraph,
    DupCandidate,
    apply_duplicates,
    dependency_graph,
    find_duplicates,
    impact,
    to_dot,
)
from .canon import canonical_hash, expr_text, normalize, requirement_key
from .equivalence import (
    BoundedEquivalent,
    EquivConfig,
    EquivMode,
    NotEquivalent,
    RefactorReport,
    SampledConsistent,
    check_refactoring,
    equivalent,
)
from .errors import ReqfragError
from .ltl import eval_ltl, formula_text, to_ltl
from .model import (
    Atom,
    BoolExpr,
    Comparison,
    ConditionClause,
    Fragment,
    Ident,
    Keyword,
    Requirement,
    RequirementSet,
    Scope,
    ScopeKind,
    Timing,
    TimingKind,
    build_set,
    validate_set,
)
from .parser import parse, parse_expr_text, parse_fragment_text
from .printer import print_requirement, print_set
from .refactor import (
    ExtractionSpec,
    combine_templates,
    extract_fragment,
    inline_all,
)
from .semantics import Trace, evaluate, obligation_holds, segments, triggers

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BoolExpr",
    "BoundedEquivalent",
    "Comparison",
    "ConditionClause",
    "DependencyGraph",
    "DupCandidate",
    "EquivConfig",
    "EquivMode",
    "ExtractionSpec",
    "Fragment",
    "Ident",
    "Keyword",
    "NotEquivalent",
    "RefactorReport",
    "ReqfragError",
    "Requirement",
    "RequirementSet",
    "SampledConsistent",
    "Scope",
    "ScopeKind",
    "Timing",
    "TimingKind",
    "Trace",
    "apply_duplicates",
    "build_set",
    "canonical_hash",
    "check_refactoring",
    "combine_templates",
    "dependency_graph",
    "equivalent",
    "eval_ltl",
    "evaluate",
    "expr_text",
    "extract_fragment",
    "find_duplicates",
    "formula_text",
    "impact",
    "inline_all",
    "normalize",
    "obligation_holds",
    "parse",
    "parse_expr_text",
    "parse_fragment_text",
    "print_requirement",
    "print_set",
    "requirement_key",
    "segments",
    "to_dot",
    "to_ltl",
    "triggers",
    "validate_set",
]
