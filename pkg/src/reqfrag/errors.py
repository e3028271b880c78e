"""Domain errors raised by the reqfrag library.

Every error that corresponds to a user-visible problem (bad input text,
unresolvable references, refactoring conflicts) derives from ReqfragError so
the CLI can catch one type and map it to exit code 1.
"""
from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .model import SourceSpan


class ReqfragError(Exception):
    """Base class for all domain errors."""


class ParseError(ReqfragError):
    def __init__(self, message: str, span: "SourceSpan | None" = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        if self.span is None:
            return self.message
        return f"{self.span}: {self.message}"


class UnknownFragment(ReqfragError):
    def __init__(self, name: str, span: "SourceSpan | None" = None):
        super().__init__(f"unknown fragment '@{name}'")
        self.name = name
        self.span = span

    def __str__(self) -> str:
        base = f"unknown fragment '@{self.name}'"
        return f"{self.span}: {base}" if self.span is not None else base


class UnknownRequirement(ReqfragError):
    def __init__(self, requirement_id: str):
        super().__init__(f"unknown requirement '{requirement_id}'")
        self.requirement_id = requirement_id


class CyclicFragment(ReqfragError):
    def __init__(self, cycle: tuple[str, ...]):
        super().__init__("cyclic fragment reference: " + " -> ".join(cycle))
        self.cycle = cycle


class DuplicateId(ReqfragError):
    def __init__(self, name: str, span: "SourceSpan | None" = None):
        super().__init__(f"duplicate declaration '{name}'")
        self.name = name
        self.span = span


class NameCollision(ReqfragError):
    def __init__(self, name: str, reason: str):
        super().__init__(f"name collision on '{name}': {reason}")
        self.name = name
        self.reason = reason


class MissingAtom(ReqfragError):
    def __init__(self, atom_text: str):
        super().__init__(f"trace does not cover atom '{atom_text}'")
        self.atom_text = atom_text


class UnsupportedScope(ReqfragError):
    def __init__(self, detail: str):
        super().__init__(detail)


class FragmentNotConditionOnly(ReqfragError):
    def __init__(self, name: str, detail: str):
        super().__init__(f"fragment '{name}' referenced inline must be condition-only: {detail}")
        self.name = name
        self.detail = detail


class MergeConflict(ReqfragError):
    """Two or more template contributors fight over a single-valued field."""

    field_name = "field"

    def __init__(self, sources: tuple[str, ...], context: str):
        super().__init__(
            f"{self.field_name} conflict in '{context}': "
            + ", ".join(sources)
            + " all contribute a non-default "
            + self.field_name
        )
        self.sources = sources
        self.context = context


class TimingConflict(MergeConflict):
    field_name = "timing"


class ScopeConflict(MergeConflict):
    field_name = "scope"


class NoMatch(ReqfragError):
    def __init__(self, requirement_id: str, part: str):
        super().__init__(f"no match in '{requirement_id}' for {part}")
        self.requirement_id = requirement_id
        self.part = part


class AtomBudgetExceeded(ReqfragError):
    def __init__(self, atom_count: int, budget: int):
        super().__init__(
            f"{atom_count} atoms exceed the exhaustive-enumeration budget of {budget}"
        )
        self.atom_count = atom_count
        self.budget = budget


class IdMismatch(ReqfragError):
    def __init__(self, only_before: tuple[str, ...], only_after: tuple[str, ...]):
        parts = []
        if only_before:
            parts.append("only in before: " + ", ".join(only_before))
        if only_after:
            parts.append("only in after: " + ", ".join(only_after))
        super().__init__("requirement ids differ; " + "; ".join(parts))
        self.only_before = only_before
        self.only_after = only_after
