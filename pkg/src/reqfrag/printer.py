"""Canonical pretty-printer for requirement sets.

The output is the normative `.fret` layout: fragments first, then
requirements, each preceded by its attached comments, bodies indented two
spaces, one blank line between declarations, LF endings, trailing newline.
``parse(print_set(s))`` reconstructs s and printing is a fixed point.
"""
from __future__ import annotations

from .canon import group_text
from .model import (
    Fragment,
    Requirement,
    RequirementSet,
    Scope,
    Timing,
    TimingKind,
)

_INDENT = "  "


def scope_text(scope: Scope) -> str | None:
    if scope.is_global:
        return None
    return f"{scope.kind.value} {scope.mode.text}"  # type: ignore[union-attr]


def timing_text(timing: Timing) -> str | None:
    kind = timing.kind
    if kind is TimingKind.DEFAULT:
        return None
    if kind is TimingKind.UNTIL:
        return f"until ({group_text(timing.expr)})"  # type: ignore[arg-type]
    if kind in (TimingKind.WITHIN, TimingKind.FOR):
        return f"{kind.value} {timing.bound} ticks"
    return kind.value


def _body_items(item: Requirement | Fragment) -> list[str]:
    lines: list[str] = []
    scope = scope_text(item.scope)
    if scope is not None:
        lines.append(scope)
    for clause in item.conditions:
        lines.append(f"{clause.keyword.value} ({group_text(clause.expr)})")
    for name in item.uses:
        lines.append(f"@{name}")
    return lines


def print_requirement(req: Requirement) -> str:
    lines = [_comment_line(c) for c in req.comments]
    header = f"requirement {req.id}"
    if req.parent is not None:
        header += f" parent {req.parent}"
    lines.append(header + " {")
    for item in _body_items(req):
        lines.append(_INDENT + item)
    shall = f"{req.component.text} shall"
    timing = timing_text(req.timing)
    if timing is not None:
        shall += f" {timing}"
    shall += f" satisfy ({group_text(req.response)})"
    lines.append(_INDENT + shall)
    lines.append("}")
    return "\n".join(lines)


def print_fragment(frag: Fragment) -> str:
    lines = [_comment_line(c) for c in frag.comments]
    lines.append(f"fragment {frag.name} {{")
    for item in _body_items(frag):
        lines.append(_INDENT + item)
    timing = timing_text(frag.timing)
    if timing is not None:
        lines.append(_INDENT + timing)
    if frag.response is not None:
        lines.append(_INDENT + f"satisfy ({group_text(frag.response)})")
    lines.append("}")
    return "\n".join(lines)


def _comment_line(text: str) -> str:
    return f"#{text}".rstrip()


def print_set(s: RequirementSet) -> str:
    blocks = [print_fragment(f) for f in s.fragments.values()]
    blocks.extend(print_requirement(r) for r in s.requirements.values())
    return "\n\n".join(blocks) + "\n" if blocks else ""
