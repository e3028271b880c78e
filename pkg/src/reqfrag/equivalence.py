"""Bounded-trace equivalence checking with counterexample extraction.

Two requirements are compared by inlining both, taking the union of their
atoms, and evaluating them on finite traces. Exhaustive mode enumerates
every trace of every length 1..max_len: lengths ascending, and within one
length the per-tick assignments counted as base-2^|atoms| digits with tick 0
as the least significant digit and atom 0 as the least significant bit.
The first differing trace is therefore the minimal counterexample in this
documented order. Random mode samples trace lengths uniformly and ticks as
independent fair bits from a seeded generator, so runs reproduce exactly.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .errors import AtomBudgetExceeded, IdMismatch
from .model import Atom, Requirement, RequirementSet, requirement_atoms
from .refactor import combine_templates
from .semantics import Trace, evaluate


class EquivMode(Enum):
    EXHAUSTIVE = "exhaustive"
    RANDOM = "random"
    AUTO = "auto"  # exhaustive within the atom budget, random beyond it


@dataclass(frozen=True)
class EquivConfig:
    max_len: int = 4
    mode: EquivMode = EquivMode.AUTO
    samples: int = 100_000
    seed: int = 0
    max_atoms_exhaustive: int = 5

    def __post_init__(self):
        if self.max_len < 1:
            raise ValueError("max_len must be at least 1")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


@dataclass(frozen=True)
class BoundedEquivalent:
    traces_checked: int


@dataclass(frozen=True)
class NotEquivalent:
    witness: Trace
    left_value: bool
    right_value: bool


@dataclass(frozen=True)
class SampledConsistent:
    samples: int
    seed: int


Verdict = BoundedEquivalent | NotEquivalent | SampledConsistent


def atom_universe(left: Requirement, right: Requirement) -> tuple[Atom, ...]:
    """Union of both requirements' atoms in first-appearance order."""
    atoms: list[Atom] = []
    seen: set[str] = set()
    for req in (left, right):
        for a in requirement_atoms(req):
            if a.text not in seen:
                seen.add(a.text)
                atoms.append(a)
    return tuple(atoms)


def equivalent(
    left: Requirement,
    right: Requirement,
    s: RequirementSet,
    cfg: EquivConfig = EquivConfig(),
) -> Verdict:
    """Inline both requirements against s and compare them on bounded traces."""
    return equivalent_inlined(
        combine_templates(left, s), combine_templates(right, s), cfg
    )


def equivalent_inlined(
    left: Requirement, right: Requirement, cfg: EquivConfig = EquivConfig()
) -> Verdict:
    atoms = atom_universe(left, right)
    mode = cfg.mode
    if mode is EquivMode.AUTO:
        mode = (
            EquivMode.EXHAUSTIVE
            if len(atoms) <= cfg.max_atoms_exhaustive
            else EquivMode.RANDOM
        )
    if mode is EquivMode.EXHAUSTIVE:
        if len(atoms) > cfg.max_atoms_exhaustive:
            raise AtomBudgetExceeded(len(atoms), cfg.max_atoms_exhaustive)
        return _exhaustive(left, right, atoms, cfg)
    return _sampled(left, right, atoms, cfg)


def _assignment_rows(atom_count: int) -> list[tuple[bool, ...]]:
    base = 1 << atom_count
    return [
        tuple(bool((digit >> bit) & 1) for bit in range(atom_count))
        for digit in range(base)
    ]


def _exhaustive(
    left: Requirement, right: Requirement, atoms: tuple[Atom, ...], cfg: EquivConfig
) -> Verdict:
    rows = _assignment_rows(len(atoms))
    base = len(rows)
    checked = 0
    for length in range(1, cfg.max_len + 1):
        for counter in range(base**length):
            digits = []
            c = counter
            for _ in range(length):
                digits.append(rows[c % base])
                c //= base
            trace = Trace(atoms, tuple(digits))
            left_value = evaluate(left, trace, check_atoms=False)
            right_value = evaluate(right, trace, check_atoms=False)
            checked += 1
            if left_value != right_value:
                return NotEquivalent(trace, left_value, right_value)
    return BoundedEquivalent(checked)


def _sampled(
    left: Requirement, right: Requirement, atoms: tuple[Atom, ...], cfg: EquivConfig
) -> Verdict:
    rows = _assignment_rows(len(atoms))
    base = len(rows)
    rng = random.Random(cfg.seed)
    for _ in range(cfg.samples):
        length = rng.randint(1, cfg.max_len)
        trace = Trace(
            atoms, tuple(rows[rng.randrange(base)] for _ in range(length))
        )
        left_value = evaluate(left, trace, check_atoms=False)
        right_value = evaluate(right, trace, check_atoms=False)
        if left_value != right_value:
            return NotEquivalent(trace, left_value, right_value)
    return SampledConsistent(cfg.samples, cfg.seed)


# ---------------------------------------------------------------------------
# Whole-set refactoring check


@dataclass(frozen=True)
class RefactorReport:
    entries: tuple[tuple[str, Verdict], ...]

    @property
    def all_equivalent(self) -> bool:
        return not any(isinstance(v, NotEquivalent) for _, v in self.entries)

    @property
    def failures(self) -> tuple[str, ...]:
        return tuple(rid for rid, v in self.entries if isinstance(v, NotEquivalent))


def check_refactoring(
    before: RequirementSet, after: RequirementSet, cfg: EquivConfig = EquivConfig()
) -> RefactorReport:
    """Compare every requirement id across the two sets, each side inlined
    against its own fragments."""
    only_before = tuple(r for r in before.requirements if r not in after.requirements)
    only_after = tuple(r for r in after.requirements if r not in before.requirements)
    if only_before or only_after:
        raise IdMismatch(only_before, only_after)
    entries = []
    for rid, req in before.requirements.items():
        left = combine_templates(req, before)
        right = combine_templates(after.requirements[rid], after)
        entries.append((rid, equivalent_inlined(left, right, cfg)))
    return RefactorReport(tuple(entries))


# ---------------------------------------------------------------------------
# Rendering


def trace_to_json(trace: Trace) -> dict:
    return {
        "atoms": [a.text for a in trace.atoms],
        "steps": [list(row) for row in trace.steps],
    }


def verdict_to_json(v: Verdict) -> dict:
    if isinstance(v, BoundedEquivalent):
        return {"kind": "bounded_equivalent", "traces_checked": v.traces_checked}
    if isinstance(v, SampledConsistent):
        return {"kind": "sampled_consistent", "samples": v.samples, "seed": v.seed}
    return {
        "kind": "not_equivalent",
        "witness": trace_to_json(v.witness),
        "left_value": v.left_value,
        "right_value": v.right_value,
    }


def verdict_text(v: Verdict) -> str:
    if isinstance(v, BoundedEquivalent):
        return f"BoundedEquivalent (tracesChecked={v.traces_checked})"
    if isinstance(v, SampledConsistent):
        return f"SampledConsistent (samples={v.samples}, seed={v.seed})"
    return f"NotEquivalent (left={v.left_value}, right={v.right_value})"


def witness_text(trace: Trace) -> str:
    lines = []
    for i, atom in enumerate(trace.atoms):
        bits = ",".join("1" if row[i] else "0" for row in trace.steps)
        lines.append(f"  {atom.text} = {bits}")
    return "\n".join(lines)
