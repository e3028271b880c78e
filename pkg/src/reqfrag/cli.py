"""Command-line interface.

Exit status: 0 success, 1 domain error (parse failure, lint finding, merge
conflict, inequivalence), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import analysis, equivalence, ltl, printer, refactor
from .errors import ReqfragError
from .model import RequirementSet, referenced_fragments, set_to_json
from .parser import parse, parse_fragment_text


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load(path: str) -> RequirementSet:
    return parse(_read(path), filename=path)


def _write_atomic(path: str, content: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".reqfrag-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2))


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_parse(args) -> int:
    s = _load(args.file)
    if args.json:
        _print_json(set_to_json(s))
    else:
        print(
            f"parsed {len(s.requirements)} requirements, "
            f"{len(s.fragments)} fragments"
        )
    return 0


def _cmd_fmt(args) -> int:
    formatted = printer.print_set(_load(args.file))
    if args.write:
        _write_atomic(args.file, formatted)
    else:
        sys.stdout.write(formatted)
    return 0


def _cmd_lint(args) -> int:
    try:
        s = _load(args.file)
    except ReqfragError as exc:
        print(f"{args.file}: {exc}")
        return 1
    findings = []
    for req in s.requirements.values():
        try:
            refactor.combine_templates(req, s)
        except ReqfragError as exc:
            findings.append(str(exc))
    for line in findings:
        print(line)
    if findings:
        return 1
    print("ok")
    return 0


def _cmd_ltl(args) -> int:
    s = _load(args.file)
    req = s.requirement(args.req)
    if referenced_fragments(req):
        if not args.inline:
            raise ReqfragError(
                f"requirement '{args.req}' references fragments; pass --inline"
            )
        req = refactor.combine_templates(req, s)
    print(ltl.formula_text(ltl.to_ltl(req)))
    return 0


def _cmd_inline(args) -> int:
    s = _load(args.file)
    if args.req is not None:
        s.requirement(args.req)  # raises UnknownRequirement before inlining all
        inlined = refactor.combine_templates(s.requirement(args.req), s)
        sys.stdout.write(printer.print_requirement(inlined) + "\n")
        return 0
    sys.stdout.write(printer.print_set(refactor.inline_all(s)))
    return 0


def _cmd_extract(args) -> int:
    s = _load(args.file)
    body = parse_fragment_text(args.pattern)
    if body.name != args.name:
        raise ReqfragError(
            f"pattern declares fragment '{body.name}' but --name is '{args.name}'"
        )
    targets = tuple(t for t in (t.strip() for t in args.targets.split(",")) if t)
    spec = refactor.ExtractionSpec(args.name, body, targets)
    rewritten = refactor.extract_fragment(s, spec)
    text = printer.print_set(rewritten)
    if args.write:
        _write_atomic(args.file, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_dups(args) -> int:
    s = _load(args.file)
    candidates = analysis.find_duplicates(
        s, min_support=args.min_support, include_responses=args.include_responses
    )
    if args.apply:
        rewritten, log = analysis.apply_duplicates(s, candidates, args.prefix)
        for line in log:
            print(line, file=sys.stderr)
        text = printer.print_set(rewritten)
        if args.write:
            _write_atomic(args.file, text)
        else:
            sys.stdout.write(text)
        return 0
    if args.json:
        _print_json([analysis.candidate_to_json(c) for c in candidates])
        return 0
    if not candidates:
        print("no duplicates found")
        return 0
    for i, c in enumerate(candidates, start=1):
        print(f"candidate {i}: support={len(c.support)} size={c.size}")
        for p in c.parts:
            print(f"  {p.kind}: {p.text}")
        print(f"  in: {', '.join(c.support)}")
    return 0


def _equiv_config(args) -> equivalence.EquivConfig:
    return equivalence.EquivConfig(
        max_len=args.max_len,
        mode=equivalence.EquivMode(args.mode),
        samples=args.samples,
        seed=args.seed,
    )


def _print_verdict(verdict: equivalence.Verdict) -> None:
    print(equivalence.verdict_text(verdict))
    if isinstance(verdict, equivalence.NotEquivalent):
        print("witness:")
        print(equivalence.witness_text(verdict.witness))


def _cmd_equiv(args) -> int:
    s = _load(args.file)
    verdict = equivalence.equivalent(
        s.requirement(args.left), s.requirement(args.right), s, _equiv_config(args)
    )
    if args.json:
        _print_json(equivalence.verdict_to_json(verdict))
    else:
        _print_verdict(verdict)
    return 1 if isinstance(verdict, equivalence.NotEquivalent) else 0


def _cmd_check_refactor(args) -> int:
    before = _load(args.before)
    after = _load(args.after)
    report = equivalence.check_refactoring(before, after, _equiv_config(args))
    if args.json:
        _print_json(
            {
                "entries": [
                    {"id": rid, "verdict": equivalence.verdict_to_json(v)}
                    for rid, v in report.entries
                ],
                "all_equivalent": report.all_equivalent,
            }
        )
    else:
        width = max((len(rid) for rid, _ in report.entries), default=0)
        for rid, v in report.entries:
            print(f"{rid:<{width}}  {equivalence.verdict_text(v)}")
            if isinstance(v, equivalence.NotEquivalent):
                print(equivalence.witness_text(v.witness))
        failed = len(report.failures)
        print(f"{len(report.entries)} checked, {len(report.entries) - failed} equivalent, {failed} differing")
    return 0 if report.all_equivalent else 1


def _cmd_graph(args) -> int:
    g = analysis.dependency_graph(_load(args.file))
    if args.dot:
        sys.stdout.write(analysis.to_dot(g))
    else:
        for src, dst in g.edges:
            print(f"{src} -> {dst}")
    return 0


def _cmd_impact(args) -> int:
    for rid in analysis.impact(_load(args.file), args.fragment):
        print(rid)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _add_equiv_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-len", type=int, default=4, help="maximum trace length")
    p.add_argument(
        "--mode",
        choices=["auto", "exhaustive", "random"],
        default="auto",
        help="auto picks exhaustive within the atom budget, random beyond it",
    )
    p.add_argument("--samples", type=int, default=100_000, help="random-mode sample count")
    p.add_argument("--seed", type=int, default=0, help="random-mode seed")
    p.add_argument("--json", action="store_true")


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="reqfrag",
        description="Parse, refactor, analyze, and equivalence-check structured requirements.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a file and report or dump the AST")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="dump the full AST as JSON")
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("fmt", help="canonical pretty-print")
    p.add_argument("file")
    p.add_argument("--write", action="store_true", help="rewrite the file in place")
    p.set_defaults(fn=_cmd_fmt)

    p = sub.add_parser("lint", help="report unresolved references, cycles, conflicts")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_lint)

    p = sub.add_parser("ltl", help="emit the temporal-logic formula of a requirement")
    p.add_argument("file")
    p.add_argument("--req", required=True, help="requirement id")
    p.add_argument("--inline", action="store_true", help="inline fragments first")
    p.set_defaults(fn=_cmd_ltl)

    p = sub.add_parser("inline", help="print the set with all fragments recombined")
    p.add_argument("file")
    p.add_argument("--req", help="inline a single requirement")
    p.set_defaults(fn=_cmd_inline)

    p = sub.add_parser("extract", help="extract a fragment from target requirements")
    p.add_argument("file")
    p.add_argument("--name", required=True, help="new fragment name")
    p.add_argument("--pattern", required=True, help="fragment body in .fret syntax")
    p.add_argument("--targets", required=True, help="comma-separated requirement ids")
    p.add_argument("--write", action="store_true", help="rewrite the file in place")
    p.add_argument("--stdout", action="store_true", help="print the rewritten set (default)")
    p.set_defaults(fn=_cmd_extract)

    p = sub.add_parser("dups", help="mine duplicate fragment candidates")
    p.add_argument("file")
    p.add_argument("--min-support", type=int, default=2)
    p.add_argument("--include-responses", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--apply", action="store_true", help="extract the mined candidates")
    p.add_argument("--prefix", default="frag", help="name prefix for --apply")
    p.add_argument("--write", action="store_true", help="rewrite the file in place")
    p.set_defaults(fn=_cmd_dups)

    p = sub.add_parser("equiv", help="bounded equivalence of two requirements")
    p.add_argument("file")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    _add_equiv_flags(p)
    p.set_defaults(fn=_cmd_equiv)

    p = sub.add_parser("check-refactor", help="per-requirement equivalence of two files")
    p.add_argument("before")
    p.add_argument("after")
    _add_equiv_flags(p)
    p.set_defaults(fn=_cmd_check_refactor)

    p = sub.add_parser("graph", help="requirement/fragment dependency graph")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true", help="emit Graphviz DOT")
    p.set_defaults(fn=_cmd_graph)

    p = sub.add_parser("impact", help="requirements affected by a fragment change")
    p.add_argument("file")
    p.add_argument("--fragment", required=True)
    p.set_defaults(fn=_cmd_impact)

    return top


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ReqfragError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
