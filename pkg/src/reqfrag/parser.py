"""Parser for the `.fret` requirements text format.

Grammar (whitespace-insensitive; `#` comments run to end of line):

    file        := (fragmentDecl | requirementDecl)*
    requirement := "requirement" REQID ("parent" REQID)? "{"
                       scope? conditionItem* ID "shall" timing?
                       ("satisfy")? "(" expr ")"
                   "}"
    fragment    := "fragment" ID "{"
                       scope? conditionItem* timing? ("satisfy" "(" expr ")")?
                   "}"
    conditionItem := ("when" | "if") "(" expr ")" | "@" ID
    scope       := ("in" | "before" | "after") ID
    timing      := "immediately" | "always" | "never" | "eventually"
                 | "until" "(" expr ")" | ("within" | "for") INT "ticks"
    expr        := precedence ! > & > | > "=>", parenthesized groups
    atom        := ID | "@" ID | term RELOP term
    term        := factor (("+" | "-") factor)*        # associates left
    factor      := NUMBER | ID | ID "(" term ("," term)* ")"

REQID allows dotted segments (``UC5_R_1.1``); plain identifiers do not.
Keywords are reserved and cannot be used as identifiers. The first error
aborts the parse.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import DuplicateId, ParseError, UnknownFragment
from .model import (
    And,
    ArithTerm,
    Atom,
    AtomExpr,
    BoolExpr,
    CallTerm,
    Comparison,
    ConditionClause,
    Fragment,
    FragmentRef,
    GLOBAL_SCOPE,
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
    SourceSpan,
    Term,
    Timing,
    TimingKind,
    merge_spans,
    validate_set,
)

KEYWORDS = frozenset(
    """requirement fragment parent when if in before after shall satisfy
       immediately always never eventually until within for ticks""".split()
)

_TWO_CHAR_OPS = ("<=", ">=", "!=", "=>")
_ONE_CHAR_OPS = "<>=!&|(){},@+-"

_RELOP_TOKENS = frozenset({"<", "<=", ">", ">=", "=", "!="})

_SCOPE_KEYWORDS = {
    "in": ScopeKind.IN,
    "before": ScopeKind.BEFORE,
    "after": ScopeKind.AFTER,
}

_SIMPLE_TIMINGS = {
    "immediately": TimingKind.IMMEDIATELY,
    "always": TimingKind.ALWAYS,
    "never": TimingKind.NEVER,
    "eventually": TimingKind.EVENTUALLY,
}


@dataclass(frozen=True)
class Token:
    kind: str  # "id" | "number" | "kw" | "op" | "eof"
    value: str
    span: SourceSpan


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(text: str, filename: str) -> tuple[list[Token], list[tuple[int, str]]]:
    """Return (tokens, comments); comments are (line, text-after-hash) pairs."""
    tokens: list[Token] = []
    comments: list[tuple[int, str]] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def span(start_line: int, start_col: int, end_line: int, end_col: int) -> SourceSpan:
        return SourceSpan(filename, start_line, start_col, end_line, end_col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            j = i
            while j < n and text[j] != "\n":
                j += 1
            comments.append((line, text[i + 1 : j]))
            col += j - i
            i = j
            continue
        start_line, start_col = line, col
        if _is_ident_start(ch):
            j = i + 1
            while j < n and _is_ident_char(text[j]):
                j += 1
            # dotted continuation (requirement ids like UC5_R_1.1)
            while j < n and text[j] == "." and j + 1 < n and _is_ident_char(text[j + 1]):
                j += 1
                while j < n and _is_ident_char(text[j]):
                    j += 1
            value = text[i:j]
            col += j - i
            i = j
            kind = "kw" if value in KEYWORDS else "id"
            tokens.append(Token(kind, value, span(start_line, start_col, line, col - 1)))
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            value = text[i:j]
            col += j - i
            i = j
            tokens.append(Token("number", value, span(start_line, start_col, line, col - 1)))
            continue
        two = text[i : i + 2]
        if two in _TWO_CHAR_OPS:
            col += 2
            i += 2
            tokens.append(Token("op", two, span(start_line, start_col, line, col - 1)))
            continue
        if ch in _ONE_CHAR_OPS:
            col += 1
            i += 1
            tokens.append(Token("op", ch, span(start_line, start_col, line, col - 1)))
            continue
        raise ParseError(f"unexpected character {ch!r}", span(line, col, line, col))

    tokens.append(Token("eof", "", span(line, col, line, col)))
    return tokens, comments


class _Parser:
    def __init__(self, text: str, filename: str):
        self.tokens, self.comments = tokenize(text, filename)
        self.pos = 0
        # (owner id, fragment name, span) for spanful unknown-fragment errors
        self.use_sites: list[tuple[str, str, SourceSpan]] = []

    # -- token plumbing ----------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_op(self, value: str) -> bool:
        return self.cur.kind == "op" and self.cur.value == value

    def at_kw(self, *values: str) -> bool:
        return self.cur.kind == "kw" and self.cur.value in values

    def expect_op(self, value: str) -> Token:
        if not self.at_op(value):
            raise ParseError(f"expected '{value}', found {self._describe()}", self.cur.span)
        return self.advance()

    def expect_kw(self, value: str) -> Token:
        if not self.at_kw(value):
            raise ParseError(f"expected '{value}', found {self._describe()}", self.cur.span)
        return self.advance()

    def _describe(self) -> str:
        tok = self.cur
        return "end of input" if tok.kind == "eof" else f"{tok.value!r}"

    def expect_name(self, what: str, allow_dotted: bool = False) -> Token:
        tok = self.cur
        if tok.kind == "kw":
            raise ParseError(
                f"keyword {tok.value!r} cannot be used as {what}", tok.span
            )
        if tok.kind != "id":
            raise ParseError(f"expected {what}, found {self._describe()}", tok.span)
        if not allow_dotted and "." in tok.value:
            raise ParseError(
                f"{what} may not contain '.' (found {tok.value!r})", tok.span
            )
        return self.advance()

    # -- declarations ------------------------------------------------------

    def parse_file(self) -> RequirementSet:
        requirements: dict[str, Requirement] = {}
        fragments: dict[str, Fragment] = {}
        decls: list[Requirement | Fragment] = []
        while self.cur.kind != "eof":
            if self.at_kw("requirement"):
                decl = self.parse_requirement()
                if decl.id in requirements or decl.id in fragments:
                    raise DuplicateId(decl.id, decl.span)
                requirements[decl.id] = decl
            elif self.at_kw("fragment"):
                decl = self.parse_fragment()
                if decl.name in fragments or decl.name in requirements:
                    raise DuplicateId(decl.name, decl.span)
                fragments[decl.name] = decl
            else:
                raise ParseError(
                    f"expected 'requirement' or 'fragment', found {self._describe()}",
                    self.cur.span,
                )
            decls.append(decl)

        requirements, fragments = self._attach_comments(requirements, fragments, decls)
        result = RequirementSet(requirements, fragments)
        for _owner, name, span in self.use_sites:
            if name not in fragments:
                raise UnknownFragment(name, span)
        validate_set(result)
        return result

    def _attach_comments(
        self,
        requirements: dict[str, Requirement],
        fragments: dict[str, Fragment],
        decls: list[Requirement | Fragment],
    ) -> tuple[dict[str, Requirement], dict[str, Fragment]]:
        """Attach comment lines preceding each declaration; drop the rest."""
        if not self.comments:
            return requirements, fragments
        remaining = list(self.comments)
        for decl in decls:
            span = decl.span
            assert span is not None
            mine: list[str] = []
            while remaining and remaining[0][0] <= span.start_line:
                mine.append(remaining.pop(0)[1])
            # comments inside the declaration body are not preserved
            while remaining and remaining[0][0] <= span.end_line:
                remaining.pop(0)
            if not mine:
                continue
            updated = replace(decl, comments=tuple(mine))
            if isinstance(updated, Requirement):
                requirements[updated.id] = updated
            else:
                fragments[updated.name] = updated
        return requirements, fragments

    def parse_requirement(self) -> Requirement:
        start = self.expect_kw("requirement")
        id_tok = self.expect_name("a requirement id", allow_dotted=True)
        parent = None
        if self.at_kw("parent"):
            self.advance()
            parent = self.expect_name("a parent requirement id", allow_dotted=True).value
        self.expect_op("{")
        scope = self.parse_scope()
        conditions, uses = self.parse_condition_items(owner=id_tok.value)
        component_tok = self.expect_name("a component name")
        component = Ident(component_tok.value, span=component_tok.span)
        self.expect_kw("shall")
        timing = self.parse_timing()
        if self.at_kw("satisfy"):
            self.advance()
        self.expect_op("(")
        response = self.parse_expr()
        self.expect_op(")")
        end = self.expect_op("}")
        return Requirement(
            id=id_tok.value,
            parent=parent,
            scope=scope,
            conditions=tuple(conditions),
            uses=tuple(uses),
            component=component,
            timing=timing,
            response=response,
            span=merge_spans(start.span, end.span),
        )

    def parse_fragment(self) -> Fragment:
        start = self.expect_kw("fragment")
        name_tok = self.expect_name("a fragment name")
        self.expect_op("{")
        scope = self.parse_scope()
        conditions, uses = self.parse_condition_items(owner=name_tok.value)
        timing = self.parse_timing()
        response = None
        if self.at_kw("satisfy"):
            self.advance()
            self.expect_op("(")
            response = self.parse_expr()
            self.expect_op(")")
        end = self.expect_op("}")
        return Fragment(
            name=name_tok.value,
            scope=scope,
            conditions=tuple(conditions),
            uses=tuple(uses),
            timing=timing,
            response=response,
            span=merge_spans(start.span, end.span),
        )

    def parse_scope(self) -> Scope:
        if not self.at_kw("in", "before", "after"):
            return GLOBAL_SCOPE
        kw = self.advance()
        mode_tok = self.expect_name("a mode name")
        return Scope(
            _SCOPE_KEYWORDS[kw.value],
            Ident(mode_tok.value, span=mode_tok.span),
            span=merge_spans(kw.span, mode_tok.span),
        )

    def parse_condition_items(self, owner: str) -> tuple[list[ConditionClause], list[str]]:
        conditions: list[ConditionClause] = []
        uses: list[str] = []
        while True:
            if self.at_kw("when", "if"):
                kw = self.advance()
                self.expect_op("(")
                expr = self.parse_expr()
                close = self.expect_op(")")
                conditions.append(
                    ConditionClause(
                        Keyword(kw.value), expr, span=merge_spans(kw.span, close.span)
                    )
                )
            elif self.at_op("@"):
                at = self.advance()
                name_tok = self.expect_name("a fragment name")
                uses.append(name_tok.value)
                self.use_sites.append(
                    (owner, name_tok.value, merge_spans(at.span, name_tok.span))  # type: ignore[arg-type]
                )
            else:
                return conditions, uses

    def parse_timing(self) -> Timing:
        tok = self.cur
        if tok.kind != "kw":
            return Timing()
        if tok.value in _SIMPLE_TIMINGS:
            self.advance()
            return Timing(_SIMPLE_TIMINGS[tok.value], span=tok.span)
        if tok.value == "until":
            self.advance()
            self.expect_op("(")
            expr = self.parse_expr()
            close = self.expect_op(")")
            return Timing(TimingKind.UNTIL, expr=expr, span=merge_spans(tok.span, close.span))
        if tok.value in ("within", "for"):
            self.advance()
            num = self.cur
            if num.kind != "number" or "." in num.value:
                raise ParseError("expected a tick count", num.span)
            self.advance()
            bound = int(num.value)
            if bound < 1:
                raise ParseError("tick count must be at least 1", num.span)
            end = self.expect_kw("ticks")
            kind = TimingKind.WITHIN if tok.value == "within" else TimingKind.FOR
            return Timing(kind, bound=bound, span=merge_spans(tok.span, end.span))
        return Timing()

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> BoolExpr:
        return self.parse_implies()

    def parse_implies(self) -> BoolExpr:
        left = self.parse_or()
        if self.at_op("=>"):
            self.advance()
            right = self.parse_implies()  # right-associative
            return Implies(left, right, span=merge_spans(_span(left), _span(right)))
        return left

    def parse_or(self) -> BoolExpr:
        operands = [self.parse_and()]
        while self.at_op("|"):
            self.advance()
            operands.append(self.parse_and())
        if len(operands) == 1:
            return operands[0]
        return Or(tuple(operands), span=merge_spans(_span(operands[0]), _span(operands[-1])))

    def parse_and(self) -> BoolExpr:
        operands = [self.parse_unary()]
        while self.at_op("&"):
            self.advance()
            operands.append(self.parse_unary())
        if len(operands) == 1:
            return operands[0]
        return And(tuple(operands), span=merge_spans(_span(operands[0]), _span(operands[-1])))

    def parse_unary(self) -> BoolExpr:
        if self.at_op("!"):
            bang = self.advance()
            operand = self.parse_unary()
            return Not(operand, span=merge_spans(bang.span, _span(operand)))
        return self.parse_primary()

    def parse_primary(self) -> BoolExpr:
        if self.at_op("("):
            self.advance()
            expr = self.parse_expr()
            self.expect_op(")")
            return expr
        if self.at_op("@"):
            at = self.advance()
            name_tok = self.expect_name("a fragment name")
            return FragmentRef(name_tok.value, span=merge_spans(at.span, name_tok.span))
        if self.cur.kind in ("id", "number"):
            return self.parse_atom()
        raise ParseError(f"expected an expression, found {self._describe()}", self.cur.span)

    def parse_atom(self) -> BoolExpr:
        start = self.cur
        term = self.parse_term()
        if self.cur.kind == "op" and self.cur.value in _RELOP_TOKENS:
            op = self.advance()
            rhs = self.parse_term()
            atom: Atom = Comparison(term, op.value, rhs, span=merge_spans(start.span, _tspan(rhs)))
        else:
            if not isinstance(term, NameTerm):
                raise ParseError(
                    "expected a relational operator after this term", self.cur.span
                )
            atom = Ident(term.name, span=term.span)
        return AtomExpr(atom, span=atom.span)

    def parse_term(self) -> Term:
        left = self.parse_factor()
        while self.cur.kind == "op" and self.cur.value in ("+", "-"):
            op = self.advance()
            right = self.parse_factor()
            left = ArithTerm(left, op.value, right, span=merge_spans(_tspan(left), _tspan(right)))
        return left

    def parse_factor(self) -> Term:
        tok = self.cur
        if tok.kind == "number":
            self.advance()
            return NumberTerm(tok.value, span=tok.span)
        name_tok = self.expect_name("a term")
        if self.at_op("("):
            self.advance()
            args = [self.parse_term()]
            while self.at_op(","):
                self.advance()
                args.append(self.parse_term())
            close = self.expect_op(")")
            return CallTerm(
                name_tok.value, tuple(args), span=merge_spans(name_tok.span, close.span)
            )
        return NameTerm(name_tok.value, span=name_tok.span)


def _span(e: BoolExpr) -> SourceSpan | None:
    return e.span  # type: ignore[attr-defined]


def _tspan(t: Term) -> SourceSpan | None:
    return t.span  # type: ignore[attr-defined]


def parse(text: str, filename: str = "<string>") -> RequirementSet:
    """Parse a whole `.fret` file into a validated RequirementSet."""
    return _Parser(text, filename).parse_file()


def parse_fragment_text(text: str, filename: str = "<pattern>") -> Fragment:
    """Parse a standalone fragment declaration (used for CLI patterns)."""
    p = _Parser(text, filename)
    frag = p.parse_fragment()
    if p.cur.kind != "eof":
        raise ParseError(f"unexpected trailing input: {p._describe()}", p.cur.span)
    return frag


def parse_expr_text(text: str, filename: str = "<expr>") -> BoolExpr:
    """Parse a bare boolean expression."""
    p = _Parser(text, filename)
    expr = p.parse_expr()
    if p.cur.kind != "eof":
        raise ParseError(f"unexpected trailing input: {p._describe()}", p.cur.span)
    return expr
