"""Query language front end: lexer, recursive-descent parser, canonical renderer.

The accepted language is a read-only single-clause subset of Cypher:

    query    := MATCH pattern ("," pattern)* [WHERE expr]
                RETURN proj ("," proj)* [ORDER BY sort ("," sort)*] [LIMIT posint]
    pattern  := node (edge node)*
    node     := "(" [ident] [":" ident] ")"
    edge     := "-[" [ident] [":" ident] "]->" | "<-[" [ident] [":" ident] "]-"
    proj     := expr [AS ident]
    sort     := expr [ASC | DESC]                 (default ASC)
    expr     := and_expr (OR and_expr)*
    and_expr := not_expr (AND not_expr)*
    not_expr := NOT not_expr | comparison
    comparison := additive [("=" | "<>" | "<" | "<=" | ">" | ">=") additive
                            | CONTAINS additive | IN list_literal]
    additive := primary ("+" primary)*
    list_literal := "[" [literal ("," literal)*] "]"
    primary  := ident "." ident | text_literal | int_literal | list_literal | "(" expr ")"

Keywords are case-insensitive; identifiers and text literals are
case-sensitive. Text literals may use single or double quotes, with a
backslash escaping the following character. Parsing is total: it returns
either an AST or a non-empty list of diagnostics, and any variable used in
WHERE / RETURN / ORDER BY must be bound by a MATCH pattern.

``render`` produces the canonical single-line form (upper-case keywords,
single-quoted literals, minimal parentheses); ``parse(render(ast))`` yields
an AST structurally equal to ``ast``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

MAX_QUERY_BYTES = 64 * 1024

KEYWORDS = frozenset(
    {
        "MATCH",
        "WHERE",
        "RETURN",
        "ORDER",
        "BY",
        "LIMIT",
        "AS",
        "ASC",
        "DESC",
        "AND",
        "OR",
        "NOT",
        "CONTAINS",
        "IN",
    }
)

COMPARISON_OPS = frozenset({"=", "<>", "<", "<=", ">", ">="})

LTR = "ltr"  # -[:R]->  : left node is the edge source
RTL = "rtl"  # <-[:R]-  : right node is the edge source

EdgeDirection = Literal["ltr", "rtl"]


@dataclass(frozen=True, slots=True)
class Span:
    """Half-open [start, end) character offsets into the source text."""

    start: int
    end: int


NO_SPAN = Span(0, 0)


def _span_field() -> Span:
    return NO_SPAN


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


class Expr:
    """Base class for expression nodes."""

    span: Span


@dataclass(frozen=True)
class TextLit(Expr):
    value: str
    span: Span = field(default_factory=_span_field, compare=False, repr=False)


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    span: Span = field(default_factory=_span_field, compare=False, repr=False)


@dataclass(frozen=True)
class ListLit(Expr):
    items: tuple[Expr, ...]
    span: Span = field(default_factory=_span_field, compare=False, repr=False)


@dataclass(frozen=True)
class PropRef(Expr):
    variable: str
    prop: str
    span: Span = field(default_factory=_span_field, compare=False, repr=False)


@dataclass(frozen=True)
class UnaryNot(Expr):
    operand: Expr
    span: Span = field(default_factory=_span_field, compare=False, repr=False)


@dataclass(frozen=True)
class BinaryOp(Expr):
    op: str  # one of + = <> < <= > >= CONTAINS IN AND OR
    left: Expr
    right: Expr
    span: Span = field(default_factory=_span_field, compare=False, repr=False)


@dataclass(frozen=True)
class NodePattern:
    variable: str | None
    label: str | None
    span: Span = field(default_factory=_span_field, compare=False, repr=False)


@dataclass(frozen=True)
class EdgePattern:
    variable: str | None
    rel_type: str | None
    direction: EdgeDirection
    span: Span = field(default_factory=_span_field, compare=False, repr=False)


@dataclass(frozen=True)
class PathPattern:
    nodes: tuple[NodePattern, ...]
    edges: tuple[EdgePattern, ...]

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.edges) + 1:
            raise ValueError("path must alternate node, edge, node, ...")


@dataclass(frozen=True)
class Projection:
    expr: Expr
    alias: str | None


@dataclass(frozen=True)
class SortKey:
    expr: Expr
    descending: bool = False


@dataclass(frozen=True)
class QueryAst:
    patterns: tuple[PathPattern, ...]
    filter: Expr | None
    projections: tuple[Projection, ...]
    order_by: tuple[SortKey, ...] = ()
    limit: int | None = None

    def bound_variables(self) -> set[str]:
        """Variables bound by node or edge patterns."""
        out: set[str] = set()
        for path in self.patterns:
            for node in path.nodes:
                if node.variable is not None:
                    out.add(node.variable)
            for edge in path.edges:
                if edge.variable is not None:
                    out.add(edge.variable)
        return out


@dataclass(frozen=True)
class ParseDiagnostic:
    """A parse-phase problem with a 1-based source position."""

    code: str  # SYNTAX, UNBOUND_VARIABLE, BAD_LIMIT, INPUT_TOO_LARGE
    message: str
    line: int
    column: int
    start: int
    end: int
    expected: str | None = None

    def to_json(self) -> dict:
        message = self.message
        if self.expected:
            message = f"{message} (expected {self.expected})"
        return {
            "severity": "error",
            "code": self.code,
            "start": self.start,
            "end": self.end,
            "message": f"{self.line}:{self.column}: {message}",
        }


@dataclass(frozen=True)
class ParseResult:
    ast: QueryAst | None
    diagnostics: tuple[ParseDiagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return self.ast is not None


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # IDENT INT TEXT or a punctuation literal; EOF at end
    text: str
    value: object
    start: int
    end: int
    line: int
    column: int
    keyword: str | None = None


class _LexFailure(Exception):
    def __init__(self, diagnostic: ParseDiagnostic) -> None:
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


_PUNCT_2 = {"<=": "<=", ">=": ">=", "<>": "<>", "<-": "<-", "->": "->"}
_PUNCT_1 = set("()[],.:+=<>-")


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)

    def here(start: int) -> tuple[int, int]:
        return line, start - line_start + 1

    while pos < n:
        ch = text[pos]
        if ch == "\n":
            line += 1
            pos += 1
            line_start = pos
            continue
        if ch.isspace():
            pos += 1
            continue
        start = pos
        if ch.isalpha() or ch == "_":
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            word = text[start:pos]
            upper = word.upper()
            ln, col = here(start)
            tokens.append(
                _Token(
                    "IDENT",
                    word,
                    word,
                    start,
                    pos,
                    ln,
                    col,
                    keyword=upper if upper in KEYWORDS else None,
                )
            )
            continue
        if "0" <= ch <= "9":
            while pos < n and "0" <= text[pos] <= "9":
                pos += 1
            ln, col = here(start)
            tokens.append(_Token("INT", text[start:pos], int(text[start:pos]), start, pos, ln, col))
            continue
        if ch in ("'", '"'):
            quote = ch
            pos += 1
            chunks: list[str] = []
            while True:
                if pos >= n:
                    ln, col = here(start)
                    raise _LexFailure(
                        ParseDiagnostic(
                            "SYNTAX",
                            "unterminated text literal",
                            ln,
                            col,
                            start,
                            n,
                            expected=quote,
                        )
                    )
                c = text[pos]
                if c == "\\":
                    if pos + 1 >= n:
                        ln, col = here(start)
                        raise _LexFailure(
                            ParseDiagnostic(
                                "SYNTAX",
                                "dangling backslash in text literal",
                                ln,
                                col,
                                start,
                                n,
                                expected=quote,
                            )
                        )
                    chunks.append(text[pos + 1])
                    pos += 2
                    continue
                if c == quote:
                    pos += 1
                    break
                if c == "\n":
                    line += 1
                    line_start = pos + 1
                chunks.append(c)
                pos += 1
            ln, col = here(start)
            tokens.append(_Token("TEXT", text[start:pos], "".join(chunks), start, pos, ln, col))
            continue
        two = text[pos : pos + 2]
        if two in _PUNCT_2:
            ln, col = here(start)
            tokens.append(_Token(two, two, two, start, pos + 2, ln, col))
            pos += 2
            continue
        if ch in _PUNCT_1:
            ln, col = here(start)
            tokens.append(_Token(ch, ch, ch, start, pos + 1, ln, col))
            pos += 1
            continue
        ln, col = here(start)
        raise _LexFailure(
            ParseDiagnostic("SYNTAX", f"unexpected character {ch!r}", ln, col, start, start + 1)
        )

    ln, col = here(pos)
    tokens.append(_Token("EOF", "", None, pos, pos, ln, col))
    return tokens


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


class _ParseFailure(Exception):
    def __init__(self, diagnostic: ParseDiagnostic) -> None:
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class _Parser:
    def __init__(self, tokens: list[_Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def _fail(self, message: str, expected: str | None = None, token: _Token | None = None) -> _ParseFailure:
        tok = token if token is not None else self.current
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        return _ParseFailure(
            ParseDiagnostic(
                "SYNTAX",
                f"{message}, found {found}",
                tok.line,
                tok.column,
                tok.start,
                tok.end,
                expected=expected,
            )
        )

    def _expect_punct(self, kind: str) -> _Token:
        if self.current.kind != kind:
            raise self._fail(f"expected {kind!r}", expected=kind)
        return self._advance()

    def _expect_keyword(self, word: str) -> _Token:
        if self.current.keyword != word:
            raise self._fail(f"expected {word}", expected=word)
        return self._advance()

    def _at_keyword(self, word: str) -> bool:
        return self.current.keyword == word

    def _take_keyword(self, word: str) -> bool:
        if self._at_keyword(word):
            self._advance()
            return True
        return False

    def _expect_identifier(self, what: str) -> _Token:
        tok = self.current
        if tok.kind != "IDENT" or tok.keyword is not None:
            raise self._fail(f"expected {what}", expected="identifier")
        return self._advance()

    # -- grammar ------------------------------------------------------

    def query(self) -> tuple[QueryAst, list[ParseDiagnostic]]:
        self._expect_keyword("MATCH")
        patterns = [self.pattern()]
        while self.current.kind == ",":
            self._advance()
            patterns.append(self.pattern())
        filter_expr: Expr | None = None
        if self._take_keyword("WHERE"):
            filter_expr = self.expr()
        self._expect_keyword("RETURN")
        projections = [self.projection()]
        while self.current.kind == ",":
            self._advance()
            projections.append(self.projection())
        order_by: list[SortKey] = []
        if self._at_keyword("ORDER"):
            self._advance()
            self._expect_keyword("BY")
            order_by.append(self.sort_key())
            while self.current.kind == ",":
                self._advance()
                order_by.append(self.sort_key())
        limit: int | None = None
        limit_diag: list[ParseDiagnostic] = []
        if self._take_keyword("LIMIT"):
            tok = self.current
            if tok.kind != "INT":
                raise self._fail("expected a positive integer after LIMIT", expected="integer")
            self._advance()
            assert isinstance(tok.value, int)
            if tok.value <= 0:
                limit_diag.append(
                    ParseDiagnostic(
                        "BAD_LIMIT",
                        f"LIMIT must be a positive integer, got {tok.value}",
                        tok.line,
                        tok.column,
                        tok.start,
                        tok.end,
                    )
                )
            limit = tok.value
        if self.current.kind != "EOF":
            raise self._fail("expected end of query", expected="end of input")
        ast = QueryAst(
            patterns=tuple(patterns),
            filter=filter_expr,
            projections=tuple(projections),
            order_by=tuple(order_by),
            limit=limit,
        )
        return ast, limit_diag

    def pattern(self) -> PathPattern:
        nodes = [self.node_pattern()]
        edges: list[EdgePattern] = []
        while self.current.kind in ("-", "<-"):
            edges.append(self.edge_pattern())
            nodes.append(self.node_pattern())
        return PathPattern(nodes=tuple(nodes), edges=tuple(edges))

    def node_pattern(self) -> NodePattern:
        open_tok = self._expect_punct("(")
        variable = None
        label = None
        if self.current.kind == "IDENT" and self.current.keyword is None:
            variable = self._advance().text
        if self.current.kind == ":":
            self._advance()
            label = self._expect_identifier("a label name").text
        close_tok = self._expect_punct(")")
        return NodePattern(variable=variable, label=label, span=Span(open_tok.start, close_tok.end))

    def edge_pattern(self) -> EdgePattern:
        start_tok = self.current
        if self.current.kind == "-":
            direction: EdgeDirection = LTR
            self._advance()
            self._expect_punct("[")
        else:
            direction = RTL
            self._expect_punct("<-")
            self._expect_punct("[")
        variable = None
        rel_type = None
        if self.current.kind == "IDENT" and self.current.keyword is None:
            variable = self._advance().text
        if self.current.kind == ":":
            self._advance()
            rel_type = self._expect_identifier("a relation type").text
        self._expect_punct("]")
        if direction == LTR:
            end_tok = self._expect_punct("->")
        else:
            end_tok = self._expect_punct("-")
        return EdgePattern(
            variable=variable,
            rel_type=rel_type,
            direction=direction,
            span=Span(start_tok.start, end_tok.end),
        )

    def projection(self) -> Projection:
        expr = self.expr()
        alias = None
        if self._take_keyword("AS"):
            alias = self._expect_identifier("an alias").text
        return Projection(expr=expr, alias=alias)

    def sort_key(self) -> SortKey:
        expr = self.expr()
        descending = False
        if self._take_keyword("DESC"):
            descending = True
        elif self._at_keyword("ASC"):
            self._advance()
        return SortKey(expr=expr, descending=descending)

    # -- expressions ----------------------------------------------------

    def expr(self) -> Expr:
        left = self.and_expr()
        while self._at_keyword("OR"):
            self._advance()
            right = self.and_expr()
            left = BinaryOp("OR", left, right, span=Span(left.span.start, right.span.end))
        return left

    def and_expr(self) -> Expr:
        left = self.not_expr()
        while self._at_keyword("AND"):
            self._advance()
            right = self.not_expr()
            left = BinaryOp("AND", left, right, span=Span(left.span.start, right.span.end))
        return left

    def not_expr(self) -> Expr:
        if self._at_keyword("NOT"):
            tok = self._advance()
            operand = self.not_expr()
            return UnaryNot(operand, span=Span(tok.start, operand.span.end))
        return self.comparison()

    def comparison(self) -> Expr:
        left = self.additive()
        tok = self.current
        if tok.kind in COMPARISON_OPS:
            self._advance()
            right = self.additive()
            return BinaryOp(tok.kind, left, right, span=Span(left.span.start, right.span.end))
        if tok.keyword == "CONTAINS":
            self._advance()
            right = self.additive()
            return BinaryOp("CONTAINS", left, right, span=Span(left.span.start, right.span.end))
        if tok.keyword == "IN":
            self._advance()
            right = self.list_literal()
            return BinaryOp("IN", left, right, span=Span(left.span.start, right.span.end))
        return left

    def additive(self) -> Expr:
        left = self.primary()
        while self.current.kind == "+":
            self._advance()
            right = self.primary()
            left = BinaryOp("+", left, right, span=Span(left.span.start, right.span.end))
        return left

    def list_literal(self) -> ListLit:
        open_tok = self._expect_punct("[")
        items: list[Expr] = []
        if self.current.kind != "]":
            items.append(self.scalar_literal())
            while self.current.kind == ",":
                self._advance()
                items.append(self.scalar_literal())
        close_tok = self._expect_punct("]")
        return ListLit(items=tuple(items), span=Span(open_tok.start, close_tok.end))

    def scalar_literal(self) -> Expr:
        tok = self.current
        if tok.kind == "TEXT":
            self._advance()
            assert isinstance(tok.value, str)
            return TextLit(tok.value, span=Span(tok.start, tok.end))
        if tok.kind == "INT":
            self._advance()
            assert isinstance(tok.value, int)
            return IntLit(tok.value, span=Span(tok.start, tok.end))
        raise self._fail("expected a text or integer literal", expected="literal")

    def primary(self) -> Expr:
        tok = self.current
        if tok.kind == "TEXT" or tok.kind == "INT":
            return self.scalar_literal()
        if tok.kind == "[":
            return self.list_literal()
        if tok.kind == "(":
            self._advance()
            inner = self.expr()
            self._expect_punct(")")
            return inner
        if tok.kind == "IDENT" and tok.keyword is None:
            self._advance()
            self._expect_punct(".")
            prop = self._expect_identifier("a property name")
            return PropRef(tok.text, prop.text, span=Span(tok.start, prop.end))
        raise self._fail("expected an expression", expected="expression")


def _offset_position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    last_nl = text.rfind("\n", 0, offset)
    return line, offset - last_nl


def _unbound_diagnostics(text: str, ast: QueryAst) -> list[ParseDiagnostic]:
    bound = ast.bound_variables()
    diags: list[ParseDiagnostic] = []

    def walk(expr: Expr) -> None:
        if isinstance(expr, PropRef):
            if expr.variable not in bound:
                line, col = _offset_position(text, expr.span.start)
                diags.append(
                    ParseDiagnostic(
                        "UNBOUND_VARIABLE",
                        f"variable {expr.variable!r} is not bound by any MATCH pattern",
                        line,
                        col,
                        expr.span.start,
                        expr.span.end,
                    )
                )
        elif isinstance(expr, UnaryNot):
            walk(expr.operand)
        elif isinstance(expr, BinaryOp):
            walk(expr.left)
            walk(expr.right)
        elif isinstance(expr, ListLit):
            for item in expr.items:
                walk(item)

    if ast.filter is not None:
        walk(ast.filter)
    for proj in ast.projections:
        walk(proj.expr)
    for key in ast.order_by:
        walk(key.expr)
    return diags


def parse(text: str) -> ParseResult:
    """Parse query text into an AST, or return diagnostics. Never raises."""
    if len(text.encode("utf-8", errors="replace")) > MAX_QUERY_BYTES:
        return ParseResult(
            None,
            (
                ParseDiagnostic(
                    "INPUT_TOO_LARGE",
                    f"query exceeds {MAX_QUERY_BYTES} bytes",
                    1,
                    1,
                    0,
                    len(text),
                ),
            ),
        )
    try:
        tokens = _lex(text)
    except _LexFailure as exc:
        return ParseResult(None, (exc.diagnostic,))
    parser = _Parser(tokens)
    try:
        ast, extra = parser.query()
    except _ParseFailure as exc:
        return ParseResult(None, (exc.diagnostic,))
    diags = list(extra)
    diags.extend(_unbound_diagnostics(text, ast))
    if diags:
        return ParseResult(None, tuple(sorted(diags, key=lambda d: (d.start, d.end, d.code))))
    return ParseResult(ast)


# --------------------------------------------------------------------------
# Canonical renderer
# --------------------------------------------------------------------------

_P_OR, _P_AND, _P_NOT, _P_CMP, _P_ADD, _P_ATOM = 1, 2, 3, 4, 5, 6

_BINARY_PREC = {
    "OR": _P_OR,
    "AND": _P_AND,
    "=": _P_CMP,
    "<>": _P_CMP,
    "<": _P_CMP,
    "<=": _P_CMP,
    ">": _P_CMP,
    ">=": _P_CMP,
    "CONTAINS": _P_CMP,
    "IN": _P_CMP,
    "+": _P_ADD,
}

# Comparison operators do not chain, so both operands must already sit at
# additive level; the associative operators re-parse left-nested.
_NON_ASSOCIATIVE = {"=", "<>", "<", "<=", ">", ">=", "CONTAINS", "IN"}


def _quote_text(value: str) -> str:
    return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _expr_prec(expr: Expr) -> int:
    if isinstance(expr, BinaryOp):
        return _BINARY_PREC[expr.op]
    if isinstance(expr, UnaryNot):
        return _P_NOT
    return _P_ATOM


def render_expr(expr: Expr, min_prec: int = _P_OR) -> str:
    if isinstance(expr, TextLit):
        return _quote_text(expr.value)
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, ListLit):
        return "[" + ", ".join(render_expr(item) for item in expr.items) + "]"
    if isinstance(expr, PropRef):
        return f"{expr.variable}.{expr.prop}"
    if isinstance(expr, UnaryNot):
        out = "NOT " + render_expr(expr.operand, _P_NOT)
        return f"({out})" if _P_NOT < min_prec else out
    if isinstance(expr, BinaryOp):
        prec = _BINARY_PREC[expr.op]
        if expr.op in _NON_ASSOCIATIVE:
            left = render_expr(expr.left, _P_ADD)
            right = render_expr(expr.right, _P_ADD)
        else:
            left = render_expr(expr.left, prec)
            right = render_expr(expr.right, prec + 1)
        out = f"{left} {expr.op} {right}"
        return f"({out})" if prec < min_prec else out
    raise TypeError(f"cannot render {type(expr).__name__}")


def _render_node(node: NodePattern) -> str:
    inner = node.variable or ""
    if node.label is not None:
        inner += f":{node.label}"
    return f"({inner})"


def _render_edge(edge: EdgePattern) -> str:
    inner = edge.variable or ""
    if edge.rel_type is not None:
        inner += f":{edge.rel_type}"
    if edge.direction == LTR:
        return f"-[{inner}]->"
    return f"<-[{inner}]-"


def _render_pattern(path: PathPattern) -> str:
    parts = [_render_node(path.nodes[0])]
    for edge, node in zip(path.edges, path.nodes[1:]):
        parts.append(_render_edge(edge))
        parts.append(_render_node(node))
    return "".join(parts)


def render(ast: QueryAst) -> str:
    """Canonical single-line text whose parse equals ``ast`` structurally."""
    parts = ["MATCH ", ", ".join(_render_pattern(p) for p in ast.patterns)]
    if ast.filter is not None:
        parts.append(" WHERE ")
        parts.append(render_expr(ast.filter))
    parts.append(" RETURN ")
    rendered_projs = []
    for proj in ast.projections:
        text = render_expr(proj.expr)
        if proj.alias is not None:
            text += f" AS {proj.alias}"
        rendered_projs.append(text)
    parts.append(", ".join(rendered_projs))
    if ast.order_by:
        parts.append(" ORDER BY ")
        rendered_keys = []
        for key in ast.order_by:
            text = render_expr(key.expr)
            if key.descending:
                text += " DESC"
            rendered_keys.append(text)
        parts.append(", ".join(rendered_keys))
    if ast.limit is not None:
        parts.append(f" LIMIT {ast.limit}")
    return "".join(parts)
