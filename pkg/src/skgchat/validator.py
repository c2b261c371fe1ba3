"""Schema-aware static analysis of parsed queries.

Errors flag queries that cannot execute within the schema (unknown labels,
relation types or properties, relations used against their declared
direction or endpoints). Warnings flag constructs that execute but almost
certainly betray a confused translation, such as comparing a count property
with a text literal. Unlabeled node patterns match any label, so property
access through them is never diagnosed here; it degrades to null at
execution time instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .queryast import (
    LTR,
    BinaryOp,
    Expr,
    IntLit,
    ListLit,
    PropRef,
    QueryAst,
    Span,
    TextLit,
    UnaryNot,
)
from .schema import SchemaDef

Severity = Literal["error", "warning"]

UNKNOWN_LABEL = "UNKNOWN_LABEL"
UNKNOWN_REL_TYPE = "UNKNOWN_REL_TYPE"
UNKNOWN_PROPERTY = "UNKNOWN_PROPERTY"
REL_DIRECTION_MISMATCH = "REL_DIRECTION_MISMATCH"
REL_ENDPOINT_MISMATCH = "REL_ENDPOINT_MISMATCH"
TYPE_MISMATCH = "TYPE_MISMATCH"
UNBOUND_VARIABLE = "UNBOUND_VARIABLE"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    start: int
    end: int
    message: str

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "start": self.start,
            "end": self.end,
            "message": self.message,
        }


def _error(code: str, span: Span, message: str) -> Diagnostic:
    return Diagnostic("error", code, span.start, span.end, message)


def _warning(code: str, span: Span, message: str) -> Diagnostic:
    return Diagnostic("warning", code, span.start, span.end, message)


def variable_labels(ast: QueryAst) -> dict[str, set[str]]:
    """Labels attached to each pattern variable, over all its occurrences."""
    out: dict[str, set[str]] = {}
    for path in ast.patterns:
        for node in path.nodes:
            if node.variable is not None:
                out.setdefault(node.variable, set())
                if node.label is not None:
                    out[node.variable].add(node.label)
    return out


def validate(ast: QueryAst, schema: SchemaDef) -> list[Diagnostic]:
    """All schema diagnostics for ``ast``, ordered by source position."""
    diags: list[Diagnostic] = []
    var_labels = variable_labels(ast)
    known_labels = set(schema.labels)

    for path in ast.patterns:
        for node in path.nodes:
            if node.label is not None and node.label not in known_labels:
                diags.append(
                    _error(UNKNOWN_LABEL, node.span, f"unknown label {node.label!r}")
                )
        for i, edge in enumerate(path.edges):
            left, right = path.nodes[i], path.nodes[i + 1]
            if edge.rel_type is None:
                continue
            declared = schema.rel_types.get(edge.rel_type)
            if declared is None:
                diags.append(
                    _error(
                        UNKNOWN_REL_TYPE, edge.span, f"unknown relation type {edge.rel_type!r}"
                    )
                )
                continue
            want_src, want_tgt = declared
            src_node, tgt_node = (left, right) if edge.direction == LTR else (right, left)
            src_label = _effective_label(src_node, var_labels, known_labels)
            tgt_label = _effective_label(tgt_node, var_labels, known_labels)
            if src_label is None and tgt_label is None:
                continue
            if (src_label in (None, want_src)) and (tgt_label in (None, want_tgt)):
                continue
            if (src_label in (None, want_tgt)) and (tgt_label in (None, want_src)):
                diags.append(
                    _error(
                        REL_DIRECTION_MISMATCH,
                        edge.span,
                        f"{edge.rel_type} is declared {want_src}->{want_tgt}; "
                        "the pattern traverses it backwards",
                    )
                )
            else:
                diags.append(
                    _error(
                        REL_ENDPOINT_MISMATCH,
                        edge.span,
                        f"{edge.rel_type} connects {want_src} to {want_tgt}, not "
                        f"{src_label or '?'} to {tgt_label or '?'}",
                    )
                )

    bound = ast.bound_variables()
    checker = _ExprChecker(schema, var_labels, bound, diags)
    if ast.filter is not None:
        checker.kind_of(ast.filter)
    for proj in ast.projections:
        checker.kind_of(proj.expr)
    for key in ast.order_by:
        checker.kind_of(key.expr)

    diags.sort(key=lambda d: (d.start, d.end, d.code))
    return diags


def _effective_label(
    node, var_labels: dict[str, set[str]], known: set[str]
) -> str | None:
    """Best-known label for an edge endpoint, or None when unconstrained."""
    if node.label is not None:
        return node.label if node.label in known else None
    if node.variable is not None:
        labels = {l for l in var_labels.get(node.variable, ()) if l in known}
        if len(labels) == 1:
            return next(iter(labels))
    return None


class _ExprChecker:
    """Static kind inference; records diagnostics as a side effect."""

    def __init__(
        self,
        schema: SchemaDef,
        var_labels: dict[str, set[str]],
        bound: set[str],
        diags: list[Diagnostic],
    ) -> None:
        self.schema = schema
        self.var_labels = var_labels
        self.bound = bound
        self.diags = diags

    def kind_of(self, expr: Expr) -> str | None:
        """Inferred kind (text/integer/date/boolean/list) or None when unknown."""
        if isinstance(expr, TextLit):
            return "text"
        if isinstance(expr, IntLit):
            return "integer"
        if isinstance(expr, ListLit):
            for item in expr.items:
                self.kind_of(item)
            return "list"
        if isinstance(expr, PropRef):
            return self._prop_kind(expr)
        if isinstance(expr, UnaryNot):
            inner = self.kind_of(expr.operand)
            if inner is not None and inner != "boolean":
                self.diags.append(
                    _warning(
                        TYPE_MISMATCH, expr.span, f"NOT applied to a {inner} expression"
                    )
                )
            return "boolean"
        if isinstance(expr, BinaryOp):
            return self._binary_kind(expr)
        return None

    def _prop_kind(self, expr: PropRef) -> str | None:
        if expr.variable not in self.bound:
            self.diags.append(
                _error(
                    UNBOUND_VARIABLE,
                    expr.span,
                    f"variable {expr.variable!r} is not bound by any MATCH pattern",
                )
            )
            return None
        labels = {l for l in self.var_labels.get(expr.variable, ()) if l in set(self.schema.labels)}
        if not labels:
            return None  # unlabeled: any label may bind; nothing checkable
        kinds = {
            self.schema.property_kind(label, expr.prop)
            for label in labels
            if self.schema.has_property(label, expr.prop)
        }
        if not kinds:
            shown = sorted(labels)[0] if len(labels) == 1 else "/".join(sorted(labels))
            self.diags.append(
                _error(
                    UNKNOWN_PROPERTY,
                    expr.span,
                    f"label {shown} declares no property {expr.prop!r}",
                )
            )
            return None
        if len(kinds) == 1:
            return next(iter(kinds))
        return None

    def _binary_kind(self, expr: BinaryOp) -> str | None:
        op = expr.op
        if op == "+":
            lk, rk = self.kind_of(expr.left), self.kind_of(expr.right)
            if lk is not None and rk is not None:
                if lk == rk and lk in ("text", "integer"):
                    return lk
                self.diags.append(
                    _warning(TYPE_MISMATCH, expr.span, f"'+' applied to {lk} and {rk}")
                )
                return None
            if lk in ("text", "integer"):
                return lk
            if rk in ("text", "integer"):
                return rk
            return None
        if op in ("AND", "OR"):
            for side in (expr.left, expr.right):
                kind = self.kind_of(side)
                if kind is not None and kind != "boolean":
                    self.diags.append(
                        _warning(TYPE_MISMATCH, expr.span, f"{op} operand is a {kind} expression")
                    )
            return "boolean"
        if op == "CONTAINS":
            for side in (expr.left, expr.right):
                kind = self.kind_of(side)
                if kind is not None and kind != "text":
                    self.diags.append(
                        _warning(
                            TYPE_MISMATCH, expr.span, f"CONTAINS operand is a {kind} expression"
                        )
                    )
            return "boolean"
        if op == "IN":
            lk = self.kind_of(expr.left)
            if isinstance(expr.right, ListLit):
                for item in expr.right.items:
                    ik = self.kind_of(item)
                    if lk is not None and ik is not None and lk != ik:
                        self.diags.append(
                            _warning(
                                TYPE_MISMATCH,
                                expr.span,
                                f"IN compares a {lk} value with a {ik} list element",
                            )
                        )
            else:
                self.kind_of(expr.right)
            return "boolean"
        # comparison family
        lk, rk = self.kind_of(expr.left), self.kind_of(expr.right)
        if lk is not None and rk is not None and lk != rk:
            self.diags.append(
                _warning(TYPE_MISMATCH, expr.span, f"{op} compares a {lk} value with a {rk} value")
            )
        return "boolean"
