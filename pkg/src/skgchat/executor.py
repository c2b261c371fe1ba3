"""Query evaluation over a property graph.

Matching enumerates assignments of nodes to pattern positions (anonymous
positions included) such that labels match and every edge pattern is
witnessed by a stored edge of the stated type and direction; within one
path no stored edge may witness two edge patterns. A result row is emitted
once per distinct node assignment. Base enumeration order is lexicographic
over the node keys of all positions left to right, which makes unsorted
output and tie-breaking reproducible across runs.

Expression semantics are two-valued: a null operand makes arithmetic null
and comparisons/CONTAINS/IN false, and kind mixes (text vs integer and the
like) surface as a per-row false plus a warning counter, never a crash.
Matching is a nested-loop join seeded from the label index; the only
planner trick is starting two-node paths from the smaller label set.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

from .graph import PropertyGraph
from .queryast import (
    LTR,
    BinaryOp,
    EdgePattern,
    Expr,
    IntLit,
    ListLit,
    PathPattern,
    PropRef,
    QueryAst,
    TextLit,
    UnaryNot,
    render_expr,
)
from .schema import Value


class ExecutionError(Exception):
    """Schema violation reached at runtime (only possible for unvalidated queries)."""


class ValueTypeError(Exception):
    """Operator applied to incompatible value kinds."""


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple[Value, ...]]
    # Node keys that contribute to any filtered row (collected before LIMIT).
    matched_keys: set[int] = field(default_factory=set)
    # Node keys per returned row, aligned with ``rows`` (after LIMIT), one entry
    # per pattern position left to right; lets callers recover which nodes
    # produced each visible row without re-running the query.
    row_keys: list[tuple[int, ...]] = field(default_factory=list)
    eval_warnings: int = 0

    def rows_json(self) -> list[list[object]]:
        return [[value_to_json(v) for v in row] for row in self.rows]


def value_to_json(value: Value | bool | list) -> object:
    if isinstance(value, dt.date):
        return value.isoformat()
    if isinstance(value, list):
        return [value_to_json(v) for v in value]
    return value


# --------------------------------------------------------------------------
# Expression evaluation
# --------------------------------------------------------------------------


def _kind(value: object) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, str):
        return "text"
    if isinstance(value, dt.date):
        return "date"
    if isinstance(value, list):
        return "list"
    raise ValueTypeError(f"unsupported value {value!r}")


def _as_bool(value: object) -> bool:
    """Two-valued coercion: null is false, booleans pass through."""
    if value is None:
        return False
    if isinstance(value, bool):
        return value
    raise ValueTypeError(f"expected a boolean, got {_kind(value)}")


def evaluate_expr(
    expr: Expr,
    binding: dict[str, int],
    graph: PropertyGraph,
    declared_vars: set[str] | None = None,
) -> object:
    """Evaluate ``expr`` under a variable-to-node binding.

    ``declared_vars`` names the pattern variables that carried an explicit
    label; property access through them onto an undeclared property is a
    schema violation (ExecutionError). Access through unlabeled variables
    degrades to null. Raises ValueTypeError on kind mixes.
    """
    if isinstance(expr, TextLit):
        return expr.value
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, ListLit):
        return [evaluate_expr(item, binding, graph, declared_vars) for item in expr.items]
    if isinstance(expr, PropRef):
        key = binding.get(expr.variable)
        if key is None:
            # Edge variables and anything else without a node binding.
            return None
        node = graph.nodes[key]
        if expr.prop in node.properties:
            return node.properties[expr.prop]
        if declared_vars is not None and expr.variable in declared_vars:
            raise ExecutionError(
                f"label {node.label} declares no property {expr.prop!r}"
            )
        return None
    if isinstance(expr, UnaryNot):
        return not _as_bool(evaluate_expr(expr.operand, binding, graph, declared_vars))
    if isinstance(expr, BinaryOp):
        op = expr.op
        if op == "AND":
            if not _as_bool(evaluate_expr(expr.left, binding, graph, declared_vars)):
                return False
            return _as_bool(evaluate_expr(expr.right, binding, graph, declared_vars))
        if op == "OR":
            if _as_bool(evaluate_expr(expr.left, binding, graph, declared_vars)):
                return True
            return _as_bool(evaluate_expr(expr.right, binding, graph, declared_vars))
        left = evaluate_expr(expr.left, binding, graph, declared_vars)
        right = evaluate_expr(expr.right, binding, graph, declared_vars)
        if op == "+":
            if left is None or right is None:
                return None
            if isinstance(left, str) and isinstance(right, str):
                return left + right
            if _kind(left) == "integer" and _kind(right) == "integer":
                return left + right
            raise ValueTypeError(f"'+' applied to {_kind(left)} and {_kind(right)}")
        if op == "CONTAINS":
            if left is None or right is None:
                return False
            if isinstance(left, str) and isinstance(right, str):
                return right in left
            raise ValueTypeError(f"CONTAINS applied to {_kind(left)} and {_kind(right)}")
        if op == "IN":
            if left is None or right is None:
                return False
            if not isinstance(right, list):
                raise ValueTypeError("IN requires a list on its right side")
            return any(_kind(item) == _kind(left) and item == left for item in right)
        # comparison family
        if left is None or right is None:
            return False
        lk, rk = _kind(left), _kind(right)
        if lk != rk:
            raise ValueTypeError(f"{op} compares {lk} with {rk}")
        if op == "=":
            return left == right
        if op == "<>":
            return left != right
        if lk == "list":
            raise ValueTypeError("lists cannot be ordered")
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
    raise TypeError(f"cannot evaluate {type(expr).__name__}")


def _sortable(value: object) -> tuple:
    """Total order over the heterogeneous non-null value domain."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, int):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, dt.date):
        return (2, value.toordinal())
    if isinstance(value, list):
        return (3, tuple(_sortable(v) for v in value))
    raise ValueTypeError(f"unsortable value {value!r}")


# --------------------------------------------------------------------------
# Pattern matching
# --------------------------------------------------------------------------


def _candidates(graph: PropertyGraph, label: str | None) -> list[int]:
    if label is None:
        return list(graph.nodes)
    return list(graph.label_index.get(label, ()))


def _match_path(graph: PropertyGraph, path: PathPattern) -> list[tuple[int, ...]]:
    """Distinct node assignments for one path, sorted by key tuple."""
    nodes = path.nodes
    edges = path.edges
    if len(nodes) == 2 and nodes[0].label and nodes[1].label:
        # Start from the smaller label set; re-sorting restores canonical order.
        left_n = len(graph.label_index.get(nodes[0].label, ()))
        right_n = len(graph.label_index.get(nodes[1].label, ()))
        if right_n < left_n:
            flipped = PathPattern(
                nodes=(nodes[1], nodes[0]),
                edges=(
                    EdgePattern(
                        variable=edges[0].variable,
                        rel_type=edges[0].rel_type,
                        direction="rtl" if edges[0].direction == LTR else "ltr",
                    ),
                ),
            )
            mirrored = _match_walk(graph, flipped)
            return sorted({(b, a) for a, b in mirrored})
    return sorted(set(_match_walk(graph, path)))


def _match_walk(graph: PropertyGraph, path: PathPattern) -> list[tuple[int, ...]]:
    nodes = path.nodes
    edges = path.edges
    results: list[tuple[int, ...]] = []
    seen_vars: dict[str, int] = {}

    def ok_at(i: int, key: int) -> bool:
        pattern = nodes[i]
        if pattern.label is not None and graph.nodes[key].label != pattern.label:
            return False
        if pattern.variable is not None:
            bound = seen_vars.get(pattern.variable)
            if bound is not None and bound != key:
                return False
        return True

    def step(i: int, assignment: list[int], used: set[tuple[int, str, int]]) -> None:
        if i == len(nodes):
            results.append(tuple(assignment))
            return
        pattern = nodes[i]
        if i == 0:
            options: list[tuple[int, tuple[int, str, int] | None]] = [
                (k, None) for k in _candidates(graph, pattern.label)
            ]
        else:
            edge = edges[i - 1]
            prev = assignment[-1]
            options = []
            if edge.direction == LTR:
                rels = [edge.rel_type] if edge.rel_type else list(graph.schema.rel_types)
                for rel in rels:
                    for nxt in graph.outgoing[prev].get(rel, ()):
                        options.append((nxt, (prev, rel, nxt)))
            else:
                rels = [edge.rel_type] if edge.rel_type else list(graph.schema.rel_types)
                for rel in rels:
                    for nxt in graph.incoming[prev].get(rel, ()):
                        options.append((nxt, (nxt, rel, prev)))
        for key, witness in options:
            if witness is not None and witness in used:
                continue
            if not ok_at(i, key):
                continue
            var = pattern.variable
            fresh_var = var is not None and var not in seen_vars
            if fresh_var:
                seen_vars[var] = key
            assignment.append(key)
            if witness is not None:
                used.add(witness)
            step(i + 1, assignment, used)
            if witness is not None:
                used.discard(witness)
            assignment.pop()
            if fresh_var:
                del seen_vars[var]

    step(0, [], set())
    return results


def _positions(ast: QueryAst) -> list[tuple[int, int, str | None]]:
    """(path index, node index, variable) for every pattern position."""
    out = []
    for pi, path in enumerate(ast.patterns):
        for ni, node in enumerate(path.nodes):
            out.append((pi, ni, node.variable))
    return out


def execute(ast: QueryAst, graph: PropertyGraph, row_cap: int | None = None) -> ResultTable:
    """Run ``ast`` against ``graph``.

    ``row_cap`` truncates the output of queries that do not carry their own
    LIMIT; it exists so services can bound response sizes.
    """
    positions = _positions(ast)
    var_first_pos: dict[str, int] = {}
    for idx, (_, _, var) in enumerate(positions):
        if var is not None and var not in var_first_pos:
            var_first_pos[var] = idx
    declared_vars = {
        node.variable
        for path in ast.patterns
        for node in path.nodes
        if node.variable is not None and node.label is not None
    }

    per_path = [_match_path(graph, path) for path in ast.patterns]

    # Nested-loop join across comma patterns; shared variables must agree.
    combined: list[tuple[int, ...]] = [()]
    offset = 0
    for pi, matches in enumerate(per_path):
        path_vars = [
            (j, node.variable)
            for j, node in enumerate(ast.patterns[pi].nodes)
            if node.variable is not None and var_first_pos[node.variable] < offset
        ]
        new_combined: list[tuple[int, ...]] = []
        for prefix in combined:
            for match in matches:
                if all(prefix[var_first_pos[v]] == match[j] for j, v in path_vars):
                    new_combined.append(prefix + match)
        combined = new_combined
        offset += len(ast.patterns[pi].nodes)

    table = ResultTable(columns=[], rows=[])

    def bindings_of(keys: tuple[int, ...]) -> dict[str, int]:
        return {var: keys[idx] for var, idx in var_first_pos.items()}

    survivors: list[tuple[tuple[int, ...], dict[str, int]]] = []
    for keys in combined:
        binding = bindings_of(keys)
        if ast.filter is not None:
            try:
                keep = _as_bool(evaluate_expr(ast.filter, binding, graph, declared_vars))
            except ValueTypeError:
                table.eval_warnings += 1
                keep = False
            if not keep:
                continue
        survivors.append((keys, binding))
        table.matched_keys.update(keys)

    table.columns = [
        proj.alias if proj.alias is not None else render_expr(proj.expr)
        for proj in ast.projections
    ]

    decorated: list[tuple[tuple[int, ...], tuple[Value, ...], list[object]]] = []
    for keys, binding in survivors:
        row: list[Value] = []
        for proj in ast.projections:
            try:
                row.append(evaluate_expr(proj.expr, binding, graph, declared_vars))
            except ValueTypeError:
                table.eval_warnings += 1
                row.append(None)
        sort_values: list[object] = []
        for key_spec in ast.order_by:
            try:
                sort_values.append(evaluate_expr(key_spec.expr, binding, graph, declared_vars))
            except ValueTypeError:
                table.eval_warnings += 1
                sort_values.append(None)
        decorated.append((keys, tuple(row), sort_values))

    if ast.order_by:
        named_positions = sorted(var_first_pos.values())
        decorated.sort(key=lambda item: tuple(item[0][p] for p in named_positions))
        for idx in range(len(ast.order_by) - 1, -1, -1):
            descending = ast.order_by[idx].descending
            non_null = [d for d in decorated if d[2][idx] is not None]
            nulls = [d for d in decorated if d[2][idx] is None]
            non_null.sort(key=lambda d: _sortable(d[2][idx]), reverse=descending)
            decorated = non_null + nulls

    cutoff = ast.limit if ast.limit is not None else row_cap
    if cutoff is not None:
        decorated = decorated[:cutoff]

    table.rows = [row for _, row, _ in decorated]
    table.row_keys = [keys for keys, _, _ in decorated]
    return table
