"""Independent reference implementations used to cross-check the engine.

Nothing here shares code with the execution path it checks: matching is a
plain cartesian product over candidate keys with explicit constraint
scanning of the raw edge list, expression evaluation is a separate
dispatch-table evaluator, sorting uses a comparator instead of stable
passes, and agreement is computed with the pairwise-distance formulation
rather than a coincidence matrix.
"""

from __future__ import annotations

import datetime as dt
import functools
import itertools

from skgchat.graph import PropertyGraph
from skgchat.queryast import (
    LTR,
    BinaryOp,
    Expr,
    IntLit,
    ListLit,
    PropRef,
    QueryAst,
    TextLit,
    UnaryNot,
)

# --------------------------------------------------------------------------
# Brute-force query execution
# --------------------------------------------------------------------------


class _Mismatch(Exception):
    """Internal marker for kind-mixed operations (maps to row-level false/null)."""


def _oracle_kind(v):
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, int):
        return "integer"
    if isinstance(v, str):
        return "text"
    if isinstance(v, dt.date):
        return "date"
    if isinstance(v, list):
        return "list"
    raise _Mismatch


def _want_bool(v):
    if v is None:
        return False
    if isinstance(v, bool):
        return v
    raise _Mismatch


def _ev_add(l, r):
    if l is None or r is None:
        return None
    if isinstance(l, str) and isinstance(r, str):
        return l + r
    if _oracle_kind(l) == "integer" and _oracle_kind(r) == "integer":
        return l + r
    raise _Mismatch


def _ev_contains(l, r):
    if l is None or r is None:
        return False
    if isinstance(l, str) and isinstance(r, str):
        return r in l
    raise _Mismatch


def _ev_in(l, r):
    if l is None or r is None:
        return False
    if not isinstance(r, list):
        raise _Mismatch
    for item in r:
        if _oracle_kind(item) == _oracle_kind(l) and item == l:
            return True
    return False


def _cmp_pair(op, l, r):
    if l is None or r is None:
        return False
    if _oracle_kind(l) != _oracle_kind(r):
        raise _Mismatch
    if op == "=":
        return l == r
    if op == "<>":
        return l != r
    if _oracle_kind(l) == "list":
        raise _Mismatch
    return {"<": l < r, "<=": l <= r, ">": l > r, ">=": l >= r}[op]


def oracle_eval(expr: Expr, binding: dict[str, int], graph: PropertyGraph):
    """Independent expression evaluator with the same null/kind semantics."""
    if isinstance(expr, TextLit):
        return expr.value
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, ListLit):
        return [oracle_eval(i, binding, graph) for i in expr.items]
    if isinstance(expr, PropRef):
        key = binding.get(expr.variable)
        if key is None:
            return None
        return graph.nodes[key].properties.get(expr.prop)
    if isinstance(expr, UnaryNot):
        return not _want_bool(oracle_eval(expr.operand, binding, graph))
    assert isinstance(expr, BinaryOp)
    if expr.op == "AND":
        if not _want_bool(oracle_eval(expr.left, binding, graph)):
            return False
        return _want_bool(oracle_eval(expr.right, binding, graph))
    if expr.op == "OR":
        if _want_bool(oracle_eval(expr.left, binding, graph)):
            return True
        return _want_bool(oracle_eval(expr.right, binding, graph))
    l = oracle_eval(expr.left, binding, graph)
    r = oracle_eval(expr.right, binding, graph)
    if expr.op == "+":
        return _ev_add(l, r)
    if expr.op == "CONTAINS":
        return _ev_contains(l, r)
    if expr.op == "IN":
        return _ev_in(l, r)
    return _cmp_pair(expr.op, l, r)


def _rank(v):
    if isinstance(v, bool):
        return (0, int(v))
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, str):
        return (1, v)
    if isinstance(v, dt.date):
        return (2, v.toordinal())
    if isinstance(v, list):
        return (3, tuple(_rank(x) for x in v))
    raise _Mismatch


def _compare_values(a, b, descending):
    # nulls last in both directions
    if a is None and b is None:
        return 0
    if a is None:
        return 1
    if b is None:
        return -1
    ra, rb = _rank(a), _rank(b)
    if ra == rb:
        return 0
    less = -1 if ra < rb else 1
    return -less if descending else less


class OracleResult:
    def __init__(self, rows, row_keys, matched_keys):
        self.rows = rows
        self.row_keys = row_keys
        self.matched_keys = matched_keys


def oracle_execute(ast: QueryAst, graph: PropertyGraph, apply_limit: bool = True) -> OracleResult:
    """Exhaustive enumeration over every node assignment, then filter/sort/limit."""
    positions = []  # (pattern variable or None, label or None, path index, node index)
    for pi, path in enumerate(ast.patterns):
        for ni, node in enumerate(path.nodes):
            positions.append((node.variable, node.label, pi, ni))

    all_keys = sorted(graph.nodes)
    candidate_lists = []
    for var, label, _, _ in positions:
        if label is None:
            candidate_lists.append(all_keys)
        else:
            candidate_lists.append([k for k in all_keys if graph.nodes[k].label == label])

    var_first: dict[str, int] = {}
    for idx, (var, _, _, _) in enumerate(positions):
        if var is not None and var not in var_first:
            var_first[var] = idx

    # Path-local edge descriptors: (left position, right position, rel, direction)
    path_edges: list[list[tuple[int, int, str | None, str]]] = []
    base = 0
    for path in ast.patterns:
        descs = []
        for i, edge in enumerate(path.edges):
            descs.append((base + i, base + i + 1, edge.rel_type, edge.direction))
        path_edges.append(descs)
        base += len(path.nodes)

    def witnesses(assign, desc):
        left, right, rel, direction = desc
        if direction == LTR:
            src, tgt = assign[left], assign[right]
        else:
            src, tgt = assign[right], assign[left]
        return [
            (e.source, e.rel_type, e.target)
            for e in graph.edges
            if e.source == src and e.target == tgt and (rel is None or e.rel_type == rel)
        ]

    def path_witnessed(assign, descs):
        """True when distinct stored edges can witness every edge pattern."""
        options = [witnesses(assign, d) for d in descs]
        if any(not opts for opts in options):
            return False
        for chosen in itertools.product(*options):
            if len(set(chosen)) == len(chosen):
                return True
        return False

    survivors = []
    for assign in itertools.product(*candidate_lists):
        ok = True
        for var, idx in var_first.items():
            for j, (v2, _, _, _) in enumerate(positions):
                if v2 == var and assign[j] != assign[idx]:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        if not all(path_witnessed(assign, descs) for descs in path_edges):
            continue
        binding = {var: assign[idx] for var, idx in var_first.items()}
        if ast.filter is not None:
            try:
                if not _want_bool(oracle_eval(ast.filter, binding, graph)):
                    continue
            except _Mismatch:
                continue
        survivors.append((assign, binding))

    matched = set()
    for assign, _ in survivors:
        matched.update(assign)

    rows = []
    for assign, binding in survivors:
        values = []
        for proj in ast.projections:
            try:
                values.append(oracle_eval(proj.expr, binding, graph))
            except _Mismatch:
                values.append(None)
        sort_values = []
        for key in ast.order_by:
            try:
                sort_values.append(oracle_eval(key.expr, binding, graph))
            except _Mismatch:
                sort_values.append(None)
        rows.append((assign, tuple(values), sort_values))

    if ast.order_by:
        named_order = sorted(var_first.values())

        def compare(a, b):
            for idx, key in enumerate(ast.order_by):
                c = _compare_values(a[2][idx], b[2][idx], key.descending)
                if c:
                    return c
            for pos in named_order:
                if a[0][pos] != b[0][pos]:
                    return -1 if a[0][pos] < b[0][pos] else 1
            return -1 if a[0] < b[0] else (1 if a[0] > b[0] else 0)

        rows.sort(key=functools.cmp_to_key(compare))

    if apply_limit and ast.limit is not None:
        rows = rows[: ast.limit]

    return OracleResult(
        rows=[r for _, r, _ in rows],
        row_keys=[a for a, _, _ in rows],
        matched_keys=matched,
    )


# --------------------------------------------------------------------------
# Canonical graph form (isomorphism oracle)
# --------------------------------------------------------------------------


def canonical_form(graph: PropertyGraph):
    """Key-independent description: nodes sorted by (label, name, id) plus edges
    over (label, name-or-id) identities. Equal forms mean equal graphs up to
    node-key renaming, provided identities are unique."""

    def identity(key):
        node = graph.nodes[key]
        if node.label == "Dataset":
            return (node.label, str(node.properties.get("id", "")))
        return (node.label, str(node.properties.get("name", "")))

    def freeze(node):
        return (
            node.label,
            tuple(sorted((k, str(v)) for k, v in node.properties.items())),
        )

    nodes = sorted(
        freeze(n)
        for n in graph.nodes.values()
    )
    edges = sorted(
        (identity(e.source), e.rel_type, identity(e.target)) for e in graph.edges
    )
    return nodes, edges


# --------------------------------------------------------------------------
# Agreement oracle (pairwise-distance formulation)
# --------------------------------------------------------------------------


def oracle_alpha(pairs):
    """Krippendorff alpha via per-unit pairwise distances over pooled values."""
    units = [list(p) for p in pairs]
    n = sum(len(u) for u in units)
    delta = lambda a, b: 0.0 if a == b else 1.0

    observed = 0.0
    for unit in units:
        within = sum(delta(a, b) for a in unit for b in unit)
        observed += within / (len(unit) - 1)
    observed /= n

    pooled = [v for unit in units for v in unit]
    expected = sum(delta(a, b) for a in pooled for b in pooled) / (n * (n - 1))
    if expected == 0:
        return None
    return 1.0 - observed / expected
