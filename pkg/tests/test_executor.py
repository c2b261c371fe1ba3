from __future__ import annotations

import dataclasses
import random
from collections import Counter

import pytest

from skgchat.executor import ExecutionError, ValueTypeError, evaluate_expr, execute
from skgchat.ingest import load_records
from skgchat.queryast import (
    BinaryOp,
    IntLit,
    ListLit,
    Projection,
    PropRef,
    TextLit,
    parse,
)
from skgchat.validator import validate

from conftest import FUNDING_QUERY, fixture_f1_lines
from generators import random_graph, random_valid_ast
from oracles import oracle_execute


def parse_ok(text):
    result = parse(text)
    assert result.ok, result.diagnostics
    return result.ast


def extended_f1():
    lines = fixture_f1_lines() + [
        '{"type": "dataset", "id": "D3", "name": "Neighborhood Services Study", '
        '"date": "2020-05-02", "url": "https://doi.org/10.3886/E100003", '
        '"totalUserCount": 150, "dataUserCount": 40, "dataRefCount": 9}\n',
        '{"type": "edge", "from_dataset": "D3", "rel": "HAS_OWNER", '
        '"to_label": "Owner", "to_name": "ICPSR-adjacent"}\n',
    ]
    graph, report = load_records(lines)
    assert report.ok, report.errors
    return graph


OWNER_FILTER_QUERY = (
    "MATCH (a:Dataset)-[:HAS_OWNER]->(o:Owner) WHERE o.name <> 'ICPSR' "
    "RETURN a.name + ' LINK: ' + a.url AS response ORDER BY a.dataRefCount DESC LIMIT 5"
)


def test_owner_filter_query_on_extended_fixture():
    graph = extended_f1()
    ast = parse_ok(OWNER_FILTER_QUERY)
    table = execute(ast, graph)
    oracle = oracle_execute(ast, graph)
    assert table.rows == oracle.rows
    # Frozen expectation, independently computed: descending dataRefCount 25, 12, 9.
    assert table.rows == [
        ("Massachusetts Health Reform Survey LINK: https://doi.org/10.3886/E100002",),
        ("American Health Values Survey LINK: https://doi.org/10.3886/E100001",),
        ("Neighborhood Services Study LINK: https://doi.org/10.3886/E100003",),
    ]
    assert table.columns == ["response"]


def test_limit_one_on_single_dataset_graph():
    lines = fixture_f1_lines()[:1]
    graph, report = load_records(lines)
    assert report.ok
    table = execute(parse_ok("MATCH (a:Dataset) RETURN a.name LIMIT 1"), graph)
    assert table.rows == [("American Health Values Survey",)]


def test_funding_query_returns_link_row():
    lines = fixture_f1_lines() + [
        '{"type": "edge", "from_dataset": "D1", "rel": "HAS_FUNDER", '
        '"to_label": "Funder", "to_name": "Ford Foundation"}\n',
    ]
    graph, report = load_records(lines)
    assert report.ok
    ast = parse_ok(FUNDING_QUERY)
    table = execute(ast, graph)
    oracle = oracle_execute(ast, graph)
    assert table.rows == oracle.rows
    assert table.rows == [
        ("American Health Values Survey LINK: https://doi.org/10.3886/E100001",)
    ]


# ---------------------------------------------------------------------------
# Expression semantics
# ---------------------------------------------------------------------------


def eval_on_f1(expr, f1_graph, variable="a", dataset_id="D1"):
    key = f1_graph.dataset_id_index[dataset_id]
    return evaluate_expr(expr, {variable: key}, f1_graph)


def test_concatenation(f1_graph):
    expr = BinaryOp(
        "+", BinaryOp("+", TextLit("name"), TextLit(" LINK: ")), TextLit("url")
    )
    assert eval_on_f1(expr, f1_graph) == "name LINK: url"


def test_contains_is_case_sensitive(f1_graph):
    lhs = TextLit("mental health and aging")
    assert eval_on_f1(BinaryOp("CONTAINS", lhs, TextLit("mental health")), f1_graph) is True
    assert (
        eval_on_f1(BinaryOp("CONTAINS", TextLit("Mental Health"), TextLit("mental health")), f1_graph)
        is False
    )


def test_in_membership(f1_graph):
    lst = ListLit((TextLit("National Institutes of Health"), TextLit("Ford Foundation")))
    assert eval_on_f1(BinaryOp("IN", TextLit("Ford Foundation"), lst), f1_graph) is True
    assert eval_on_f1(BinaryOp("IN", TextLit("NSF"), lst), f1_graph) is False


def test_null_propagation_through_plus(f1_graph):
    # u is not in the binding row, so u.name is null; null + text is null.
    expr = BinaryOp("+", PropRef("u", "name"), TextLit("x"))
    assert eval_on_f1(expr, f1_graph) is None


def test_comparison_on_null_is_false(f1_graph):
    expr = BinaryOp("=", PropRef("u", "name"), TextLit("x"))
    assert eval_on_f1(expr, f1_graph) is False
    assert eval_on_f1(BinaryOp("CONTAINS", PropRef("u", "name"), TextLit("x")), f1_graph) is False
    assert (
        eval_on_f1(BinaryOp("IN", PropRef("u", "name"), ListLit((TextLit("x"),))), f1_graph) is False
    )


def test_kind_mix_raises_value_type_error(f1_graph):
    with pytest.raises(ValueTypeError):
        eval_on_f1(BinaryOp("+", TextLit("n"), IntLit(5)), f1_graph)
    with pytest.raises(ValueTypeError):
        eval_on_f1(BinaryOp("<", TextLit("n"), IntLit(5)), f1_graph)


def test_kind_mix_in_filter_drops_row_with_warning(f1_graph):
    ast = parse_ok("MATCH (a:Dataset) WHERE a.name > 5 RETURN a.name")
    table = execute(ast, f1_graph)
    assert table.rows == []
    assert table.eval_warnings == 2  # one per dataset row


def test_integer_comparisons_numeric(f1_graph):
    ast = parse_ok(
        "MATCH (a:Dataset) WHERE a.dataRefCount >= 25 RETURN a.name"
    )
    table = execute(ast, f1_graph)
    assert table.rows == [("Massachusetts Health Reform Survey",)]


def test_and_or_short_circuit(f1_graph):
    # Right side would be a kind error, but the left side decides.
    ast = parse_ok(
        "MATCH (a:Dataset) WHERE a.id = 'D1' AND (a.id = 'none' AND a.name > 5) RETURN a.name"
    )
    table = execute(ast, f1_graph)
    assert table.rows == []
    assert table.eval_warnings == 0


def test_unvalidated_labeled_access_raises_execution_error(f1_graph):
    ast = parse_ok("MATCH (a:Dataset) WHERE a.owner <> 'ICPSR' RETURN a.name")
    with pytest.raises(ExecutionError):
        execute(ast, f1_graph)


def test_unlabeled_access_degrades_to_null(f1_graph):
    ast = parse_ok("MATCH (x) RETURN x.pubRefCount")
    table = execute(ast, f1_graph)
    assert all(row == (None,) for row in table.rows)


# ---------------------------------------------------------------------------
# Matching details
# ---------------------------------------------------------------------------


def test_matched_keys_collects_pre_limit(f1_graph):
    ast = parse_ok("MATCH (a:Dataset) RETURN a.name ORDER BY a.name LIMIT 1")
    table = execute(ast, f1_graph)
    assert len(table.rows) == 1
    assert table.matched_keys == set(f1_graph.label_index["Dataset"])
    assert len(table.row_keys) == 1


def test_row_cap_applies_only_without_limit(f1_graph):
    capped = execute(parse_ok("MATCH (a:Dataset) RETURN a.name"), f1_graph, row_cap=1)
    assert len(capped.rows) == 1
    limited = execute(parse_ok("MATCH (a:Dataset) RETURN a.name LIMIT 2"), f1_graph, row_cap=1)
    assert len(limited.rows) == 2


def test_edge_not_reused_within_path():
    graph, report = load_records(fixture_f1_lines())
    assert report.ok
    # (x)-[:HAS_OWNER]->(o)<-[:HAS_OWNER]-(y): both edges exist only for x != y
    ast = parse_ok(
        "MATCH (x:Dataset)-[:HAS_OWNER]->(o:Owner)<-[:HAS_OWNER]-(y:Dataset) "
        "RETURN x.id, y.id"
    )
    table = execute(ast, graph)
    assert sorted(table.rows) == [("D1", "D2"), ("D2", "D1")]
    oracle = oracle_execute(ast, graph)
    assert Counter(table.rows) == Counter(oracle.rows)


def test_shared_variable_across_patterns(f1_graph):
    ast = parse_ok("MATCH (a:Dataset), (a:Dataset) RETURN a.id")
    table = execute(ast, f1_graph)
    assert sorted(table.rows) == [("D1",), ("D2",)]


def test_anonymous_pattern_multiplicity(f1_graph):
    # Two datasets point at the owner, so the anonymous witness yields two rows.
    ast = parse_ok("MATCH (:Dataset)-[:HAS_OWNER]->(o:Owner) RETURN o.name")
    table = execute(ast, f1_graph)
    assert table.rows == [("HMCA",), ("HMCA",)]


def test_nulls_sort_last_in_both_directions():
    lines = fixture_f1_lines() + [
        '{"type": "publication", "name": "A Paper", "url": "https://doi.org/10.9/p", "pubRefCount": 4}\n'
    ]
    graph, report = load_records(lines)
    assert report.ok
    for direction in ("ASC", "DESC"):
        ast = parse_ok(f"MATCH (n) RETURN n.pubRefCount ORDER BY n.pubRefCount {direction}")
        table = execute(ast, graph)
        values = [row[0] for row in table.rows]
        assert values[-2:] == [None, None]
        assert values[0] == 4


# ---------------------------------------------------------------------------
# Oracle equivalence
# ---------------------------------------------------------------------------


def test_executor_matches_oracle_on_random_pairs():
    rng = random.Random(424242)
    for i in range(150):
        graph = random_graph(rng, max_nodes=30, max_edges=80)
        ast = random_valid_ast(rng, graph.schema)
        assert [d for d in validate(ast, graph.schema) if d.severity == "error"] == []
        table = execute(ast, graph)
        oracle = oracle_execute(ast, graph)
        if ast.order_by or ast.limit is None:
            assert table.rows == oracle.rows, (i, ast)
            assert table.row_keys == oracle.row_keys, (i, ast)
        else:
            assert Counter(table.rows) == Counter(oracle.rows), (i, ast)
        assert table.matched_keys == oracle.matched_keys, (i, ast)


def test_limit_prefix_monotonicity():
    rng = random.Random(777)
    for _ in range(40):
        graph = random_graph(rng, max_nodes=25, max_edges=60)
        ast = random_valid_ast(rng, graph.schema)
        if not ast.order_by:
            continue
        rows_by_limit = {}
        for k in (1, 2, 3, 5, 8):
            limited = dataclasses.replace(ast, limit=k)
            rows_by_limit[k] = execute(limited, graph).rows
        for k in (1, 2, 3, 5):
            assert rows_by_limit[k] == rows_by_limit[8][:k] or (
                len(rows_by_limit[8]) < k and rows_by_limit[k] == rows_by_limit[8]
            )


def test_sort_keys_monotone_over_adjacent_rows():
    rng = random.Random(31)
    checked = 0
    while checked < 30:
        graph = random_graph(rng, max_nodes=25, max_edges=60)
        ast = random_valid_ast(rng, graph.schema)
        if not ast.order_by:
            continue
        checked += 1
        unlimited = dataclasses.replace(
            ast,
            projections=tuple(Projection(expr=k.expr, alias=None) for k in ast.order_by),
            limit=None,
        )
        table = execute(unlimited, graph)
        for prev, cur in zip(table.rows, table.rows[1:]):
            for idx, key in enumerate(ast.order_by):
                a, b = prev[idx], cur[idx]
                if a is None and b is None:
                    continue
                if b is None:
                    break  # nulls last
                if a is None:
                    raise AssertionError("null sorted before a value")
                if a == b:
                    continue
                ordered = a < b if not key.descending else a > b
                assert ordered, (table.rows, ast.order_by)
                break


def test_null_never_admitted_by_comparison_filters():
    rng = random.Random(5150)
    for _ in range(30):
        graph = random_graph(rng, max_nodes=20, max_edges=40)
        # unlabeled variable: pubRefCount is absent on most labels
        ast = parse_ok("MATCH (x) WHERE x.pubRefCount >= 0 RETURN x.pubRefCount")
        table = execute(ast, graph)
        assert all(row[0] is not None for row in table.rows)
