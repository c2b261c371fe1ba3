"""Question-to-answer pipeline: translate, validate, execute, extract subgraph.

This module is HTTP-free so the command line can run single questions
without importing the web stack. A ChatTurn is the full record of one
exchange: the question, the generated query and its diagnostics, result
rows, and the visualization subgraph for the datasets visible in those
rows.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Sequence

from .config import ServiceConfig
from .executor import ExecutionError, ResultTable, execute
from .graph import PropertyGraph
from .schema import DATASET, SchemaDef
from .translator import Exemplar, TranslationBackend, translate_and_repair


class NotADataset(Exception):
    """subgraph_for was given a key whose node is not a Dataset."""


@dataclass(frozen=True)
class VizNode:
    key: int
    label: str
    name: str
    shared: bool

    def to_json(self) -> dict:
        return {"key": self.key, "label": self.label, "name": self.name, "shared": self.shared}


@dataclass(frozen=True)
class VizEdge:
    source: int
    target: int
    rel_type: str

    def to_json(self) -> dict:
        return {"from": self.source, "to": self.target, "rel_type": self.rel_type}


@dataclass(frozen=True)
class VizGraph:
    nodes: tuple[VizNode, ...]
    edges: tuple[VizEdge, ...]

    def to_json(self) -> dict:
        return {
            "nodes": [n.to_json() for n in self.nodes],
            "edges": [e.to_json() for e in self.edges],
        }


def subgraph_for(graph: PropertyGraph, dataset_keys: Sequence[int]) -> VizGraph:
    """Ego network of the given datasets plus their attribute nodes.

    An attribute node is flagged shared exactly when it is adjacent to at
    least two of the given datasets; dataset nodes are never flagged.
    """
    ordered: list[int] = []
    seen: set[int] = set()
    for key in dataset_keys:
        record = graph.node(key)
        if record.label != DATASET:
            raise NotADataset(f"node {key} has label {record.label}")
        if key not in seen:
            seen.add(key)
            ordered.append(key)

    attr_degree: dict[int, int] = {}
    edges: list[VizEdge] = []
    for key in ordered:
        for rel, other in graph.neighbors_any(key, "outgoing"):
            attr_degree[other] = attr_degree.get(other, 0) + 1
            edges.append(VizEdge(source=key, target=other, rel_type=rel))

    nodes = [
        VizNode(
            key=key,
            label=DATASET,
            name=str(graph.nodes[key].properties.get("name", "")),
            shared=False,
        )
        for key in ordered
    ]
    for other in sorted(attr_degree):
        record = graph.nodes[other]
        nodes.append(
            VizNode(
                key=other,
                label=record.label,
                name=str(record.properties.get("name", "")),
                shared=attr_degree[other] >= 2,
            )
        )
    edges.sort(key=lambda e: (e.source, e.rel_type, e.target))
    return VizGraph(nodes=tuple(nodes), edges=tuple(edges))


EMPTY_VIZ = VizGraph(nodes=(), edges=())


@dataclass
class ChatTurn:
    turn_id: int
    question: str
    query_text: str | None
    diagnostics: list[dict]
    columns: list[str]
    rows: list[list[object]]
    subgraph: VizGraph
    attempts: int
    error: str | None
    timestamp: str

    def to_json(self) -> dict:
        return {
            "turn_id": self.turn_id,
            "question": self.question,
            "query_text": self.query_text,
            "diagnostics": self.diagnostics,
            "columns": self.columns,
            "rows": self.rows,
            "subgraph": self.subgraph.to_json(),
            "attempts": self.attempts,
            "error": self.error,
            "timestamp": self.timestamp,
        }


def dataset_keys_of(table: ResultTable, graph: PropertyGraph) -> list[int]:
    """Dataset keys visible in the returned rows, in first-appearance order.

    Recovered from the rows' own node bindings rather than by re-running the
    query, so the visualization always agrees with the chat answer.
    """
    ordered: list[int] = []
    seen: set[int] = set()
    for keys in table.row_keys:
        for key in keys:
            if key not in seen and graph.nodes[key].label == DATASET:
                seen.add(key)
                ordered.append(key)
    return ordered


def chat_turn(
    question: str,
    graph: PropertyGraph,
    backend: TranslationBackend,
    schema: SchemaDef | None = None,
    exemplars: Sequence[Exemplar] | None = None,
    config: ServiceConfig | None = None,
    turn_id: int = 1,
) -> ChatTurn:
    """Run one full exchange. BackendError propagates; everything else is a turn."""
    schema = schema if schema is not None else graph.schema
    config = config if config is not None else ServiceConfig()
    timestamp = dt.datetime.now(dt.timezone.utc).isoformat()
    translation = translate_and_repair(
        question, backend, schema, exemplars=exemplars, timeout=config.timeout_seconds
    )
    turn = ChatTurn(
        turn_id=turn_id,
        question=question,
        query_text=translation.query_text,
        diagnostics=translation.diagnostics_json(),
        columns=[],
        rows=[],
        subgraph=EMPTY_VIZ,
        attempts=translation.attempts,
        error=None,
        timestamp=timestamp,
    )
    if not translation.ok:
        turn.error = "translation failed: the generated query did not validate"
        return turn
    assert translation.ast is not None
    try:
        table = execute(translation.ast, graph, row_cap=config.row_cap)
    except ExecutionError as exc:
        turn.error = f"execution failed: {exc}"
        return turn
    turn.columns = table.columns
    turn.rows = table.rows_json()
    turn.subgraph = subgraph_for(graph, dataset_keys_of(table, graph))
    return turn
