"""Embedded in-memory property graph with label and dataset-id indices.

Schema conformance is enforced at write time, so queries never re-check
property kinds. Node keys are dense integers assigned in insertion order,
and every ordering contract (label index, adjacency lists, edge sequence)
follows insertion order; downstream components rely on this for
deterministic results.

Concurrency: single writer while loading, then publish and treat the graph
as immutable; reads need no locking after that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import datetime as dt

from .schema import DATASET, SchemaDef, Value, default_schema

Direction = Literal["outgoing", "incoming"]


class GraphError(Exception):
    """Base class for graph-store failures."""


class UnknownLabel(GraphError):
    pass


class UnknownProperty(GraphError):
    pass


class MissingRequiredProperty(GraphError):
    pass


class InvalidPropertyValue(GraphError):
    pass


class DuplicateDatasetId(GraphError):
    pass


class UnknownNode(GraphError):
    pass


class UnknownRelType(GraphError):
    pass


class RelTypeLabelMismatch(GraphError):
    pass


@dataclass(slots=True)
class NodeRecord:
    key: int
    label: str
    properties: dict[str, Value]


@dataclass(frozen=True, slots=True)
class EdgeRecord:
    source: int
    rel_type: str
    target: int


class PropertyGraph:
    """Mutable-until-published property graph over a fixed schema."""

    def __init__(self, schema: SchemaDef | None = None) -> None:
        self.schema = schema if schema is not None else default_schema()
        self.nodes: dict[int, NodeRecord] = {}
        self.edges: list[EdgeRecord] = []
        self.label_index: dict[str, list[int]] = {label: [] for label in self.schema.labels}
        self.dataset_id_index: dict[str, int] = {}
        self.outgoing: dict[int, dict[str, list[int]]] = {}
        self.incoming: dict[int, dict[str, list[int]]] = {}
        self._edge_set: set[tuple[int, str, int]] = set()
        self._next_key = 0

    # -- write path ---------------------------------------------------

    def add_node(self, label: str, properties: dict[str, Value]) -> int:
        """Validate and store one node; returns its fresh key.

        Validation happens before any mutation so a rejected insert leaves
        the graph unchanged.
        """
        declared = self.schema.properties_per_label.get(label)
        if declared is None:
            raise UnknownLabel(f"unknown label {label!r}")
        for prop in properties:
            if prop not in declared:
                raise UnknownProperty(f"label {label} has no property {prop!r}")
        for prop in declared:
            if prop not in properties:
                raise MissingRequiredProperty(f"{label} node missing {prop!r}")
        for prop, value in properties.items():
            self._check_value(label, prop, value)
        if label == DATASET:
            dataset_id = properties["id"]
            assert isinstance(dataset_id, str)
            if dataset_id in self.dataset_id_index:
                raise DuplicateDatasetId(f"dataset id {dataset_id!r} already present")

        key = self._next_key
        self._next_key += 1
        self.nodes[key] = NodeRecord(key=key, label=label, properties=dict(properties))
        self.label_index[label].append(key)
        self.outgoing[key] = {}
        self.incoming[key] = {}
        if label == DATASET:
            self.dataset_id_index[properties["id"]] = key  # type: ignore[index]
        return key

    def add_edge(self, source: int, rel_type: str, target: int) -> bool:
        """Store one directed typed edge; returns False when already present."""
        if source not in self.nodes:
            raise UnknownNode(f"no node with key {source}")
        if target not in self.nodes:
            raise UnknownNode(f"no node with key {target}")
        declared = self.schema.rel_types.get(rel_type)
        if declared is None:
            raise UnknownRelType(f"unknown relation type {rel_type!r}")
        src_label, tgt_label = declared
        if self.nodes[source].label != src_label or self.nodes[target].label != tgt_label:
            raise RelTypeLabelMismatch(
                f"{rel_type} requires {src_label}->{tgt_label}, got "
                f"{self.nodes[source].label}->{self.nodes[target].label}"
            )
        triple = (source, rel_type, target)
        if triple in self._edge_set:
            return False
        self._edge_set.add(triple)
        self.edges.append(EdgeRecord(source=source, rel_type=rel_type, target=target))
        self.outgoing[source].setdefault(rel_type, []).append(target)
        self.incoming[target].setdefault(rel_type, []).append(source)
        return True

    # -- read path ----------------------------------------------------

    def node(self, key: int) -> NodeRecord:
        try:
            return self.nodes[key]
        except KeyError:
            raise UnknownNode(f"no node with key {key}") from None

    def has_edge(self, source: int, rel_type: str, target: int) -> bool:
        return (source, rel_type, target) in self._edge_set

    def neighbors(self, key: int, rel_type: str, direction: Direction) -> list[int]:
        """Neighbour keys along ``rel_type`` in insertion order."""
        if key not in self.nodes:
            raise UnknownNode(f"no node with key {key}")
        if rel_type not in self.schema.rel_types:
            raise UnknownRelType(f"unknown relation type {rel_type!r}")
        table = self.outgoing if direction == "outgoing" else self.incoming
        return list(table[key].get(rel_type, ()))

    def neighbors_any(self, key: int, direction: Direction) -> list[tuple[str, int]]:
        """(rel_type, neighbour) pairs over all relation types, insertion order per type."""
        if key not in self.nodes:
            raise UnknownNode(f"no node with key {key}")
        table = self.outgoing if direction == "outgoing" else self.incoming
        out: list[tuple[str, int]] = []
        for rel in self.schema.rel_types:
            for other in table[key].get(rel, ()):
                out.append((rel, other))
        return out

    # -- helpers ------------------------------------------------------

    def _check_value(self, label: str, prop: str, value: Value) -> None:
        kind = self.schema.property_kind(label, prop)
        if kind == "text":
            if not isinstance(value, str):
                raise InvalidPropertyValue(f"{label}.{prop} must be text, got {type(value).__name__}")
        elif kind == "integer":
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidPropertyValue(f"{label}.{prop} must be an integer")
            if prop in self.schema.count_properties and value < 0:
                raise InvalidPropertyValue(f"{label}.{prop} must be >= 0, got {value}")
        elif kind == "date":
            if not isinstance(value, dt.date):
                raise InvalidPropertyValue(f"{label}.{prop} must be a calendar date")
        else:  # pragma: no cover - schema validated at construction
            raise UnknownProperty(f"label {label} has no property {prop!r}")
