"""Graph persistence as canonically ordered JSON Lines.

The snapshot format is the ingestion record format, re-emitted in canonical
order: all node records first (sorted by label, then name, then dataset
id), then all edge records (sorted by source dataset id, relation type,
target name). Saving a freshly loaded canonical snapshot reproduces it byte
for byte.

Round-tripping preserves graphs up to node-key renaming provided non-Dataset
nodes are unique per (label, normalized name) - which holds for every graph
the loader produces, since that is its identity rule.
"""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

from .graph import NodeRecord, PropertyGraph
from .ingest import load_records
from .schema import DATASET, SchemaDef


class IoFailure(Exception):
    """Snapshot file could not be read or written."""


class CorruptSnapshot(Exception):
    """Snapshot content failed to load; carries the offending line number."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


def _node_record(node: NodeRecord) -> dict:
    props = node.properties
    if node.label == DATASET:
        date = props["date"]
        assert isinstance(date, dt.date)
        return {
            "type": "dataset",
            "id": props["id"],
            "name": props["name"],
            "date": date.isoformat(),
            "url": props["url"],
            "totalUserCount": props["totalUserCount"],
            "dataUserCount": props["dataUserCount"],
            "dataRefCount": props["dataRefCount"],
        }
    if node.label == "Publication":
        return {
            "type": "publication",
            "name": props["name"],
            "url": props["url"],
            "pubRefCount": props["pubRefCount"],
        }
    return {"type": node.label.lower(), "name": props["name"]}


def save_snapshot(graph: PropertyGraph, path: str | Path) -> None:
    """Write the graph as canonical JSON Lines."""
    nodes = sorted(
        graph.nodes.values(),
        key=lambda n: (
            n.label,
            str(n.properties.get("name", "")),
            str(n.properties.get("id", "")),
        ),
    )
    edge_rows = []
    for edge in graph.edges:
        source = graph.nodes[edge.source]
        target = graph.nodes[edge.target]
        edge_rows.append(
            {
                "type": "edge",
                "from_dataset": source.properties["id"],
                "rel": edge.rel_type,
                "to_label": target.label,
                "to_name": target.properties["name"],
            }
        )
    edge_rows.sort(key=lambda r: (r["from_dataset"], r["rel"], r["to_name"]))
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for record in nodes:
                fh.write(json.dumps(_node_record(record), ensure_ascii=False))
                fh.write("\n")
            for row in edge_rows:
                fh.write(json.dumps(row, ensure_ascii=False))
                fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write snapshot {path}: {exc}") from exc


def load_snapshot(path: str | Path, schema: SchemaDef | None = None) -> PropertyGraph:
    """Load a snapshot; raises CorruptSnapshot with the first offending line."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            graph, report = load_records(fh, schema=schema)
    except OSError as exc:
        raise IoFailure(f"cannot read snapshot {path}: {exc}") from exc
    if graph is None:
        first = report.errors[0]
        raise CorruptSnapshot(first.line, f"{first.code}: {first.message}")
    return graph


def snapshot_roundtrip(graph: PropertyGraph, path: str | Path) -> PropertyGraph:
    """Save then reload; the result is equal up to node-key renaming."""
    save_snapshot(graph, path)
    return load_snapshot(path, schema=graph.schema)
