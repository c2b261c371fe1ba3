"""Load JSON Lines metadata records into a schema-conformant property graph.

One record per line, discriminated by a "type" field:

    {"type":"dataset","id":T,"name":T,"date":"YYYY-MM-DD","url":T,
     "totalUserCount":N,"dataUserCount":N,"dataRefCount":N}
    {"type":"publication","name":T,"url":T,"pubRefCount":N}
    {"type":"owner"|"funder"|"series"|"location"|"term","name":T}
    {"type":"edge","from_dataset":T,"rel":"HAS_OWNER"|...,"to_label":T,"to_name":T}

Non-dataset nodes are identified by (label, normalized name), so attribute
nodes referenced by several datasets are shared rather than duplicated.
Edge records may reference attribute nodes that have no standalone record
line; those are created implicitly. A dataset edge referencing an unknown
dataset id is an error, because dataset attributes cannot be defaulted.

Any error aborts the load: no partial graph is returned. Warnings (count
ordering, year-only dates, unknown fields, duplicate records) do not.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from .graph import PropertyGraph
from .schema import DATASET, SchemaDef, default_schema

ATTRIBUTE_LABELS = {
    "publication": "Publication",
    "owner": "Owner",
    "funder": "Funder",
    "series": "Series",
    "location": "Location",
    "term": "Term",
}

# error codes
MALFORMED_LINE = "MALFORMED_LINE"
SCHEMA_VIOLATION = "SCHEMA_VIOLATION"
DUPLICATE_DATASET_ID = "DUPLICATE_DATASET_ID"

# warning codes
COUNT_ORDER = "COUNT_ORDER"
DATE_YEAR_ONLY = "DATE_YEAR_ONLY"
UNKNOWN_FIELD = "UNKNOWN_FIELD"
DUPLICATE_RECORD = "DUPLICATE_RECORD"
DUPLICATE_EDGE = "DUPLICATE_EDGE"
IMPLICIT_PUBLICATION = "IMPLICIT_PUBLICATION"


class UnknownAttributeLabel(Exception):
    """upsert called with a label outside the attribute label set."""


@dataclass(frozen=True)
class LineNote:
    line: int
    code: str
    message: str


@dataclass
class IngestReport:
    datasets_loaded: int = 0
    publications_loaded: int = 0
    attribute_nodes_created: int = 0
    attribute_nodes_reused: int = 0
    edges_created: int = 0
    warnings: list[LineNote] = field(default_factory=list)
    errors: list[LineNote] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json(self) -> dict:
        return {
            "datasets_loaded": self.datasets_loaded,
            "publications_loaded": self.publications_loaded,
            "attribute_nodes_created": self.attribute_nodes_created,
            "attribute_nodes_reused": self.attribute_nodes_reused,
            "edges_created": self.edges_created,
            "warnings": [vars(n) for n in self.warnings],
            "errors": [vars(n) for n in self.errors],
        }


def normalize_name(raw: str) -> str:
    """Trim and collapse internal whitespace runs; case is preserved."""
    return " ".join(raw.split())


def upsert_attribute_node(graph: PropertyGraph, label: str, raw_name: str) -> int:
    """Key of the (label, normalized name) node, creating it when absent.

    Implicitly created Publication nodes get an empty url and a zero count.
    """
    if label == DATASET or label not in graph.schema.labels:
        raise UnknownAttributeLabel(f"{label!r} is not an attribute label")
    name = normalize_name(raw_name)
    for key in graph.label_index[label]:
        if graph.nodes[key].properties.get("name") == name:
            return key
    return _create_attribute(graph, label, name)


def _create_attribute(graph: PropertyGraph, label: str, name: str) -> int:
    if label == "Publication":
        return graph.add_node(label, {"name": name, "url": "", "pubRefCount": 0})
    return graph.add_node(label, {"name": name})


@dataclass
class _DatasetRec:
    line: int
    properties: dict


@dataclass
class _AttrRec:
    line: int
    label: str
    properties: dict  # includes normalized "name"


@dataclass
class _EdgeRec:
    line: int
    from_dataset: str
    rel: str
    to_label: str
    to_name: str


def load_records(
    lines: Iterable[str] | IO[str], schema: SchemaDef | None = None
) -> tuple[PropertyGraph | None, IngestReport]:
    """Parse the record stream and build a graph.

    Returns ``(graph, report)``; the graph is None when the report carries
    errors. Blank lines are skipped.
    """
    schema = schema if schema is not None else default_schema()
    report = IngestReport()
    datasets: list[_DatasetRec] = []
    attributes: list[_AttrRec] = []
    edge_records: list[_EdgeRec] = []
    seen_dataset_ids: set[str] = set()

    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            report.errors.append(LineNote(lineno, MALFORMED_LINE, f"invalid JSON: {exc.msg}"))
            continue
        if not isinstance(record, dict):
            report.errors.append(LineNote(lineno, MALFORMED_LINE, "record is not a JSON object"))
            continue
        rtype = record.get("type")
        if rtype == "dataset":
            _parse_dataset(record, lineno, schema, seen_dataset_ids, datasets, report)
        elif rtype in ATTRIBUTE_LABELS:
            _parse_attribute(record, rtype, lineno, attributes, report)
        elif rtype == "edge":
            _parse_edge(record, lineno, schema, edge_records, report)
        else:
            report.errors.append(
                LineNote(lineno, MALFORMED_LINE, f"unknown record type {rtype!r}")
            )

    for edge in edge_records:
        if edge.from_dataset not in seen_dataset_ids:
            report.errors.append(
                LineNote(
                    edge.line,
                    SCHEMA_VIOLATION,
                    f"edge references unknown dataset id {edge.from_dataset!r}",
                )
            )

    if report.errors:
        report.errors.sort(key=lambda n: n.line)
        return None, report

    graph = PropertyGraph(schema)
    attr_keys: dict[tuple[str, str], int] = {}
    reused: set[int] = set()

    for rec in datasets:
        graph.add_node(DATASET, rec.properties)
        report.datasets_loaded += 1

    for rec in attributes:
        ident = (rec.label, rec.properties["name"])
        existing = attr_keys.get(ident)
        if existing is not None:
            reused.add(existing)
            report.warnings.append(
                LineNote(
                    rec.line,
                    DUPLICATE_RECORD,
                    f"{rec.label} {rec.properties['name']!r} already recorded; first record wins",
                )
            )
            continue
        if rec.label == "Publication":
            key = graph.add_node("Publication", rec.properties)
            report.publications_loaded += 1
        else:
            key = graph.add_node(rec.label, rec.properties)
            report.attribute_nodes_created += 1
        attr_keys[ident] = key

    for rec in edge_records:
        source = graph.dataset_id_index[rec.from_dataset]
        ident = (rec.to_label, normalize_name(rec.to_name))
        target = attr_keys.get(ident)
        if target is None:
            target = _create_attribute(graph, rec.to_label, ident[1])
            attr_keys[ident] = target
            if rec.to_label == "Publication":
                report.publications_loaded += 1
                report.warnings.append(
                    LineNote(
                        rec.line,
                        IMPLICIT_PUBLICATION,
                        f"publication {ident[1]!r} created from an edge record with "
                        "empty url and zero citation count",
                    )
                )
            else:
                report.attribute_nodes_created += 1
        else:
            reused.add(target)
        if graph.add_edge(source, rec.rel, target):
            report.edges_created += 1
        else:
            report.warnings.append(
                LineNote(
                    rec.line,
                    DUPLICATE_EDGE,
                    f"duplicate edge {rec.from_dataset} {rec.rel} {ident[1]!r} ignored",
                )
            )

    report.attribute_nodes_reused = len(reused)
    report.warnings.sort(key=lambda n: n.line)
    return graph, report


# --------------------------------------------------------------------------
# Per-record parsing
# --------------------------------------------------------------------------


def _check_unknown_fields(
    record: dict, known: set[str], lineno: int, report: IngestReport
) -> None:
    extra = sorted(set(record) - known)
    if extra:
        report.warnings.append(
            LineNote(lineno, UNKNOWN_FIELD, f"ignoring unknown fields: {', '.join(extra)}")
        )


def _require_text(record: dict, name: str, lineno: int, report: IngestReport) -> str | None:
    value = record.get(name)
    if not isinstance(value, str):
        report.errors.append(
            LineNote(lineno, MALFORMED_LINE, f"field {name!r} must be a string")
        )
        return None
    return value


def _require_count(record: dict, name: str, lineno: int, report: IngestReport) -> int | None:
    value = record.get(name)
    if isinstance(value, bool) or not isinstance(value, int):
        report.errors.append(
            LineNote(lineno, MALFORMED_LINE, f"field {name!r} must be an integer")
        )
        return None
    if value < 0:
        report.errors.append(
            LineNote(lineno, SCHEMA_VIOLATION, f"field {name!r} must be >= 0, got {value}")
        )
        return None
    return value


def _parse_date(raw: str, lineno: int, report: IngestReport) -> dt.date | None:
    if len(raw) == 4 and raw.isdigit():
        report.warnings.append(
            LineNote(
                lineno,
                DATE_YEAR_ONLY,
                f"year-only date {raw!r} canonicalized to {raw}-01-01",
            )
        )
        return dt.date(int(raw), 1, 1)
    try:
        return dt.date.fromisoformat(raw)
    except ValueError:
        report.errors.append(
            LineNote(lineno, SCHEMA_VIOLATION, f"invalid date {raw!r}; expected YYYY-MM-DD")
        )
        return None


def _parse_dataset(
    record: dict,
    lineno: int,
    schema: SchemaDef,
    seen_ids: set[str],
    out: list[_DatasetRec],
    report: IngestReport,
) -> None:
    known = {"type", "id", "name", "date", "url", "totalUserCount", "dataUserCount", "dataRefCount"}
    _check_unknown_fields(record, known, lineno, report)
    dataset_id = _require_text(record, "id", lineno, report)
    name = _require_text(record, "name", lineno, report)
    url = _require_text(record, "url", lineno, report)
    raw_date = _require_text(record, "date", lineno, report)
    total = _require_count(record, "totalUserCount", lineno, report)
    data_users = _require_count(record, "dataUserCount", lineno, report)
    data_refs = _require_count(record, "dataRefCount", lineno, report)
    if None in (dataset_id, name, url, raw_date, total, data_users, data_refs):
        return
    assert dataset_id is not None and raw_date is not None
    date = _parse_date(raw_date, lineno, report)
    if date is None:
        return
    if dataset_id in seen_ids:
        report.errors.append(
            LineNote(lineno, DUPLICATE_DATASET_ID, f"dataset id {dataset_id!r} already defined")
        )
        return
    seen_ids.add(dataset_id)
    if data_users > total:  # type: ignore[operator]
        report.warnings.append(
            LineNote(
                lineno,
                COUNT_ORDER,
                f"dataUserCount {data_users} exceeds totalUserCount {total}",
            )
        )
    out.append(
        _DatasetRec(
            lineno,
            {
                "id": dataset_id,
                "name": name,
                "date": date,
                "url": url,
                "totalUserCount": total,
                "dataUserCount": data_users,
                "dataRefCount": data_refs,
            },
        )
    )


def _parse_attribute(
    record: dict, rtype: str, lineno: int, out: list[_AttrRec], report: IngestReport
) -> None:
    label = ATTRIBUTE_LABELS[rtype]
    if rtype == "publication":
        known = {"type", "name", "url", "pubRefCount"}
        _check_unknown_fields(record, known, lineno, report)
        name = _require_text(record, "name", lineno, report)
        url = _require_text(record, "url", lineno, report)
        refs = _require_count(record, "pubRefCount", lineno, report)
        if None in (name, url, refs):
            return
        assert name is not None
        out.append(
            _AttrRec(lineno, label, {"name": normalize_name(name), "url": url, "pubRefCount": refs})
        )
        return
    _check_unknown_fields(record, {"type", "name"}, lineno, report)
    name = _require_text(record, "name", lineno, report)
    if name is None:
        return
    out.append(_AttrRec(lineno, label, {"name": normalize_name(name)}))


def _parse_edge(
    record: dict,
    lineno: int,
    schema: SchemaDef,
    out: list[_EdgeRec],
    report: IngestReport,
) -> None:
    known = {"type", "from_dataset", "rel", "to_label", "to_name"}
    _check_unknown_fields(record, known, lineno, report)
    from_dataset = _require_text(record, "from_dataset", lineno, report)
    rel = _require_text(record, "rel", lineno, report)
    to_label = _require_text(record, "to_label", lineno, report)
    to_name = _require_text(record, "to_name", lineno, report)
    if None in (from_dataset, rel, to_label, to_name):
        return
    declared = schema.rel_types.get(rel)  # type: ignore[arg-type]
    if declared is None:
        report.errors.append(LineNote(lineno, SCHEMA_VIOLATION, f"unknown relation {rel!r}"))
        return
    if declared[1] != to_label:
        report.errors.append(
            LineNote(
                lineno,
                SCHEMA_VIOLATION,
                f"{rel} targets {declared[1]}, not {to_label}",
            )
        )
        return
    assert from_dataset is not None and rel is not None and to_label is not None and to_name is not None
    out.append(_EdgeRec(lineno, from_dataset, rel, to_label, to_name))
