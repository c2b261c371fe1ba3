"""Graph schema declarations and the default dataset-centric schema.

The value domain is deliberately small: text, 64-bit integers, calendar
dates, and null. Counts are kept as exact integers, never floats.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Literal

ValueKind = Literal["text", "integer", "date"]

# Runtime value domain for stored properties and query results.
Value = str | int | dt.date | None

DATASET = "Dataset"


class SchemaError(Exception):
    """Raised when a schema declaration is internally inconsistent."""


@dataclass(frozen=True)
class SchemaDef:
    """Node labels, their typed properties, and directed relation types.

    ``rel_types`` maps a relation name to its (source label, target label)
    pair; every declared property is required on nodes of its label, and
    properties named in ``count_properties`` must be non-negative integers.
    """

    labels: tuple[str, ...]
    properties_per_label: dict[str, dict[str, ValueKind]]
    rel_types: dict[str, tuple[str, str]]
    count_properties: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        label_set = set(self.labels)
        if len(label_set) != len(self.labels):
            raise SchemaError("duplicate labels in schema")
        if set(self.properties_per_label) != label_set:
            raise SchemaError("properties_per_label must cover exactly the declared labels")
        for rel, (src, tgt) in self.rel_types.items():
            if src not in label_set or tgt not in label_set:
                raise SchemaError(f"relation {rel} references undeclared label")

    def has_property(self, label: str, prop: str) -> bool:
        return prop in self.properties_per_label.get(label, {})

    def property_kind(self, label: str, prop: str) -> ValueKind | None:
        return self.properties_per_label.get(label, {}).get(prop)


def default_schema() -> SchemaDef:
    """The shipped schema: Dataset nodes linked outward to six entity types.

    Dataset carries seven attributes (identifier, title, creation date, DOI
    url, and three usage/citation counts); Publication carries a name, url
    and citation count; the remaining labels carry only a name.
    """
    name_only: dict[str, ValueKind] = {"name": "text"}
    return SchemaDef(
        labels=(
            DATASET,
            "Publication",
            "Owner",
            "Funder",
            "Series",
            "Location",
            "Term",
        ),
        properties_per_label={
            DATASET: {
                "id": "text",
                "name": "text",
                "date": "date",
                "url": "text",
                "totalUserCount": "integer",
                "dataUserCount": "integer",
                "dataRefCount": "integer",
            },
            "Publication": {"name": "text", "url": "text", "pubRefCount": "integer"},
            "Owner": dict(name_only),
            "Funder": dict(name_only),
            "Series": dict(name_only),
            "Location": dict(name_only),
            "Term": dict(name_only),
        },
        rel_types={
            "HAS_PUBLICATION": (DATASET, "Publication"),
            "HAS_OWNER": (DATASET, "Owner"),
            "HAS_FUNDER": (DATASET, "Funder"),
            "HAS_SERIES": (DATASET, "Series"),
            "HAS_LOCATION": (DATASET, "Location"),
            "HAS_TERM": (DATASET, "Term"),
        },
        count_properties=frozenset(
            {"totalUserCount", "dataUserCount", "dataRefCount", "pubRefCount"}
        ),
    )
