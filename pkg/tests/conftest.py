from __future__ import annotations

import pytest
from importlib import resources

from skgchat.ingest import load_records
from skgchat.schema import default_schema


def fixture_f1_lines() -> list[str]:
    text = resources.files("skgchat.data").joinpath("fixture_f1.jsonl").read_text("utf-8")
    return text.splitlines(keepends=True)


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture()
def f1_graph():
    graph, report = load_records(fixture_f1_lines())
    assert report.ok, report.errors
    assert graph is not None
    return graph


# Known-good queries shipped as exemplars; used across parser/validator tests.
EDUCATION_QUERY = (
    "MATCH (a:Dataset)-[:HAS_TERM]->(t:Term) WHERE t.name CONTAINS 'mental health' "
    'RETURN a.name + " LINK: " + a.url AS response ORDER BY a.dataUserCount DESC LIMIT 3'
)
FUNDING_QUERY = (
    "MATCH (a:Dataset)-[:HAS_FUNDER]->(f:Funder) "
    'WHERE f.name IN ["National Institutes of Health", "Ford Foundation"] '
    'RETURN a.name + " LINK: " + a.url AS response ORDER BY a.date DESC LIMIT 3'
)
LOCATION_QUERY = (
    "MATCH (a:Dataset)-[:HAS_LOCATION]->(l:Location) "
    "WHERE l.name CONTAINS 'Saudi Arabia' OR l.name CONTAINS 'Iran' "
    "OR l.name CONTAINS 'Middle East' "
    'RETURN a.name + " LINK: " + a.url AS response ORDER BY a.date DESC LIMIT 3'
)
SEED_EXEMPLAR_QUERY = (
    "MATCH (a:Dataset) WHERE a.owner <> 'ICPSR' "
    'RETURN a.name + " LINK: " + a.url AS response ORDER BY a.dataRefCount DESC LIMIT 5'
)

GOLDEN_QUERIES = [EDUCATION_QUERY, FUNDING_QUERY, LOCATION_QUERY, SEED_EXEMPLAR_QUERY]
SCHEMA_VALID_GOLDEN = [EDUCATION_QUERY, FUNDING_QUERY, LOCATION_QUERY]
