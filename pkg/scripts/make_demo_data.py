#!/usr/bin/env python3
"""Regenerate the shipped demo data: records, sample corpus, mock completions.

The demo graph is a small, hand-designed archive slice (health, education,
and regional studies) sized so every sample question has interesting
answers. Expected-row oracles in the corpus are frozen from an execution
against the freshly built graph, so the files stay mutually consistent.

Run from the repository root:  python3 scripts/make_demo_data.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from skgchat.executor import execute  # noqa: E402
from skgchat.ingest import load_records  # noqa: E402
from skgchat.queryast import parse  # noqa: E402
from skgchat.validator import validate  # noqa: E402

DATA_DIR = ROOT / "src" / "skgchat" / "data"

DATASETS = [
    # id, name, date, users(total, data), refs, owner, funders, series, locations, terms, pubs
    ("D01", "American Health Values Survey", "2018-06-29", 420, 180, 12, "HMCA",
     ["Robert Wood Johnson Foundation"], "Health Values Studies",
     ["United States"], ["health care access", "public opinion"], ["Values and Care Outcomes"]),
    ("D02", "Massachusetts Health Reform Survey", "2019-03-14", 310, 95, 25, "HMCA",
     ["Robert Wood Johnson Foundation"], "Health Reform Monitoring",
     ["Massachusetts", "United States"], ["health care access", "insurance coverage"],
     ["Reform and Coverage Trends"]),
    ("D03", "National Survey on Mental Health and Aging", "2020-11-02", 940, 410, 48, "ICPSR",
     ["National Institutes of Health"], "Aging Studies",
     ["United States"], ["mental health", "aging"], ["Aging Minds Report", "Later Life Wellbeing"]),
    ("D04", "Adolescent Mental Health in Urban Schools", "2021-04-19", 1280, 720, 36, "ICPSR",
     ["National Institutes of Health", "Ford Foundation"], "Youth Studies",
     ["United States"], ["mental health", "education outcomes"], ["Classrooms and Wellbeing"]),
    ("D05", "Teacher Preparation and Education Policy Study", "2019-08-01", 530, 260, 17, "ICPSR",
     ["Spencer Foundation"], "Education Surveys",
     ["United States"], ["education outcomes", "teacher training"], []),
    ("D06", "Gulf Region Social Attitudes Survey", "2020-02-10", 460, 150, 22, "ICPSR",
     ["Ford Foundation"], "Regional Attitudes",
     ["Saudi Arabia", "Middle East"], ["public opinion", "social attitudes"],
     ["Attitudes Across the Gulf"]),
    ("D07", "Iran Household Economics Panel", "2017-10-21", 380, 120, 31, "Urban Institute",
     ["Ford Foundation"], "Regional Attitudes",
     ["Iran", "Middle East"], ["household economics"], ["Household Budgets in Iran"]),
    ("D08", "Middle East Education Access Study", "2022-01-30", 275, 90, 8, "Urban Institute",
     ["National Science Foundation"], "Education Surveys",
     ["Middle East"], ["education outcomes", "access to education"], []),
    ("D09", "Substance Use and Mental Health Services Census", "2021-09-12", 1675, 830, 57, "ICPSR",
     ["National Institutes of Health"], "Health Services",
     ["United States"], ["mental health", "substance abuse"],
     ["Service Deserts", "Treatment Capacity Atlas"]),
    ("D10", "Rural Aging and Care Networks Study", "2018-12-05", 240, 70, 9, "HMCA",
     ["Robert Wood Johnson Foundation"], "Aging Studies",
     ["United States"], ["aging", "care networks"], []),
    ("D11", "Saudi Arabia Labor Market Survey", "2021-06-08", 190, 45, 5, "Urban Institute",
     ["National Science Foundation"], "Regional Attitudes",
     ["Saudi Arabia"], ["labor markets"], []),
    ("D12", "School Climate and Student Mental Health Panel", "2022-05-23", 860, 390, 14, "ICPSR",
     ["Spencer Foundation", "National Institutes of Health"], "Youth Studies",
     ["United States"], ["mental health", "education outcomes", "school climate"],
     ["Climate and Coping in Schools"]),
]

PUBLICATION_REFS = {
    "Values and Care Outcomes": 19,
    "Reform and Coverage Trends": 33,
    "Aging Minds Report": 41,
    "Later Life Wellbeing": 12,
    "Classrooms and Wellbeing": 27,
    "Attitudes Across the Gulf": 9,
    "Household Budgets in Iran": 15,
    "Service Deserts": 52,
    "Treatment Capacity Atlas": 23,
    "Climate and Coping in Schools": 7,
}


def build_records() -> list[str]:
    lines: list[dict] = []
    publications: set[str] = set()
    for (did, name, date, total, data_users, refs, owner, funders, series,
         locations, terms, pubs) in DATASETS:
        lines.append(
            {
                "type": "dataset",
                "id": did,
                "name": name,
                "date": date,
                "url": f"https://doi.org/10.3886/E2{did[1:]}",
                "totalUserCount": total,
                "dataUserCount": data_users,
                "dataRefCount": refs,
            }
        )
        publications.update(pubs)
    for title in sorted(publications):
        lines.append(
            {
                "type": "publication",
                "name": title,
                "url": f"https://doi.org/10.7/{title.lower().replace(' ', '-')}",
                "pubRefCount": PUBLICATION_REFS[title],
            }
        )
    for (did, _, _, _, _, _, owner, funders, series, locations, terms, pubs) in DATASETS:
        def edge(rel: str, label: str, name: str) -> dict:
            return {
                "type": "edge",
                "from_dataset": did,
                "rel": rel,
                "to_label": label,
                "to_name": name,
            }

        lines.append(edge("HAS_OWNER", "Owner", owner))
        for funder in funders:
            lines.append(edge("HAS_FUNDER", "Funder", funder))
        lines.append(edge("HAS_SERIES", "Series", series))
        for location in locations:
            lines.append(edge("HAS_LOCATION", "Location", location))
        for term in terms:
            lines.append(edge("HAS_TERM", "Term", term))
        for pub in pubs:
            lines.append(edge("HAS_PUBLICATION", "Publication", pub))
    return [json.dumps(line) for line in lines]


LINK_RETURN = "RETURN a.name + ' LINK: ' + a.url AS response"

# (stakeholder, question, completion(s), oracle kind)
# completion None means: reuse the expected query text.
CASES = [
    # education
    ("education", "What are the most popular datasets about mental health?",
     f"MATCH (a:Dataset)-[:HAS_TERM]->(t:Term) WHERE t.name CONTAINS 'mental health' {LINK_RETURN} ORDER BY a.dataUserCount DESC LIMIT 3",
     "rows_ordered"),
    ("education", "Which datasets cover education outcomes?",
     f"MATCH (a:Dataset)-[:HAS_TERM]->(t:Term) WHERE t.name = 'education outcomes' {LINK_RETURN} ORDER BY a.date DESC LIMIT 3",
     "rows_ordered"),
    ("education", "What are the three most cited datasets?",
     f"MATCH (a:Dataset) {LINK_RETURN} ORDER BY a.dataRefCount DESC LIMIT 3",
     "rows_ordered"),
    ("education", "Which datasets are in the Youth Studies series?",
     f"MATCH (a:Dataset)-[:HAS_SERIES]->(s:Series) WHERE s.name = 'Youth Studies' {LINK_RETURN} ORDER BY a.name LIMIT 3",
     "rows_ordered"),
    ("education", "Which datasets about aging are most downloaded?",
     f"MATCH (a:Dataset)-[:HAS_TERM]->(t:Term) WHERE t.name CONTAINS 'aging' {LINK_RETURN} ORDER BY a.dataUserCount DESC LIMIT 3",
     "rows_ordered"),
    ("education", "Which publications cite the school climate panel?",
     "MATCH (a:Dataset)-[:HAS_PUBLICATION]->(p:Publication) WHERE a.name CONTAINS 'School Climate' RETURN p.name ORDER BY p.name LIMIT 3",
     "rows_ordered"),
    ("education", "What are the newest datasets about schools?",
     f"MATCH (a:Dataset)-[:HAS_TERM]->(t:Term) WHERE t.name CONTAINS 'school' {LINK_RETURN} ORDER BY a.date DESC LIMIT 3",
     "rows_ordered"),
    ("education", "Which datasets mention substance abuse?",
     f"MATCH (a:Dataset)-[:HAS_TERM]->(t:Term) WHERE t.name CONTAINS 'substance abuse' {LINK_RETURN} LIMIT 3",
     "rows"),
    ("education", "List datasets with more than 500 data users.",
     "MATCH (a:Dataset) WHERE a.dataUserCount > 500 RETURN a.name ORDER BY a.dataUserCount DESC",
     "rows_ordered"),
    # deliberately broken on both attempts: unparsable output
    ("education", "Show me something fun about datasets?",
     ["Here you go: SELECT * FROM datasets", "I mean: SELECT name FROM datasets"],
     "validity"),
    # funding
    ("funding", "Which datasets have been funded by the National Institutes of Health or Ford Foundation?",
     f"MATCH (a:Dataset)-[:HAS_FUNDER]->(f:Funder) WHERE f.name IN ['National Institutes of Health', 'Ford Foundation'] {LINK_RETURN} ORDER BY a.date DESC LIMIT 3",
     "rows_ordered"),
    ("funding", "What has the Ford Foundation funded?",
     f"MATCH (a:Dataset)-[:HAS_FUNDER]->(f:Funder) WHERE f.name = 'Ford Foundation' {LINK_RETURN} ORDER BY a.name LIMIT 5",
     "rows_ordered"),
    ("funding", "Which funders support mental health data collection?",
     "MATCH (f:Funder)<-[:HAS_FUNDER]-(a:Dataset)-[:HAS_TERM]->(t:Term) WHERE t.name CONTAINS 'mental health' RETURN f.name ORDER BY f.name LIMIT 5",
     "rows_ordered"),
    ("funding", "How many users downloaded NSF funded datasets?",
     "MATCH (a:Dataset)-[:HAS_FUNDER]->(f:Funder) WHERE f.name = 'National Science Foundation' RETURN a.name, a.dataUserCount ORDER BY a.dataUserCount DESC",
     "rows_ordered"),
    ("funding", "What are the most cited datasets funded by the National Institutes of Health?",
     f"MATCH (a:Dataset)-[:HAS_FUNDER]->(f:Funder) WHERE f.name = 'National Institutes of Health' {LINK_RETURN} ORDER BY a.dataRefCount DESC LIMIT 3",
     "rows_ordered"),
    # two-step repair: first answer filters a.owner, retry corrects it
    ("funding", "What are the top 5 most cited datasets not owned by ICPSR?",
     ["MATCH (a:Dataset) WHERE a.owner <> 'ICPSR' RETURN a.name + ' LINK: ' + a.url AS response ORDER BY a.dataRefCount DESC LIMIT 5",
      "MATCH (a:Dataset)-[:HAS_OWNER]->(o:Owner) WHERE o.name <> 'ICPSR' RETURN a.name + ' LINK: ' + a.url AS response ORDER BY a.dataRefCount DESC LIMIT 5"],
     "rows_ordered"),
    # stays broken: schema violation on both attempts
    ("funding", "Which agencies increased their data budgets last year?",
     ["MATCH (a:Dataset)-[:HAS_BUDGET]->(b:Budget) RETURN b.name",
      "MATCH (a:Dataset)-[:HAS_BUDGET]->(b:Budget) RETURN b.name LIMIT 3"],
     "validity"),
    # semantic mismatch: valid query, wrong answer for the question
    ("funding", "Which datasets did the Spencer Foundation fund?",
     f"MATCH (a:Dataset)-[:HAS_FUNDER]->(f:Funder) WHERE f.name = 'Ford Foundation' {LINK_RETURN} ORDER BY a.name LIMIT 5",
     "rows_wrong"),
    ("funding", "Which series have NSF funded datasets?",
     "MATCH (s:Series)<-[:HAS_SERIES]-(a:Dataset)-[:HAS_FUNDER]->(f:Funder) WHERE f.name = 'National Science Foundation' RETURN s.name ORDER BY s.name",
     "rows_ordered"),
    ("funding", "Who funds aging research data?",
     "MATCH (f:Funder)<-[:HAS_FUNDER]-(a:Dataset)-[:HAS_TERM]->(t:Term) WHERE t.name = 'aging' RETURN f.name ORDER BY f.name",
     "rows_ordered"),
    # data management
    ("data_management", "Which datasets include information from countries in the Middle East, such as Saudi Arabia or Iran?",
     f"MATCH (a:Dataset)-[:HAS_LOCATION]->(l:Location) WHERE l.name CONTAINS 'Saudi Arabia' OR l.name CONTAINS 'Iran' OR l.name CONTAINS 'Middle East' {LINK_RETURN} ORDER BY a.date DESC LIMIT 3",
     "rows_ordered"),
    ("data_management", "Which datasets are owned by HMCA?",
     f"MATCH (a:Dataset)-[:HAS_OWNER]->(o:Owner) WHERE o.name = 'HMCA' {LINK_RETURN} ORDER BY a.name LIMIT 5",
     "rows_ordered"),
    ("data_management", "List every owner in the archive.",
     "MATCH (o:Owner) RETURN o.name ORDER BY o.name",
     "rows_ordered"),
    ("data_management", "Which publications cite more than 20 papers?",
     "MATCH (p:Publication) WHERE p.pubRefCount > 20 RETURN p.name, p.pubRefCount ORDER BY p.pubRefCount DESC",
     "rows_ordered"),
    ("data_management", "Which datasets have no more than 100 data users?",
     "MATCH (a:Dataset) WHERE a.dataUserCount <= 100 RETURN a.name ORDER BY a.dataUserCount",
     "rows_ordered"),
    ("data_management", "Which series contain datasets located in the United States?",
     "MATCH (s:Series)<-[:HAS_SERIES]-(a:Dataset)-[:HAS_LOCATION]->(l:Location) WHERE l.name = 'United States' RETURN s.name ORDER BY s.name LIMIT 10",
     "rows_ordered"),
    ("data_management", "Which datasets were released after 2020?",
     "MATCH (a:Dataset) RETURN a.name ORDER BY a.date DESC LIMIT 5",
     "expected_query"),
    ("data_management", "Which locations appear across multiple studies?",
     "MATCH (l:Location)<-[:HAS_LOCATION]-(a:Dataset) RETURN l.name ORDER BY l.name",
     "rows_ordered"),
    ("data_management", "What links the urban institute to regional studies?",
     f"MATCH (a:Dataset)-[:HAS_OWNER]->(o:Owner) WHERE o.name = 'Urban Institute' {LINK_RETURN} ORDER BY a.name LIMIT 5",
     "rows_ordered"),
    # deliberately broken on both attempts: reversed relation
    ("data_management", "Which terms index the archive's most popular datasets?",
     ["MATCH (t:Term)-[:HAS_TERM]->(a:Dataset) RETURN t.name ORDER BY a.dataUserCount DESC LIMIT 3",
      "MATCH (t:Term)-[:HAS_TERM]->(a:Dataset) RETURN t.name LIMIT 3"],
     "validity"),
]


def main() -> None:
    record_lines = build_records()
    graph, report = load_records([line + "\n" for line in record_lines])
    assert report.ok, report.errors
    assert graph is not None

    corpus_lines = []
    completions: dict[str, object] = {}
    counter = {"education": 0, "funding": 0, "data_management": 0}
    for stakeholder, question, completion, kind in CASES:
        counter[stakeholder] += 1
        case_id = f"{stakeholder[:4]}-{counter[stakeholder]:02d}"
        completions[question] = completion
        final_query = completion[-1] if isinstance(completion, list) else completion
        if kind in ("rows", "rows_ordered", "rows_wrong"):
            parsed = parse(final_query)
            assert parsed.ok, (question, parsed.diagnostics)
            errors = [d for d in validate(parsed.ast, graph.schema) if d.severity == "error"]
            assert not errors, (question, errors)
            table = execute(parsed.ast, graph)
            rows = [list(row) for row in table.rows_json()]
            if kind == "rows_wrong":
                rows = rows[1:] + [["Not A Real Study LINK: nowhere"]]
            oracle = {"kind": "expected_rows", "rows": rows, "ordered": kind != "rows"}
        elif kind == "expected_query":
            oracle = {"kind": "expected_query", "query": final_query}
        else:
            oracle = {"kind": "validity_only"}
        corpus_lines.append(
            json.dumps(
                {
                    "id": case_id,
                    "stakeholder": stakeholder,
                    "question": question,
                    "oracle": oracle,
                }
            )
        )

    (DATA_DIR / "demo_records.jsonl").write_text("\n".join(record_lines) + "\n", "utf-8")
    (DATA_DIR / "corpus_sample.jsonl").write_text("\n".join(corpus_lines) + "\n", "utf-8")
    (DATA_DIR / "mock_completions_sample.json").write_text(
        json.dumps(completions, indent=2, ensure_ascii=False) + "\n", "utf-8"
    )
    print(f"wrote {len(record_lines)} records, {len(corpus_lines)} cases, "
          f"{len(completions)} completions")


if __name__ == "__main__":
    main()
