#!/usr/bin/env python3
"""End-to-end demo: ingest the sample records, ask a few questions with the
deterministic mock backend, and print the evaluation report.

Run from the repository root:  python3 scripts/run_demo.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from importlib import resources
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from skgchat.evaluation import load_corpus, run_eval  # noqa: E402
from skgchat.ingest import load_records  # noqa: E402
from skgchat.pipeline import chat_turn  # noqa: E402
from skgchat.snapshot import save_snapshot  # noqa: E402
from skgchat.translator import MockBackend  # noqa: E402

QUESTIONS = [
    "What are the most popular datasets about mental health?",
    "Which datasets have been funded by the National Institutes of Health or Ford Foundation?",
    "Which datasets include information from countries in the Middle East, such as Saudi Arabia or Iran?",
    "What are the top 5 most cited datasets not owned by ICPSR?",
]


def main() -> None:
    data = resources.files("skgchat.data")
    records = data.joinpath("demo_records.jsonl").read_text("utf-8").splitlines(keepends=True)
    graph, report = load_records(records)
    assert report.ok and graph is not None
    print(f"ingested demo archive: {len(graph.nodes)} nodes, {len(graph.edges)} edges")

    with tempfile.TemporaryDirectory() as tmp:
        snapshot = Path(tmp) / "demo.snapshot.jsonl"
        save_snapshot(graph, snapshot)
        print(f"snapshot written to {snapshot} ({snapshot.stat().st_size} bytes)\n")

    backend = MockBackend(
        json.loads(data.joinpath("mock_completions_sample.json").read_text("utf-8"))
    )

    for question in QUESTIONS:
        turn = chat_turn(question, graph, backend)
        print(f"Q: {question}")
        print(f"  query: {turn.query_text}")
        print(f"  attempts: {turn.attempts}")
        for row in turn.rows:
            print(f"  row: {row}")
        shared = [n.name for n in turn.subgraph.nodes if n.shared]
        if shared:
            print(f"  shared attribute nodes: {', '.join(shared)}")
        print()

    corpus = load_corpus(data.joinpath("corpus_sample.jsonl").read_text("utf-8").splitlines())
    eval_report, _ = run_eval(corpus, graph, backend)
    print(eval_report.render_text())


if __name__ == "__main__":
    main()
