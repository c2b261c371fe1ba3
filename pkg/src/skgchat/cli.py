"""Command line: ingest records, serve the API, and run one-shot queries.

Subcommands:
    ingest  records.jsonl --out snapshot.jsonl
    serve   --db snapshot --backend mock:file|remote|echo --listen addr:port
    query   --db snapshot 'MATCH ...'
    ask     --db snapshot --backend ... 'question'
    eval    --db snapshot --backend ... --corpus cases.jsonl
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ServiceConfig, load_service_config
from .evaluation import load_corpus_file, run_eval
from .executor import ExecutionError, execute
from .graph import PropertyGraph
from .pipeline import chat_turn
from .queryast import parse
from .snapshot import load_snapshot
from .translator import (
    BackendError,
    EchoBackend,
    MockBackend,
    RemoteChatBackend,
    check_exemplars,
    load_exemplars,
)
from .validator import validate


def make_backend(spec: str, config: ServiceConfig):
    """Backend from a CLI spec: ``mock:<file>``, ``remote``, or ``echo``."""
    if spec.startswith("mock:"):
        return MockBackend.from_file(spec[len("mock:") :])
    if spec == "remote":
        return RemoteChatBackend(
            base_url=config.backend_base_url,
            model=config.model,
            max_concurrent=config.max_concurrent_backend_calls,
        )
    if spec == "echo":
        return EchoBackend()
    raise SystemExit(f"unknown backend spec {spec!r}; use mock:<file>, remote, or echo")


def _load_graph(path: str) -> PropertyGraph:
    return load_snapshot(path)


def _add_backend_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", required=True, help="mock:<file>, remote, or echo")
    parser.add_argument("--config", default=None, help="service config JSON file")
    parser.add_argument("--exemplars", default=None, help="exemplar JSON file override")


def cmd_ingest(args: argparse.Namespace) -> int:
    from .ingest import load_records
    from .snapshot import save_snapshot

    with open(args.records, "r", encoding="utf-8") as fh:
        graph, report = load_records(fh)
    for note in report.warnings:
        print(f"warning: line {note.line}: {note.code}: {note.message}", file=sys.stderr)
    if graph is None:
        for note in report.errors:
            print(f"error: line {note.line}: {note.code}: {note.message}", file=sys.stderr)
        return 1
    save_snapshot(graph, args.out)
    print(
        f"loaded {report.datasets_loaded} datasets, "
        f"{report.publications_loaded} publications, "
        f"{report.attribute_nodes_created} attribute nodes "
        f"({report.attribute_nodes_reused} reused), "
        f"{report.edges_created} edges -> {args.out}"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = load_service_config(args.config)
    graph = _load_graph(args.db)
    backend = make_backend(args.backend, config)
    exemplars = load_exemplars(args.exemplars)
    check_exemplars(exemplars)
    host, _, port = args.listen.rpartition(":")
    app = create_app(
        graph,
        backend,
        exemplars=exemplars,
        config=config,
        frontend_dir=args.ui,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    graph = _load_graph(args.db)
    result = parse(args.query)
    if not result.ok:
        for diag in result.diagnostics:
            print(f"parse error: {json.dumps(diag.to_json())}", file=sys.stderr)
        return 1
    assert result.ast is not None
    diags = validate(result.ast, graph.schema)
    for diag in diags:
        print(f"{diag.severity}: {json.dumps(diag.to_json())}", file=sys.stderr)
    if any(d.severity == "error" for d in diags):
        return 1
    config = load_service_config(args.config) if args.config else ServiceConfig()
    try:
        table = execute(result.ast, graph, row_cap=config.row_cap)
    except ExecutionError as exc:
        print(f"execution error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps({"columns": table.columns, "rows": table.rows_json()}))
        return 0
    _print_aligned(table.columns, table.rows_json())
    return 0


def _print_aligned(columns: list[str], rows: list[list[object]]) -> None:
    def show(value: object) -> str:
        return "null" if value is None else str(value)

    cells = [columns] + [[show(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    for row in cells:
        print("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())


def cmd_ask(args: argparse.Namespace) -> int:
    config = load_service_config(args.config)
    graph = _load_graph(args.db)
    backend = make_backend(args.backend, config)
    exemplars = load_exemplars(args.exemplars)
    try:
        turn = chat_turn(
            args.question, graph, backend, exemplars=exemplars, config=config
        )
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(turn.to_json(), ensure_ascii=False, indent=2))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    config = load_service_config(args.config)
    graph = _load_graph(args.db)
    backend = make_backend(args.backend, config)
    exemplars = load_exemplars(args.exemplars)
    corpus = load_corpus_file(args.corpus)
    report, outcomes = run_eval(
        corpus, graph, backend, exemplars=exemplars, config=config
    )
    print(report.render_text())
    if args.json:
        payload = {
            "report": report.to_json(),
            "outcomes": [o.to_json() for o in outcomes],
        }
        Path(args.json).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    if args.min_rate is not None and report.overall_rate_percent < args.min_rate:
        print(
            f"overall rate {report.overall_rate_percent}% is below --min-rate {args.min_rate}",
            file=sys.stderr,
        )
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skgchat")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load records and write a snapshot")
    p_ingest.add_argument("records")
    p_ingest.add_argument("--out", required=True)
    p_ingest.set_defaults(func=cmd_ingest)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--db", required=True)
    _add_backend_args(p_serve)
    p_serve.add_argument("--listen", default="127.0.0.1:8000")
    p_serve.add_argument("--ui", default=None, help="directory of built UI assets")
    p_serve.set_defaults(func=cmd_serve)

    p_query = sub.add_parser("query", help="run one query against a snapshot")
    p_query.add_argument("--db", required=True)
    p_query.add_argument("--config", default=None)
    p_query.add_argument("--json", action="store_true")
    p_query.add_argument("query")
    p_query.set_defaults(func=cmd_query)

    p_ask = sub.add_parser("ask", help="translate and answer one question")
    p_ask.add_argument("--db", required=True)
    _add_backend_args(p_ask)
    p_ask.add_argument("question")
    p_ask.set_defaults(func=cmd_ask)

    p_eval = sub.add_parser("eval", help="run a question corpus and report pass rates")
    p_eval.add_argument("--db", required=True)
    _add_backend_args(p_eval)
    p_eval.add_argument("--corpus", required=True)
    p_eval.add_argument("--min-rate", type=int, default=None)
    p_eval.add_argument("--json", default=None, help="write the machine report here")
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
