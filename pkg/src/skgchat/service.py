"""HTTP service exposing the chat pipeline over one published graph.

Translation or validation failures are results, not transport faults: they
come back as HTTP 200 turns carrying an error field and the diagnostics, so
the client can keep showing the generated query. Only backend transport
failures map to 502 and empty questions to 400.

Sessions are in-memory ring buffers of the last 50 turns; a restart drops
them. The graph is immutable once the app is created, so request handling
needs no graph locking.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import ServiceConfig
from .graph import PropertyGraph, UnknownNode
from .pipeline import ChatTurn, NotADataset, chat_turn, subgraph_for
from .schema import SchemaDef
from .translator import BackendError, Exemplar, TranslationBackend, load_exemplars

SESSION_CAPACITY = 50


@dataclass
class Session:
    session_id: str
    turns: deque[ChatTurn] = field(default_factory=lambda: deque(maxlen=SESSION_CAPACITY))
    next_turn_id: int = 1


class SessionStore:
    """Thread-safe map of session id to ring buffer; appends are atomic."""

    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def append(self, session_id: str, make_turn) -> ChatTurn:
        with self._lock:
            session = self._sessions.setdefault(session_id, Session(session_id))
            turn_id = session.next_turn_id
            session.next_turn_id += 1
        turn = make_turn(turn_id)
        with self._lock:
            session.turns.append(turn)
        return turn

    def turns(self, session_id: str) -> list[ChatTurn]:
        with self._lock:
            session = self._sessions.get(session_id)
            return list(session.turns) if session else []


class ChatRequest(BaseModel):
    session_id: str
    question: str


def create_app(
    graph: PropertyGraph,
    backend: TranslationBackend,
    schema: SchemaDef | None = None,
    exemplars: Sequence[Exemplar] | None = None,
    config: ServiceConfig | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    schema = schema if schema is not None else graph.schema
    config = config if config is not None else ServiceConfig()
    if exemplars is None:
        exemplars = load_exemplars()
    sessions = SessionStore()
    app = FastAPI(title="skgchat")

    @app.post("/api/chat")
    def api_chat(request: ChatRequest) -> JSONResponse:
        question = request.question.strip()
        if not question:
            raise HTTPException(status_code=400, detail="question must be nonempty")
        try:
            turn = sessions.append(
                request.session_id,
                lambda turn_id: chat_turn(
                    question,
                    graph,
                    backend,
                    schema=schema,
                    exemplars=exemplars,
                    config=config,
                    turn_id=turn_id,
                ),
            )
        except BackendError as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        return JSONResponse(turn.to_json())

    @app.get("/api/session/{session_id}")
    def api_session(session_id: str) -> JSONResponse:
        return JSONResponse({"turns": [t.to_json() for t in sessions.turns(session_id)]})

    @app.get("/api/schema")
    def api_schema() -> JSONResponse:
        return JSONResponse(
            {
                "labels": list(schema.labels),
                "properties_per_label": {
                    label: dict(props) for label, props in schema.properties_per_label.items()
                },
                "rel_types": {
                    rel: {"source": src, "target": tgt}
                    for rel, (src, tgt) in schema.rel_types.items()
                },
            }
        )

    @app.get("/api/subgraph")
    def api_subgraph(ids: str = "") -> JSONResponse:
        wanted = [part.strip() for part in ids.split(",") if part.strip()]
        if not wanted:
            raise HTTPException(status_code=400, detail="ids query parameter is required")
        keys = []
        for dataset_id in wanted:
            key = graph.dataset_id_index.get(dataset_id)
            if key is None:
                raise HTTPException(status_code=404, detail=f"unknown dataset id {dataset_id!r}")
            keys.append(key)
        try:
            viz = subgraph_for(graph, keys)
        except (UnknownNode, NotADataset) as exc:  # pragma: no cover - ids resolve to datasets
            raise HTTPException(status_code=404, detail=str(exc))
        return JSONResponse(viz.to_json())

    @app.get("/api/health")
    def api_health() -> JSONResponse:
        return JSONResponse({"status": "ok", "nodes": len(graph.nodes), "edges": len(graph.edges)})

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
