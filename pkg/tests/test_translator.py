from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from skgchat.queryast import parse
from skgchat.translator import (
    BackendError,
    EchoBackend,
    EmptyCompletion,
    Exemplar,
    MockBackend,
    RemoteChatBackend,
    RETRY_MARKER,
    build_prompt,
    check_exemplars,
    extract_query,
    load_exemplars,
    schema_summary,
    translate_and_repair,
)

from conftest import EDUCATION_QUERY, FUNDING_QUERY, LOCATION_QUERY

EDUCATION_QUESTION = "What are the most popular datasets about mental health?"
FUNDING_QUESTION = (
    "Which datasets have been funded by the National Institutes of Health or Ford Foundation?"
)
LOCATION_QUESTION = (
    "Which datasets include information from countries in the Middle East, "
    "such as Saudi Arabia or Iran?"
)


# ---------------------------------------------------------------------------
# Exemplars
# ---------------------------------------------------------------------------


def test_default_exemplars_all_parse():
    exemplars = load_exemplars()
    check_exemplars(exemplars)
    assert len(exemplars) >= 4


def test_owner_filter_exemplar_ships_in_both_forms():
    exemplars = load_exemplars()
    owner_pairs = [e for e in exemplars if "ICPSR" in e.question]
    assert len(owner_pairs) == 2
    inactive = [e for e in owner_pairs if not e.active]
    active = [e for e in owner_pairs if e.active]
    assert len(inactive) == 1 and "a.owner" in inactive[0].query
    assert len(active) == 1 and "HAS_OWNER" in active[0].query


# ---------------------------------------------------------------------------
# Prompt construction
# ---------------------------------------------------------------------------


def test_schema_summary_mentions_each_label_and_rel_exactly_once(schema):
    summary = schema_summary(schema)
    for label in schema.labels:
        assert summary.count(label) == 1, label
    for rel in schema.rel_types:
        assert summary.count(rel) == 1, rel


def test_prompt_contains_all_parts_in_order(schema):
    exemplar = Exemplar(question="Who owns D1?", query="MATCH (a:Dataset) RETURN a.name")
    prompt = build_prompt(schema, [exemplar], "What is new?")
    for label in schema.labels:
        assert label in prompt
    for rel in schema.rel_types:
        assert rel in prompt
    assert exemplar.query in prompt
    assert prompt.splitlines()[-1] == "What is new?"
    instruction_at = prompt.find("You translate")
    schema_at = prompt.find("Graph schema.")
    exemplar_at = prompt.find(exemplar.query)
    question_at = prompt.rfind("What is new?")
    assert -1 < instruction_at < schema_at < exemplar_at < question_at


def test_prompt_is_deterministic(schema):
    exemplars = load_exemplars()
    one = build_prompt(schema, exemplars, "Question?")
    two = build_prompt(schema, exemplars, "Question?")
    assert one == two


def test_inactive_exemplars_excluded_from_prompt(schema):
    exemplars = load_exemplars()
    prompt = build_prompt(schema, exemplars, "q?")
    assert "a.owner" not in prompt  # the schema-inconsistent pair stays inactive


def test_empty_question_rejected(schema):
    with pytest.raises(ValueError):
        build_prompt(schema, [], "   ")


# ---------------------------------------------------------------------------
# Completion extraction
# ---------------------------------------------------------------------------

QUERY = "MATCH (a:Dataset) RETURN a.name"

WRAPPERS = [
    ("```\n{q}\n```", QUERY),
    ("```cypher\n{q}\n```", QUERY),
    ("Sure!\n```cypher\n{q}\n```\nHope that helps.", QUERY),
    ("Here is the query: {q}", QUERY),
    ("{q}", QUERY),
    ("  {q}  ", QUERY),
    ("The query you want is\n{q}", QUERY),
    ("match (a:Dataset) return a.name", "match (a:Dataset) return a.name"),
    ("Answer:\nMATCH (a:Dataset)\nRETURN a.name", "MATCH (a:Dataset)\nRETURN a.name"),
    ("no query here at all", "no query here at all"),
    ("```\n\n```\nMATCH (x:Term) RETURN x.name", "MATCH (x:Term) RETURN x.name"),
    # An unclosed fence is not a block; the MATCH-keyword rule applies instead.
    ("unmatched fence ``` but {q} follows", "MATCH (a:Dataset) RETURN a.name follows"),
    ("Query:\n\n{q}\n\nLet me know if you need anything else.",
     "MATCH (a:Dataset) RETURN a.name\n\nLet me know if you need anything else."),
    ("```sql\n{q}\n```", QUERY),
    ("```\n{q}\n```\n```\nMATCH (b:Owner) RETURN b.name\n```", QUERY),
    ("prose before\n```cypher\n{q}\n```\nand MATCH decoys after", QUERY),
    (" leading blank\n\n{q}", QUERY),
    ("THE ANSWER IS MATCH (a:Dataset) RETURN a.name", "MATCH (a:Dataset) RETURN a.name"),
    ("match them up: {q}", "match them up: MATCH (a:Dataset) RETURN a.name"),
    ("{q}\n", QUERY),
]


@pytest.mark.parametrize("template,expected", WRAPPERS)
def test_extraction_rules(template, expected):
    raw = template.format(q=QUERY)
    assert extract_query(raw) == expected.format(q=QUERY)


def test_fenced_block_wins_over_keyword():
    raw = "MATCH early mention\n```\nMATCH (t:Term) RETURN t.name\n```"
    assert extract_query(raw) == "MATCH (t:Term) RETURN t.name"


def test_match_must_be_a_word():
    assert extract_query("mismatched parts") == "mismatched parts"


def test_empty_completion_raises():
    with pytest.raises(EmptyCompletion):
        extract_query("   \n  ")


# ---------------------------------------------------------------------------
# translate_and_repair
# ---------------------------------------------------------------------------


def mock_for_golden():
    return MockBackend(
        {
            EDUCATION_QUESTION: EDUCATION_QUERY,
            FUNDING_QUESTION: FUNDING_QUERY,
            LOCATION_QUESTION: LOCATION_QUERY,
        }
    )


@pytest.mark.parametrize(
    "question,query",
    [
        (EDUCATION_QUESTION, EDUCATION_QUERY),
        (FUNDING_QUESTION, FUNDING_QUERY),
        (LOCATION_QUESTION, LOCATION_QUERY),
    ],
)
def test_golden_questions_translate_first_try(question, query, schema):
    result = translate_and_repair(question, mock_for_golden(), schema)
    assert result.query_text == query
    assert result.attempts == 1
    assert result.diagnostics == []
    assert result.ok


def test_repair_retry_fixes_schema_error(schema):
    backend = MockBackend(
        {
            "Who owns the most datasets?": [
                "MATCH (a:Dataset) WHERE a.owner <> 'ICPSR' RETURN a.name",
                "MATCH (a:Dataset)-[:HAS_OWNER]->(o:Owner) WHERE o.name <> 'ICPSR' RETURN a.name",
            ]
        }
    )
    result = translate_and_repair("Who owns the most datasets?", backend, schema)
    assert result.attempts == 2
    assert result.ok
    assert result.diagnostics == []
    assert "HAS_OWNER" in (result.query_text or "")


def test_still_failing_retry_returns_diagnostics(schema):
    backend = MockBackend({"q?": ["garbage one", "garbage two ("]})
    result = translate_and_repair("q?", backend, schema)
    assert result.attempts == 2
    assert not result.ok
    assert result.query_text is not None
    assert result.diagnostics


def test_never_inconsistent_failure_state(schema):
    backend = MockBackend({"q?": "this does not parse ("})
    result = translate_and_repair("q?", backend, schema)
    assert result.ast is None
    assert result.diagnostics  # a failed parse always carries diagnostics


def test_one_backend_call_on_clean_first_attempt(schema):
    calls = []

    class CountingBackend:
        def complete(self, prompt, timeout):
            calls.append(prompt)
            return "MATCH (a:Dataset) RETURN a.name"

    result = translate_and_repair("anything", CountingBackend(), schema)
    assert result.attempts == 1
    assert len(calls) == 1


def test_pipeline_reproducible_with_mock(schema):
    for _ in range(3):
        one = translate_and_repair(EDUCATION_QUESTION, mock_for_golden(), schema)
        two = translate_and_repair(EDUCATION_QUESTION, mock_for_golden(), schema)
        assert one.query_text == two.query_text
        assert one.attempts == two.attempts
        assert one.diagnostics_json() == two.diagnostics_json()


def test_mock_unknown_question_is_backend_error(schema):
    with pytest.raises(BackendError):
        translate_and_repair("never scripted", MockBackend({}), schema)


def test_mock_retry_detection_is_stateless(schema):
    backend = MockBackend({"q?": ["first", "second"]})
    prompt = build_prompt(schema, [], "q?")
    assert backend.complete(prompt, 1.0) == "first"
    assert backend.complete(prompt, 1.0) == "first"  # no hidden counter
    assert backend.complete(prompt + "\n" + RETRY_MARKER + "\nq?", 1.0) == "second"


def test_echo_backend_round_trips_prompt(schema):
    prompt = build_prompt(schema, [], "hello?")
    assert EchoBackend().complete(prompt, 1.0) == prompt


# ---------------------------------------------------------------------------
# Remote backend over a local HTTP server
# ---------------------------------------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    behavior = "ok"
    last_auth: str | None = None

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        _Handler.last_auth = self.headers.get("Authorization")
        body = json.loads(self.rfile.read(length))
        assert body["temperature"] == 0.0
        assert body["messages"][0]["role"] == "user"
        if self.behavior == "slow":
            time.sleep(1.0)
        if self.behavior == "error":
            self.send_response(500)
            self.end_headers()
            return
        if self.behavior == "malformed":
            payload = b'{"nope": true}'
        else:
            payload = json.dumps(
                {"choices": [{"message": {"content": "MATCH (a:Dataset) RETURN a.name"}}]}
            ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def chat_server():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/v1/chat/completions"
    server.shutdown()


def test_remote_backend_happy_path(chat_server):
    _Handler.behavior = "ok"
    backend = RemoteChatBackend(chat_server, model="test-model")
    assert backend.complete("prompt", timeout=5.0) == "MATCH (a:Dataset) RETURN a.name"


def test_remote_backend_timeout(chat_server):
    _Handler.behavior = "slow"
    backend = RemoteChatBackend(chat_server, model="test-model")
    with pytest.raises(BackendError):
        backend.complete("prompt", timeout=0.1)
    _Handler.behavior = "ok"


def test_remote_backend_http_error(chat_server):
    _Handler.behavior = "error"
    backend = RemoteChatBackend(chat_server, model="test-model")
    with pytest.raises(BackendError):
        backend.complete("prompt", timeout=5.0)
    _Handler.behavior = "ok"


def test_remote_backend_malformed_response(chat_server):
    _Handler.behavior = "malformed"
    backend = RemoteChatBackend(chat_server, model="test-model")
    with pytest.raises(BackendError):
        backend.complete("prompt", timeout=5.0)
    _Handler.behavior = "ok"


def test_remote_backend_requires_url():
    with pytest.raises(ValueError):
        RemoteChatBackend("", model="m")


def test_remote_backend_sends_api_key_from_environment(chat_server, monkeypatch):
    _Handler.behavior = "ok"
    backend = RemoteChatBackend(chat_server, model="test-model")
    monkeypatch.delenv("SKGCHAT_API_KEY", raising=False)
    backend.complete("prompt", timeout=5.0)
    assert _Handler.last_auth is None
    monkeypatch.setenv("SKGCHAT_API_KEY", "sk-test-123")
    backend.complete("prompt", timeout=5.0)
    assert _Handler.last_auth == "Bearer sk-test-123"
