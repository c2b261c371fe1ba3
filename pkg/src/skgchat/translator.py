"""Natural-language questions to query text via a pluggable completion backend.

The prompt combines a fixed instruction, a schema summary, engineered
question/query exemplar pairs, and the user question (always the final
line). Whatever the backend returns is run through a fence/keyword
extraction step, parsed, and validated; one repair attempt appends the
failed query and its diagnostics to the prompt and asks again. Backends are
deliberately dumb: one ``complete(prompt, timeout) -> text`` method.

The deterministic mock backend keys on the exact question text (the final
prompt line) and is stateless, so identical questions always produce
identical translations. Scripted retries are supported by mapping a
question to a list of completions; the retry marker embedded in repair
prompts selects the second entry.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Protocol, Sequence

from .queryast import ParseDiagnostic, QueryAst, parse
from .schema import SchemaDef
from .validator import Diagnostic, validate

API_KEY_ENV = "SKGCHAT_API_KEY"

RETRY_MARKER = "The previous attempt produced an invalid query."

INSTRUCTION = (
    "You translate natural language questions about research datasets into "
    "graph queries. Answer with exactly one query and nothing else: no "
    "prose, no code fences. Use only MATCH, WHERE, RETURN, ORDER BY and "
    "LIMIT, and only the node labels, relation types and properties listed "
    "in the schema below. Unless the question asks otherwise, return "
    "a.name + ' LINK: ' + a.url AS response and LIMIT 3."
)


class BackendError(Exception):
    """Transport-level backend failure: timeout, connection, malformed reply."""


class EmptyCompletion(Exception):
    """The backend returned no usable text."""


@dataclass(frozen=True)
class Exemplar:
    question: str
    query: str
    active: bool = True


class TranslationBackend(Protocol):
    def complete(self, prompt: str, timeout: float) -> str: ...


def load_exemplars(path: str | Path | None = None) -> list[Exemplar]:
    """Exemplar pairs from a JSON file, or the packaged defaults."""
    if path is None:
        text = resources.files("skgchat.data").joinpath("exemplars.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    raw = json.loads(text)
    if not isinstance(raw, list):
        raise ValueError("exemplar file must contain a JSON list")
    out = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or "question" not in entry or "query" not in entry:
            raise ValueError(f"exemplar {i}: expected an object with question and query")
        out.append(
            Exemplar(
                question=entry["question"],
                query=entry["query"],
                active=bool(entry.get("active", True)),
            )
        )
    return out


def check_exemplars(exemplars: Sequence[Exemplar]) -> None:
    """Startup check: every shipped exemplar query must parse."""
    for ex in exemplars:
        result = parse(ex.query)
        if not result.ok:
            first = result.diagnostics[0]
            raise ValueError(f"exemplar query for {ex.question!r} does not parse: {first.message}")


def schema_summary(schema: SchemaDef) -> str:
    """Plain-text schema rendering mentioning every label and relation once."""
    lines = ["Graph schema.", "Node labels and their properties:"]
    for label in schema.labels:
        props = ", ".join(
            f"{name} ({kind})" for name, kind in schema.properties_per_label[label].items()
        )
        lines.append(f"- {label}: {props}")
    lines.append("Relation types (direction matters; queries may traverse either way):")
    for rel, (src, tgt) in schema.rel_types.items():
        lines.append(f"- {rel} links a {src.lower()} to a {tgt.lower()}")
    return "\n".join(lines)


@dataclass(frozen=True)
class PromptBundle:
    instruction: str
    schema_summary: str
    exemplars: tuple[Exemplar, ...]
    question: str

    def render(self) -> str:
        parts = [self.instruction, "", self.schema_summary, ""]
        if self.exemplars:
            parts.append("Examples:")
            for ex in self.exemplars:
                parts.append(f"Q: {ex.question}")
                parts.append(f"A: {ex.query}")
            parts.append("")
        parts.append("Translate this question; the question is the final line.")
        parts.append(self.question)
        return "\n".join(parts)


def build_prompt(schema: SchemaDef, exemplars: Sequence[Exemplar], question: str) -> str:
    """Deterministic prompt text for one question. Inactive exemplars are skipped."""
    if not question.strip():
        raise ValueError("question must be nonempty")
    bundle = PromptBundle(
        instruction=INSTRUCTION,
        schema_summary=schema_summary(schema),
        exemplars=tuple(ex for ex in exemplars if ex.active),
        question=question,
    )
    return bundle.render()


_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_MATCH_RE = re.compile(r"\bMATCH\b", re.IGNORECASE)


def extract_query(raw: str) -> str:
    """Pull query text out of a completion.

    Preference order: the first fenced code block; else everything from the
    first MATCH keyword to the end; else the whole text, trimmed.
    """
    if not raw.strip():
        raise EmptyCompletion("backend returned empty text")
    fence = _FENCE_RE.search(raw)
    if fence:
        inner = fence.group(1).strip()
        if inner:
            return inner
    keyword = _MATCH_RE.search(raw)
    if keyword:
        return raw[keyword.start() :].strip()
    return raw.strip()


def _diag_list(
    parse_diags: Sequence[ParseDiagnostic], validation: Sequence[Diagnostic]
) -> list[ParseDiagnostic | Diagnostic]:
    return list(parse_diags) + list(validation)


@dataclass
class TranslationResult:
    query_text: str | None
    ast: QueryAst | None
    diagnostics: list[ParseDiagnostic | Diagnostic]
    attempts: int

    @property
    def ok(self) -> bool:
        return self.ast is not None and not self.has_errors

    @property
    def has_errors(self) -> bool:
        return any(getattr(d, "severity", "error") == "error" for d in self.diagnostics)

    def diagnostics_json(self) -> list[dict]:
        return [d.to_json() for d in self.diagnostics]


def _attempt(raw: str, schema: SchemaDef) -> tuple[str | None, QueryAst | None, list]:
    try:
        query_text = extract_query(raw)
    except EmptyCompletion:
        diag = ParseDiagnostic(
            "EMPTY_COMPLETION", "backend returned no query text", 1, 1, 0, 0
        )
        return None, None, [diag]
    result = parse(query_text)
    if not result.ok:
        return query_text, None, list(result.diagnostics)
    assert result.ast is not None
    return query_text, result.ast, list(validate(result.ast, schema))


def _repair_prompt(base_prompt: str, question: str, failed_query: str | None, diags: list) -> str:
    lines = [base_prompt, "", RETRY_MARKER]
    lines.append(f"Failed query: {failed_query if failed_query else '<none>'}")
    lines.append("Problems:")
    for diag in diags:
        rendered = diag.to_json()
        lines.append(f"- {rendered['code']}: {rendered['message']}")
    lines.append("Answer again with one corrected query only; the question is the final line.")
    lines.append(question)
    return "\n".join(lines)


def translate_and_repair(
    question: str,
    backend: TranslationBackend,
    schema: SchemaDef,
    exemplars: Sequence[Exemplar] | None = None,
    timeout: float = 30.0,
) -> TranslationResult:
    """Translate once, and retry once more when parsing or validation fails.

    Backend transport failures raise BackendError; translation failures are
    returned as a result carrying the last attempt's diagnostics.
    """
    if exemplars is None:
        exemplars = load_exemplars()
    prompt = build_prompt(schema, exemplars, question)
    raw = backend.complete(prompt, timeout)
    query_text, ast, diags = _attempt(raw, schema)
    if ast is not None and not _has_error(diags):
        return TranslationResult(query_text, ast, diags, attempts=1)
    retry = _repair_prompt(prompt, question, query_text, diags)
    raw = backend.complete(retry, timeout)
    query_text, ast, diags = _attempt(raw, schema)
    return TranslationResult(query_text, ast, diags, attempts=2)


def _has_error(diags: list) -> bool:
    return any(getattr(d, "severity", "error") == "error" for d in diags)


# --------------------------------------------------------------------------
# Backends
# --------------------------------------------------------------------------


class MockBackend:
    """Deterministic backend keyed by exact question text.

    The mapping file is a JSON object from question to either one completion
    string or a list of completions; repair prompts (detected by the retry
    marker) read the second list entry. The backend holds no call state, so
    repeated translations of one question are identical.
    """

    def __init__(self, mapping: dict[str, str | list[str]]) -> None:
        self.mapping = dict(mapping)

    @classmethod
    def from_file(cls, path: str | Path) -> "MockBackend":
        raw = json.loads(Path(path).read_text("utf-8"))
        if not isinstance(raw, dict):
            raise ValueError("mock completions file must contain a JSON object")
        return cls(raw)

    def complete(self, prompt: str, timeout: float) -> str:
        question = _last_nonempty_line(prompt)
        entry = self.mapping.get(question)
        if entry is None:
            raise BackendError(f"mock backend has no completion for {question!r}")
        if isinstance(entry, str):
            return entry
        if not entry:
            raise BackendError(f"mock backend entry for {question!r} is empty")
        index = 1 if RETRY_MARKER in prompt else 0
        return entry[min(index, len(entry) - 1)]


def _last_nonempty_line(prompt: str) -> str:
    for line in reversed(prompt.splitlines()):
        if line.strip():
            return line.strip()
    return ""


class EchoBackend:
    """Returns the prompt unchanged; useful for plumbing tests."""

    def complete(self, prompt: str, timeout: float) -> str:
        return prompt


class RemoteChatBackend:
    """Chat-completions client: POST {model, temperature, messages} to a URL.

    The API key is read from the environment; temperature is pinned to 0 so
    repeated calls are as reproducible as the remote model allows. A
    semaphore bounds concurrent in-flight requests.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        temperature: float = 0.0,
        max_concurrent: int = 4,
        client=None,
    ) -> None:
        if not base_url:
            raise ValueError("remote backend requires a base URL")
        self.base_url = base_url
        self.model = model
        self.temperature = temperature
        self._semaphore = threading.Semaphore(max_concurrent)
        self._client = client

    def complete(self, prompt: str, timeout: float) -> str:
        import httpx  # deferred: only the remote backend needs it

        payload = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        with self._semaphore:
            try:
                if self._client is not None:
                    response = self._client.post(
                        self.base_url, json=payload, headers=headers, timeout=timeout
                    )
                else:
                    response = httpx.post(
                        self.base_url, json=payload, headers=headers, timeout=timeout
                    )
            except httpx.HTTPError as exc:
                raise BackendError(f"backend request failed: {exc}") from exc
        if response.status_code != 200:
            raise BackendError(f"backend returned HTTP {response.status_code}")
        try:
            data = response.json()
            content = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed backend response: {exc}") from exc
        if not isinstance(content, str):
            raise BackendError("backend response content is not text")
        return content
