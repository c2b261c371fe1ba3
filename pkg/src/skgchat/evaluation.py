"""Evaluation harness: run a stakeholder-tagged question corpus end to end.

Each case carries one of three oracles. ``expected_rows`` compares executed
rows (order-insensitive unless the case opts into ordering), ``expected_query``
compares ASTs after parse/render canonicalization, and ``validity_only``
defers the semantic judgement to a human. A case passes when its query
parses, validates and executes (syntax) and its semantic check did not fail.

Two-annotator agreement is computed as Krippendorff's alpha for nominal
data via the coincidence-matrix formulation, with the two-coder,
no-missing-data specialization. When every label is identical the expected
disagreement is zero and alpha is undefined, not 1.0.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Hashable, Iterable, Sequence

from .config import ServiceConfig
from .executor import ExecutionError, execute, value_to_json
from .graph import PropertyGraph
from .queryast import parse
from .schema import SchemaDef
from .translator import (
    BackendError,
    Exemplar,
    TranslationBackend,
    translate_and_repair,
)

STAKEHOLDERS = ("education", "funding", "data_management")
STAKEHOLDER_TITLES = {
    "education": "Education",
    "funding": "Funding agency",
    "data_management": "Data management unit",
}

SEMANTIC_MISMATCH = "SEMANTIC_MISMATCH"
EXECUTION_ERROR = "EXECUTION_ERROR"
BACKEND_ERROR = "BACKEND_ERROR"


class CorpusFormatError(Exception):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line


class EmptyAnnotation(Exception):
    """No annotation items to compare."""


# --------------------------------------------------------------------------
# Corpus
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpectedRows:
    rows: tuple[tuple[object, ...], ...]
    ordered: bool = False


@dataclass(frozen=True)
class ValidityOnly:
    pass


@dataclass(frozen=True)
class ExpectedQuery:
    query: str


Oracle = ExpectedRows | ValidityOnly | ExpectedQuery


@dataclass(frozen=True)
class EvalCase:
    id: str
    stakeholder: str
    question: str
    oracle: Oracle


def load_corpus(lines: Iterable[str] | IO[str]) -> list[EvalCase]:
    """JSON Lines corpus; raises CorpusFormatError with the offending line."""
    cases: list[EvalCase] = []
    seen_ids: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(lineno, f"invalid JSON: {exc.msg}")
        if not isinstance(record, dict):
            raise CorpusFormatError(lineno, "case is not a JSON object")
        case_id = record.get("id")
        stakeholder = record.get("stakeholder")
        question = record.get("question")
        oracle_raw = record.get("oracle")
        if not isinstance(case_id, str) or not case_id:
            raise CorpusFormatError(lineno, "missing case id")
        if case_id in seen_ids:
            raise CorpusFormatError(lineno, f"duplicate case id {case_id!r}")
        seen_ids.add(case_id)
        if stakeholder not in STAKEHOLDERS:
            raise CorpusFormatError(lineno, f"unknown stakeholder {stakeholder!r}")
        if not isinstance(question, str) or not question.strip():
            raise CorpusFormatError(lineno, "missing question")
        if not isinstance(oracle_raw, dict):
            raise CorpusFormatError(lineno, "missing oracle object")
        kind = oracle_raw.get("kind")
        oracle: Oracle
        if kind == "expected_rows":
            rows = oracle_raw.get("rows")
            if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise CorpusFormatError(lineno, "expected_rows oracle needs a list of rows")
            oracle = ExpectedRows(
                rows=tuple(tuple(r) for r in rows),
                ordered=bool(oracle_raw.get("ordered", False)),
            )
        elif kind == "validity_only":
            oracle = ValidityOnly()
        elif kind == "expected_query":
            query = oracle_raw.get("query")
            if not isinstance(query, str):
                raise CorpusFormatError(lineno, "expected_query oracle needs query text")
            if not parse(query).ok:
                raise CorpusFormatError(lineno, f"expected query does not parse: {query!r}")
            oracle = ExpectedQuery(query)
        else:
            raise CorpusFormatError(lineno, f"unknown oracle kind {kind!r}")
        cases.append(EvalCase(id=case_id, stakeholder=stakeholder, question=question, oracle=oracle))
    if not cases:
        raise CorpusFormatError(0, "corpus is empty")
    return cases


def load_corpus_file(path: str | Path) -> list[EvalCase]:
    with open(path, "r", encoding="utf-8") as fh:
        return load_corpus(fh)


# --------------------------------------------------------------------------
# Outcomes and report
# --------------------------------------------------------------------------


@dataclass
class CaseOutcome:
    case_id: str
    stakeholder: str
    syntax_pass: bool
    semantic_pass: bool | None  # None = needs a human judgement
    attempts: int
    query_text: str | None
    diagnostics: list[dict]
    failure_codes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.syntax_pass and self.semantic_pass is not False

    def to_json(self) -> dict:
        return {
            "case_id": self.case_id,
            "stakeholder": self.stakeholder,
            "syntax_pass": self.syntax_pass,
            "semantic_pass": self.semantic_pass,
            "attempts": self.attempts,
            "query_text": self.query_text,
            "diagnostics": self.diagnostics,
            "failure_codes": self.failure_codes,
            "passed": self.passed,
        }


def percent(passes: int, total: int) -> int:
    """Whole-percent rate with deterministic half-up rounding."""
    if total == 0:
        return 0
    return int((200 * passes + total) // (2 * total))


@dataclass
class StakeholderStat:
    passes: int = 0
    total: int = 0

    @property
    def rate_percent(self) -> int:
        return percent(self.passes, self.total)


@dataclass
class EvalReport:
    per_stakeholder: dict[str, StakeholderStat]
    overall_passes: int
    overall_total: int
    failure_histogram: dict[str, int]
    examples: dict[str, tuple[str, str]] = field(default_factory=dict)

    @property
    def overall_rate_percent(self) -> int:
        return percent(self.overall_passes, self.overall_total)

    def to_json(self) -> dict:
        return {
            "per_stakeholder": {
                name: {
                    "passes": stat.passes,
                    "total": stat.total,
                    "rate_percent": stat.rate_percent,
                }
                for name, stat in self.per_stakeholder.items()
            },
            "overall": {
                "passes": self.overall_passes,
                "total": self.overall_total,
                "rate_percent": self.overall_rate_percent,
            },
            "failure_histogram": dict(self.failure_histogram),
        }

    def render_text(self) -> str:
        lines = ["Pass rate per stakeholder | Input example | Generated query"]
        for name in STAKEHOLDERS:
            stat = self.per_stakeholder.get(name)
            if stat is None or stat.total == 0:
                continue
            question, query = self.examples.get(name, ("-", "-"))
            lines.append(
                f"{STAKEHOLDER_TITLES[name]}: {stat.passes}/{stat.total} "
                f"({stat.rate_percent}%) | {question} | {query}"
            )
        lines.append(
            f"Overall: {self.overall_passes}/{self.overall_total} "
            f"({self.overall_rate_percent}%)"
        )
        if self.failure_histogram:
            parts = [f"{code} x{count}" for code, count in sorted(self.failure_histogram.items())]
            lines.append("Failures by code: " + ", ".join(parts))
        return "\n".join(lines)


def run_eval(
    corpus: Sequence[EvalCase],
    graph: PropertyGraph,
    backend: TranslationBackend,
    schema: SchemaDef | None = None,
    exemplars: Sequence[Exemplar] | None = None,
    config: ServiceConfig | None = None,
) -> tuple[EvalReport, list[CaseOutcome]]:
    """Evaluate every case and aggregate stakeholder rates and failure codes."""
    if not corpus:
        raise CorpusFormatError(0, "corpus is empty")
    schema = schema if schema is not None else graph.schema
    config = config if config is not None else ServiceConfig()
    outcomes = [
        _run_case(case, graph, backend, schema, exemplars, config)
        for case in sorted(corpus, key=lambda c: c.id)
    ]

    stats = {name: StakeholderStat() for name in STAKEHOLDERS}
    histogram: Counter[str] = Counter()
    examples: dict[str, tuple[str, str]] = {}
    case_by_id = {case.id: case for case in corpus}
    for outcome in outcomes:
        stat = stats[outcome.stakeholder]
        stat.total += 1
        if outcome.passed:
            stat.passes += 1
        else:
            histogram.update(outcome.failure_codes)
        if outcome.stakeholder not in examples:
            examples[outcome.stakeholder] = (
                case_by_id[outcome.case_id].question,
                outcome.query_text or "<no query>",
            )
    report = EvalReport(
        per_stakeholder=stats,
        overall_passes=sum(s.passes for s in stats.values()),
        overall_total=sum(s.total for s in stats.values()),
        failure_histogram=dict(histogram),
        examples=examples,
    )
    return report, outcomes


def _run_case(
    case: EvalCase,
    graph: PropertyGraph,
    backend: TranslationBackend,
    schema: SchemaDef,
    exemplars: Sequence[Exemplar] | None,
    config: ServiceConfig,
) -> CaseOutcome:
    try:
        translation = translate_and_repair(
            case.question, backend, schema, exemplars=exemplars, timeout=config.timeout_seconds
        )
    except BackendError as exc:
        return CaseOutcome(
            case_id=case.id,
            stakeholder=case.stakeholder,
            syntax_pass=False,
            semantic_pass=None if isinstance(case.oracle, ValidityOnly) else False,
            attempts=0,
            query_text=None,
            diagnostics=[{"severity": "error", "code": BACKEND_ERROR, "message": str(exc)}],
            failure_codes=[BACKEND_ERROR],
        )

    outcome = CaseOutcome(
        case_id=case.id,
        stakeholder=case.stakeholder,
        syntax_pass=False,
        semantic_pass=None,
        attempts=translation.attempts,
        query_text=translation.query_text,
        diagnostics=translation.diagnostics_json(),
    )
    if not translation.ok:
        codes = sorted({d["code"] for d in outcome.diagnostics if d.get("severity") == "error"})
        outcome.failure_codes = codes or ["UNKNOWN"]
        if not isinstance(case.oracle, ValidityOnly):
            outcome.semantic_pass = False
        return outcome

    assert translation.ast is not None
    try:
        # Uncapped: semantic comparison must see every row the query yields.
        table = execute(translation.ast, graph, row_cap=None)
    except ExecutionError as exc:
        outcome.failure_codes = [EXECUTION_ERROR]
        outcome.diagnostics.append(
            {"severity": "error", "code": EXECUTION_ERROR, "message": str(exc)}
        )
        if not isinstance(case.oracle, ValidityOnly):
            outcome.semantic_pass = False
        return outcome

    outcome.syntax_pass = True
    if isinstance(case.oracle, ValidityOnly):
        outcome.semantic_pass = None
    elif isinstance(case.oracle, ExpectedQuery):
        expected = parse(case.oracle.query)
        assert expected.ast is not None  # checked at corpus load
        outcome.semantic_pass = expected.ast == translation.ast
    else:
        got = [tuple(value_to_json(v) for v in row) for row in table.rows]
        want = [tuple(row) for row in case.oracle.rows]
        if case.oracle.ordered:
            outcome.semantic_pass = got == want
        else:
            outcome.semantic_pass = Counter(got) == Counter(want)
    if outcome.semantic_pass is False:
        outcome.failure_codes = [SEMANTIC_MISMATCH]
    return outcome


# --------------------------------------------------------------------------
# Inter-annotator agreement
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AgreementReport:
    alpha: float | None  # None when expected disagreement is zero
    n_items: int
    disagreements: int

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "alpha_display": "undefined" if self.alpha is None else f"{self.alpha:.2f}",
            "n_items": self.n_items,
            "disagreements": self.disagreements,
        }


def krippendorff_alpha(pairs: Sequence[tuple[Hashable, Hashable]]) -> AgreementReport:
    """Nominal-data alpha for two coders with no missing labels.

    Builds the coincidence matrix over the paired labels and returns
    1 - observed/expected disagreement; undefined when all labels coincide.
    """
    if not pairs:
        raise EmptyAnnotation("no annotation items")
    for a, b in pairs:
        if a is None or b is None:
            raise EmptyAnnotation("missing labels are not supported")

    coincidence: Counter[tuple[Hashable, Hashable]] = Counter()
    frequencies: Counter[Hashable] = Counter()
    for a, b in pairs:
        coincidence[(a, b)] += 1
        coincidence[(b, a)] += 1
        frequencies[a] += 1
        frequencies[b] += 1

    n = 2 * len(pairs)
    observed = sum(count for (v, u), count in coincidence.items() if v != u) / n
    expected = sum(
        frequencies[v] * frequencies[u]
        for v in frequencies
        for u in frequencies
        if v != u
    ) / (n * (n - 1))
    disagreements = sum(1 for a, b in pairs if a != b)
    if expected == 0:
        return AgreementReport(alpha=None, n_items=len(pairs), disagreements=disagreements)
    return AgreementReport(
        alpha=1.0 - observed / expected, n_items=len(pairs), disagreements=disagreements
    )


def load_annotations(path: str | Path) -> list[tuple[str, str]]:
    """Pair up a JSON annotation file of {case_id, coder, label} entries.

    Every case must be labeled by exactly two coders; pairs come back sorted
    by case id so downstream arithmetic is order-independent.
    """
    raw = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(raw, list):
        raise EmptyAnnotation("annotation file must contain a JSON list")
    by_case: dict[str, dict[str, str]] = {}
    for entry in raw:
        if not isinstance(entry, dict):
            raise EmptyAnnotation("annotation entries must be objects")
        case_id, coder, label = entry.get("case_id"), entry.get("coder"), entry.get("label")
        if not all(isinstance(x, str) and x for x in (case_id, coder, label)):
            raise EmptyAnnotation(f"bad annotation entry: {entry!r}")
        slot = by_case.setdefault(case_id, {})
        if coder in slot:
            raise EmptyAnnotation(f"coder {coder!r} labeled case {case_id!r} twice")
        slot[coder] = label
    pairs: list[tuple[str, str]] = []
    for case_id in sorted(by_case):
        labels = by_case[case_id]
        if len(labels) != 2:
            raise EmptyAnnotation(
                f"case {case_id!r} has {len(labels)} labels; exactly two coders required"
            )
        pairs.append(tuple(labels[c] for c in sorted(labels)))  # type: ignore[arg-type]
    return pairs
