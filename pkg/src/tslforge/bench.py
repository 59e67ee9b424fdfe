"""Benchmark harness: generation trials, quality metrics, persistence.

Each trial runs the whole pipeline (assemble prompt, call the provider,
extract, parse, validate, compare against the gold specification) and is
persisted as one JSONL record.  Metrics are computed as an order-independent
fold over the records in exact rational arithmetic, so a summary can always
be recomputed offline from the record file, and interrupted runs resume by
skipping (benchmark, variant, trial) triples that already have records.
"""

from __future__ import annotations

import csv
import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from hashlib import sha256
from pathlib import Path
from typing import Iterable, Sequence

from .llm import (
    DEFAULT_MAX_TOKENS,
    DEFAULT_MODEL,
    DEFAULT_TEMPERATURE,
    GenerationRequest,
    Provider,
    ProviderError,
    ProviderErrorKind,
)
from .parser import ParseError, parse_spec
from .prompting import (
    ExtractionError,
    PromptBundle,
    PromptVariant,
    assemble_prompt,
    extract_spec,
    load_bundle,
)
from .semantics import (
    BudgetExceeded,
    EquivalentUpTo,
    EquivVerdict,
    bounded_equiv,
    verdict_from_json,
)
from .signatures import (
    IssueCode,
    ValidationIssue,
    ValidationReport,
    atom_alphabet,
    validate,
)
from .formulas import Span, TslSpec

RECORD_VERSION = 1
ALL_VARIANTS = (
    PromptVariant.FULL,
    PromptVariant.NO_SIGNATURES,
    PromptVariant.SUMMARY_ONLY,
)


@dataclass(frozen=True)
class GenerationSettings:
    model: str = DEFAULT_MODEL
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS


@dataclass(frozen=True)
class BenchmarkCase:
    name: str
    bundle: PromptBundle
    gold: TslSpec
    equiv_bound: int = 4

    def __post_init__(self) -> None:
        report = validate(self.gold, self.bundle.signatures)
        if not report.ok:
            problems = "; ".join(i.message for i in report.issues)
            raise ValueError(f"gold spec for {self.name} does not validate: {problems}")


def load_case(path, equiv_bound: int = 4) -> BenchmarkCase:
    path = Path(path)
    bundle = load_bundle(path)
    gold = parse_spec((path / "gold.tsl").read_text(encoding="utf-8"))
    return BenchmarkCase(bundle.benchmark_name, bundle, gold, equiv_bound)


def discover_cases(root, equiv_bound: int = 4) -> list[BenchmarkCase]:
    root = Path(root)
    cases = []
    for sub in sorted(root.iterdir()):
        if sub.is_dir() and (sub / "gold.tsl").exists():
            cases.append(load_case(sub, equiv_bound))
    return cases


@dataclass
class RunRecord:
    benchmark: str
    variant: str
    trial: int
    prompt_hash: str
    raw_response: str | None = None
    extracted: str | None = None
    parse_ok: bool = False
    validation: ValidationReport | None = None
    equiv: EquivVerdict | None = None
    stage: str = "done"
    provider_error: str | None = None
    wall_ms: int = 0
    timestamp: str = ""

    @property
    def is_provider_error(self) -> bool:
        return self.provider_error is not None

    @property
    def valid(self) -> bool:
        return self.parse_ok and self.validation is not None and self.validation.ok

    @property
    def correct(self) -> bool:
        return isinstance(self.equiv, EquivalentUpTo)

    def to_json(self) -> dict:
        return {
            "v": RECORD_VERSION,
            "benchmark": self.benchmark,
            "variant": self.variant,
            "trial": self.trial,
            "prompt_hash": self.prompt_hash,
            "raw_response": self.raw_response,
            "extracted": self.extracted,
            "parse_ok": self.parse_ok,
            "validation": self.validation.to_json() if self.validation else None,
            "equiv": self.equiv.to_json() if self.equiv else None,
            "stage": self.stage,
            "provider_error": self.provider_error,
            "wall_ms": self.wall_ms,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RunRecord":
        validation = None
        if doc.get("validation") is not None:
            issues = tuple(
                ValidationIssue(
                    IssueCode(i["code"]),
                    i["message"],
                    Span(*i["span"]) if i.get("span") else None,
                )
                for i in doc["validation"]["issues"]
            )
            validation = ValidationReport(issues)
        equiv = verdict_from_json(doc["equiv"]) if doc.get("equiv") else None
        return cls(
            benchmark=doc["benchmark"],
            variant=doc["variant"],
            trial=doc["trial"],
            prompt_hash=doc["prompt_hash"],
            raw_response=doc.get("raw_response"),
            extracted=doc.get("extracted"),
            parse_ok=doc.get("parse_ok", False),
            validation=validation,
            equiv=equiv,
            stage=doc.get("stage", "done"),
            provider_error=doc.get("provider_error"),
            wall_ms=doc.get("wall_ms", 0),
            timestamp=doc.get("timestamp", ""),
        )


def run_trial(
    case: BenchmarkCase,
    variant: PromptVariant,
    trial: int,
    provider: Provider,
    settings: GenerationSettings = GenerationSettings(),
    instructions: str | None = None,
) -> RunRecord:
    """One single-shot generation, classified through the full pipeline.

    Every intermediate failure short-circuits but still yields a complete
    record with the failing stage.  Only ProviderError(Exhausted) is treated
    as a trial-level outcome; other provider errors propagate because they
    indicate misconfiguration rather than a bad generation.
    """
    start = time.perf_counter()
    prompt = assemble_prompt(case.bundle, variant, instructions)
    record = RunRecord(
        benchmark=case.name,
        variant=variant.value,
        trial=trial,
        prompt_hash=sha256(prompt.encode("utf-8")).hexdigest(),
        timestamp=datetime.now(timezone.utc).isoformat(),
    )

    def finish(stage: str) -> RunRecord:
        record.stage = stage
        record.wall_ms = int((time.perf_counter() - start) * 1000)
        return record

    req = GenerationRequest(
        prompt=prompt,
        model=settings.model,
        temperature=settings.temperature,
        max_tokens=settings.max_tokens,
        trial_seed=trial,
    )
    try:
        result = provider.complete(req)
    except ProviderError as e:
        if e.kind == ProviderErrorKind.EXHAUSTED:
            record.provider_error = e.kind
            return finish("provider")
        raise
    record.raw_response = result.text

    try:
        record.extracted = extract_spec(result.text)
    except ExtractionError:
        return finish("extract")

    try:
        candidate = parse_spec(record.extracted)
    except ParseError:
        return finish("parse")
    record.parse_ok = True

    record.validation = validate(candidate, case.bundle.signatures)
    if not record.validation.ok:
        return finish("validate")

    alphabet = atom_alphabet(candidate, case.bundle.signatures).union(
        atom_alphabet(case.gold, case.bundle.signatures)
    )
    try:
        record.equiv = bounded_equiv(
            candidate, case.gold, alphabet, case.equiv_bound
        )
    except BudgetExceeded:
        return finish("equiv")
    return finish("done")


@dataclass(frozen=True)
class MetricsCell:
    benchmark: str
    variant: str
    trials: int
    valid: int
    correct: int
    provider_errors: int

    @property
    def rate_valid(self) -> Fraction | None:
        return Fraction(self.valid, self.trials) if self.trials else None

    @property
    def rate_correct(self) -> Fraction | None:
        return Fraction(self.correct, self.trials) if self.trials else None

    @property
    def rate_correct_given_valid(self) -> Fraction | None:
        return Fraction(self.correct, self.valid) if self.valid else None


@dataclass(frozen=True)
class MetricsSummary:
    cells: tuple[MetricsCell, ...]
    correctness_method: str

    def cell(self, benchmark: str, variant: str) -> MetricsCell:
        for c in self.cells:
            if c.benchmark == benchmark and c.variant == variant:
                return c
        raise KeyError((benchmark, variant))

    def to_json(self) -> dict:
        return {
            "correctness_method": self.correctness_method,
            "cells": [
                {
                    "benchmark": c.benchmark,
                    "variant": c.variant,
                    "trials": c.trials,
                    "valid": c.valid,
                    "correct": c.correct,
                    "provider_errors": c.provider_errors,
                    "rate_valid": _rate_float(c.rate_valid),
                    "rate_correct": _rate_float(c.rate_correct),
                    "rate_correct_given_valid": _rate_float(c.rate_correct_given_valid),
                }
                for c in self.cells
            ],
        }


def _rate_float(rate: Fraction | None) -> float | None:
    return None if rate is None else float(rate)


def summarize(
    records: Iterable[RunRecord],
    count_provider_errors: bool = False,
    equiv_bound: int | None = None,
) -> MetricsSummary:
    """Pure fold over records; deterministic for a given record set."""
    grouped: dict[tuple[str, str], list[RunRecord]] = {}
    bounds: set[int] = set()
    for r in records:
        grouped.setdefault((r.benchmark, r.variant), []).append(r)
        if isinstance(r.equiv, EquivalentUpTo):
            bounds.add(r.equiv.bound)
    cells = []
    for benchmark, variant in sorted(grouped):
        group = grouped[(benchmark, variant)]
        errors = sum(1 for r in group if r.is_provider_error)
        counted = group if count_provider_errors else [
            r for r in group if not r.is_provider_error
        ]
        valid = sum(1 for r in counted if r.valid)
        correct = sum(1 for r in counted if r.correct)
        cells.append(
            MetricsCell(benchmark, variant, len(counted), valid, correct, errors)
        )
    if equiv_bound is not None:
        method = f"bounded_equiv(k={equiv_bound})"
    elif len(bounds) == 1:
        method = f"bounded_equiv(k={bounds.pop()})"
    else:
        method = "bounded_equiv(k)"
    return MetricsSummary(tuple(cells), method)


def read_records(path) -> list[RunRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(RunRecord.from_json(json.loads(line)))
    return records


SUMMARY_COLUMNS = (
    "benchmark",
    "variant",
    "trials",
    "valid",
    "correct",
    "rate_valid",
    "rate_correct",
    "rate_correct_given_valid",
)


def write_summary_csv(summary: MetricsSummary, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for c in summary.cells:
            writer.writerow(
                [
                    c.benchmark,
                    c.variant,
                    c.trials,
                    c.valid,
                    c.correct,
                    _csv_rate(c.rate_valid),
                    _csv_rate(c.rate_correct),
                    _csv_rate(c.rate_correct_given_valid),
                ]
            )


def write_long_csv(summary: MetricsSummary, path) -> None:
    """Plot-ready long format: one (benchmark, variant, metric) per row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["benchmark", "variant", "metric", "value"])
        for c in summary.cells:
            for metric, rate in (
                ("rate_valid", c.rate_valid),
                ("rate_correct", c.rate_correct),
                ("rate_correct_given_valid", c.rate_correct_given_valid),
            ):
                writer.writerow([c.benchmark, c.variant, metric, _csv_rate(rate)])


def _csv_rate(rate: Fraction | None) -> str:
    return "" if rate is None else repr(float(rate))


class _RecordWriter:
    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()

    def append(self, record: RunRecord) -> None:
        line = json.dumps(record.to_json(), sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()


def run_suite(
    cases: Sequence[BenchmarkCase],
    variants: Sequence[PromptVariant],
    trials: int,
    provider: Provider,
    run_dir,
    parallelism: int = 1,
    settings: GenerationSettings = GenerationSettings(),
    instructions: str | None = None,
    count_provider_errors: bool = False,
) -> tuple[MetricsSummary, Path]:
    """Run `trials` generations per (case, variant); resume-safe.

    Records land in `<run_dir>/records.jsonl` as they complete; existing
    (benchmark, variant, trial) records are skipped, so re-running after an
    interruption converges to the same record set.  The summary is always
    recomputed from the persisted records.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    records_path = run_dir / "records.jsonl"
    done: set[tuple[str, str, int]] = set()
    if records_path.exists():
        for r in read_records(records_path):
            done.add((r.benchmark, r.variant, r.trial))

    pending = [
        (case, variant, trial)
        for case in cases
        for variant in variants
        for trial in range(trials)
        if (case.name, variant.value, trial) not in done
    ]
    writer = _RecordWriter(records_path)

    def work(task) -> None:
        case, variant, trial = task
        record = run_trial(case, variant, trial, provider, settings, instructions)
        writer.append(record)

    if parallelism <= 1:
        for task in pending:
            work(task)
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            for _ in pool.map(work, pending):
                pass

    records = read_records(records_path)
    bound = cases[0].equiv_bound if cases else None
    summary = summarize(records, count_provider_errors, equiv_bound=bound)
    write_summary_csv(summary, run_dir / "summary.csv")
    write_long_csv(summary, run_dir / "metrics_long.csv")
    with open(run_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary, records_path
