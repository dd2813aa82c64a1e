# -*- coding: utf-8 -*-
"""Corpus aggregates: distributions, intersections, series, tests and summaries."""

import logging
import math
from collections import Counter
from datetime import datetime
from typing import Dict, Iterable, List, Literal, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import betainc

from .context import ANONYMOUS, TOP_LEVEL, classify_function, cyclomatic_complexity
from .models import CandidateCommit, LogRecord, RepoMetadata, as_utc
from .parsing import ParsedSource, iter_functions
from .semantics import literal_value, normalize_literal

logger = logging.getLogger(__name__)

MONTH_DAYS = 30.44
FLAG_NAMES = ("async", "callback", "anonymous")

Sidedness = Literal["one-sided-greater", "two-sided"]
NameKey = Literal["function_name", "callback_callee_name", "normalized_literal"]
TimeField = Literal["event_time", "author_time"]


def ranked(counts: Mapping[str, int]) -> List[Tuple[str, int]]:
    """Items by descending count, ties broken lexicographically."""
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


class Distribution(BaseModel):
    """Labeled counts with their fractions of the total."""

    total: int = 0
    counts: Dict[str, int] = Field(default_factory=dict)
    fractions: Dict[str, float] = Field(default_factory=dict)

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "Distribution":
        ordered = [(label, count) for label, count in ranked(counts) if count > 0]
        total = sum(count for _, count in ordered)
        return cls(
            total=total,
            counts=dict(ordered),
            fractions={label: count / total for label, count in ordered},
        )

    def merge(self, other: "Distribution") -> "Distribution":
        return Distribution.from_counts(Counter(self.counts) + Counter(other.counts))


def intersection_key(is_async: bool, is_callback: bool, is_anonymous: bool) -> str:
    """Cell name for a flag triple, e.g. ``async+anonymous`` or ``none``."""
    flags = (is_async, is_callback, is_anonymous)
    return "+".join(name for name, flag in zip(FLAG_NAMES, flags) if flag) or "none"


INTERSECTION_CELLS = tuple(
    intersection_key(a, c, n) for a in (True, False) for c in (True, False) for n in (True, False)
)


class IntersectionTable(BaseModel):
    """Exclusive counts for the eight combinations of async/callback/anonymous."""

    total: int = 0
    cells: Dict[str, int] = Field(default_factory=lambda: {cell: 0 for cell in INTERSECTION_CELLS})

    def cell(self, is_async: bool, is_callback: bool, is_anonymous: bool) -> int:
        return self.cells[intersection_key(is_async, is_callback, is_anonymous)]

    def merge(self, other: "IntersectionTable") -> "IntersectionTable":
        return IntersectionTable(
            total=self.total + other.total,
            cells={cell: self.cells[cell] + other.cells[cell] for cell in INTERSECTION_CELLS},
        )


class TTestResult(BaseModel):
    t_statistic: float
    degrees_of_freedom: float
    p_value: float = Field(..., ge=0.0, le=1.0)
    sidedness: Sidedness = "one-sided-greater"


class SummaryStats(BaseModel):
    count: int
    mean: float
    std_dev: float
    min: float
    median: float
    max: float


class SeriesPoint(BaseModel):
    month: str
    records: int
    percentage: float


class BaselineCounts(BaseModel):
    """Function-kind counts over a source corpus; flags overlap."""

    files: int = 0
    total: int = 0
    async_count: int = 0
    anonymous_count: int = 0
    callback_count: int = 0
    others: int = 0
    complexities: List[int] = Field(default_factory=list)

    def add(self, other: "BaselineCounts") -> None:
        """Accumulate another count into this one in place."""
        self.files += other.files
        self.total += other.total
        self.async_count += other.async_count
        self.anonymous_count += other.anonymous_count
        self.callback_count += other.callback_count
        self.others += other.others
        self.complexities.extend(other.complexities)

    def merge(self, other: "BaselineCounts") -> "BaselineCounts":
        merged = self.model_copy(deep=True)
        merged.add(other)
        return merged


class ComplexityComparison(BaseModel):
    logs: SummaryStats
    baseline: SummaryStats
    test: TTestResult


class RepoSummary(BaseModel):
    count: int
    active_share: float
    stars: SummaryStats
    forks: SummaryStats
    watchers: SummaryStats
    size: SummaryStats
    contributors: SummaryStats


def block_distribution(records: Iterable[LogRecord]) -> Distribution:
    return Distribution.from_counts(Counter(record.block_statement for record in records))


def flag_intersections(records: Iterable[LogRecord]) -> IntersectionTable:
    table = IntersectionTable()
    for record in records:
        key = intersection_key(
            record.is_async_function, record.is_callback_function, record.is_anonymous_function
        )
        table.cells[key] += 1
        table.total += 1
    return table


def monthly_async_series(records: Iterable[LogRecord], time_field: TimeField = "event_time") -> List[SeriesPoint]:
    """Percentage of records inside async functions per UTC calendar month.

    Records without the chosen timestamp are skipped; empty months are not
    emitted.
    """
    totals: Counter[str] = Counter()
    async_counts: Counter[str] = Counter()
    for record in records:
        timestamp = getattr(record, time_field)
        if timestamp is None:
            continue
        month = as_utc(timestamp).strftime("%Y-%m")
        totals[month] += 1
        if record.is_async_function:
            async_counts[month] += 1
    return [
        SeriesPoint(month=month, records=totals[month], percentage=async_counts[month] / totals[month] * 100.0)
        for month in sorted(totals)
    ]


def _names_for(record: LogRecord, key: NameKey) -> List[str]:
    if key == "function_name":
        if record.function_name in (TOP_LEVEL, ANONYMOUS):
            return []
        return [record.function_name]
    if key == "callback_callee_name":
        return [record.callback_callee_name] if record.callback_callee_name else []
    return [
        normalize_literal(literal_value(argument.text.strip()))
        for argument in record.arguments
        if argument.type_of_arg in ("Literal", "TemplateLiteral")
    ]


def top_names(records: Iterable[LogRecord], key: NameKey, n: int) -> List[Tuple[str, int]]:
    """The ``n`` most frequent names under ``key``, descending, ties lexicographic.

    Placeholder function names (``(anonymous)``, ``(top-level)``) are skipped.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    counts: Counter[str] = Counter()
    for record in records:
        counts.update(_names_for(record, key))
    return ranked(counts)[:n]


def _t_tail(t: float, df: float) -> float:
    """P(T > |t|) for Student's t with ``df`` degrees of freedom."""
    return 0.5 * float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def welch_t_test(
    sample_a: Sequence[float], sample_b: Sequence[float], sidedness: Sidedness = "one-sided-greater"
) -> TTestResult:
    """Welch's unequal-variance t-test of mean(a) against mean(b).

    The one-sided alternative is mean(a) > mean(b). Swapping the samples
    negates t and maps the one-sided p to 1 - p.

    Raises:
        ValueError: A sample has fewer than two values, or both variances are zero.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("Both samples need at least 2 values")
    var_a, var_b = float(a.var(ddof=1)), float(b.var(ddof=1))
    if var_a == 0.0 and var_b == 0.0:
        raise ValueError("Both samples have zero variance")

    se_a, se_b = var_a / a.size, var_b / b.size
    se2 = se_a + se_b
    t = (float(a.mean()) - float(b.mean())) / math.sqrt(se2)
    df = se2**2 / (se_a**2 / (a.size - 1) + se_b**2 / (b.size - 1))

    tail = _t_tail(t, df)
    if sidedness == "two-sided":
        p = 2.0 * tail
    else:
        p = tail if t >= 0 else 1.0 - tail
    return TTestResult(t_statistic=t, degrees_of_freedom=df, p_value=min(1.0, max(0.0, p)), sidedness=sidedness)


def summary_stats(values: Sequence[float]) -> SummaryStats:
    """Mean, sample standard deviation, min, median and max.

    Raises:
        ValueError: ``values`` is empty.
    """
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise ValueError("summary_stats needs at least one value")
    std = float(data.std(ddof=1)) if data.size > 1 else 0.0
    return SummaryStats(
        count=int(data.size),
        mean=float(data.mean()),
        std_dev=std,
        min=float(data.min()),
        median=float(np.median(data)),
        max=float(data.max()),
    )


def months_since(last_updated: datetime, query_date: datetime) -> int:
    days = (as_utc(query_date) - as_utc(last_updated)).total_seconds() / 86400.0
    if days < 0:
        raise ValueError(f"Last update {last_updated} is after the query date {query_date}")
    return math.floor(days / MONTH_DAYS)


def cumulative_activity_curve(repos: Sequence[RepoMetadata], query_date: datetime) -> List[Tuple[int, float]]:
    """Cumulative share of repositories updated within N months, per observed N."""
    if not repos:
        return []
    gaps = Counter(months_since(repo.last_updated, query_date) for repo in repos)
    curve = []
    seen = 0
    for gap in sorted(gaps):
        seen += gaps[gap]
        curve.append((gap, seen / len(repos)))
    return curve


def baseline_function_distribution(
    sources: Iterable[ParsedSource], count_logical_operators: bool = True
) -> BaselineCounts:
    """Classify every function-like node of a corpus.

    The async/anonymous/callback flags are counted independently; ``others``
    counts functions with none of them. Per-function complexities are kept
    for the Welch comparison.
    """
    counts = BaselineCounts()
    for parsed in sources:
        counts.files += 1
        for fn in iter_functions(parsed):
            is_async, is_callback, is_anonymous, _ = classify_function(fn, parsed)
            counts.total += 1
            counts.async_count += is_async
            counts.callback_count += is_callback
            counts.anonymous_count += is_anonymous
            counts.others += not (is_async or is_callback or is_anonymous)
            counts.complexities.append(cyclomatic_complexity(fn, count_logical_operators))
    return counts


def cohens_kappa(labels_a: Sequence[str], labels_b: Sequence[str]) -> float:
    """Cohen's kappa for two raters; NaN when chance agreement is 1.

    Raises:
        ValueError: The sequences differ in length or are empty.
    """
    if len(labels_a) != len(labels_b):
        raise ValueError(f"Label sequences differ in length: {len(labels_a)} != {len(labels_b)}")
    if not labels_a:
        raise ValueError("Label sequences are empty")
    n = len(labels_a)
    observed = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    counts_a, counts_b = Counter(labels_a), Counter(labels_b)
    expected = sum(counts_a[label] * counts_b[label] for label in counts_a) / (n * n)
    if expected == 1.0:
        logger.warning("Cohen's kappa is undefined: both raters used a single identical label")
        return math.nan
    return (observed - expected) / (1.0 - expected)


def log_function_complexities(records: Iterable[LogRecord]) -> List[int]:
    """One complexity per function hosting logs, however many logs it holds."""
    seen: Dict[Tuple[str, str, str, int, str], int] = {}
    for record in records:
        fn = record.complexity_of_function
        if fn is None:
            continue
        key = (record.repository_name, record.commit_sha, record.file_path or record.folder_path, fn.line, fn.name)
        seen.setdefault(key, fn.complexity)
    return list(seen.values())


def complexity_comparison(
    records: Iterable[LogRecord], baseline_complexities: Sequence[int]
) -> Optional[ComplexityComparison]:
    """One-sided Welch test: do log-hosting functions run more complex than the baseline?

    Returns None when either side is too small or degenerate for the test.
    """
    logs = log_function_complexities(records)
    try:
        test = welch_t_test(logs, baseline_complexities, "one-sided-greater")
    except ValueError as e:
        logger.warning(f"Skipping complexity comparison: {e}")
        return None
    return ComplexityComparison(
        logs=summary_stats(logs), baseline=summary_stats(baseline_complexities), test=test
    )


def repo_summary(repos: Sequence[RepoMetadata]) -> Optional[RepoSummary]:
    if not repos:
        return None
    return RepoSummary(
        count=len(repos),
        active_share=sum(repo.is_active for repo in repos) / len(repos),
        stars=summary_stats([repo.stars for repo in repos]),
        forks=summary_stats([repo.forks_count for repo in repos]),
        watchers=summary_stats([repo.watchers_count for repo in repos]),
        size=summary_stats([repo.size for repo in repos]),
        contributors=summary_stats([repo.contributors for repo in repos]),
    )


def source_distribution(candidates: Iterable[CandidateCommit]) -> Tuple[Distribution, Dict[str, Dict[str, int]]]:
    """Candidates per source, and per push year broken down by source."""
    by_source: Counter[str] = Counter()
    by_year: Dict[str, Counter[str]] = {}
    for candidate in candidates:
        source = str(candidate.source)
        by_source[source] += 1
        by_year.setdefault(str(candidate.event_time.year), Counter())[source] += 1
    years = {year: dict(sorted(by_year[year].items())) for year in sorted(by_year)}
    return Distribution.from_counts(by_source), years
