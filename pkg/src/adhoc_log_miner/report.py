# -*- coding: utf-8 -*-
"""Corpus report assembly, serialization and CSV export."""

import csv
import json
import logging
import math
from collections import Counter
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field

from .models import CandidateCommit, LogRecord, RepoMetadata
from .semantics import profile_from_record
from .stats import (
    BaselineCounts,
    ComplexityComparison,
    Distribution,
    IntersectionTable,
    RepoSummary,
    SeriesPoint,
    SummaryStats,
    block_distribution,
    complexity_comparison,
    cumulative_activity_curve,
    flag_intersections,
    log_function_complexities,
    monthly_async_series,
    ranked,
    repo_summary,
    source_distribution,
    summary_stats,
    top_names,
)

logger = logging.getLogger(__name__)

FUNCTION_BLOCKS = {
    "FunctionDeclaration",
    "FunctionExpression",
    "ArrowFunctionExpression",
    "MethodDefinition",
}
SIGNIFICANT_DIGITS = 6


class NameCount(BaseModel):
    name: str
    count: int


class NameShare(BaseModel):
    name: str
    count: int
    share: float


class CorpusCounts(BaseModel):
    records: int = 0
    commits: int = 0
    repositories: int = 0
    files: int = 0


class BlockSection(BaseModel):
    distribution: Distribution
    root_level_share: float = Field(description="Share of logs at the root of a function body.")


class SemanticsSummary(BaseModel):
    """Argument statistics; literal ratios are over two-argument logs."""

    arg_counts: Distribution
    two_argument: int = 0
    two_argument_with_string_literal: int = 0
    two_argument_with_any_literal: int = 0
    string_literal_share: float = 0.0
    any_literal_share: float = 0.0
    labeled: int = 0
    label_share: float = Field(default=0.0, description="Labeled logs among two-argument logs with a string literal.")
    embedded_call_total: int = 0
    records_with_embedded_calls: int = 0
    top_embedded_calls: List[NameShare] = Field(default_factory=list)


class ComplexitySection(BaseModel):
    logs: SummaryStats
    comparison: Optional[ComplexityComparison] = None


class CurvePoint(BaseModel):
    months_since_update: int
    cumulative_fraction: float


class RepositorySection(BaseModel):
    query_date: datetime
    summary: RepoSummary
    activity_curve: List[CurvePoint]


class SourceSection(BaseModel):
    distribution: Distribution
    by_year: Dict[str, Dict[str, int]]


class BaselineSection(BaseModel):
    files: int
    total: int
    async_count: int
    anonymous_count: int
    callback_count: int
    others: int


class CorpusReport(BaseModel):
    """Every analysis over one record corpus.

    Sections set to None serialize as ``{"available": false}``.
    """

    counts: CorpusCounts
    blocks: Optional[BlockSection] = None
    intersections: Optional[IntersectionTable] = None
    async_series_event_time: Optional[List[SeriesPoint]] = None
    async_series_author_time: Optional[List[SeriesPoint]] = None
    top_function_names: Optional[List[NameCount]] = None
    top_callback_callees: Optional[List[NameCount]] = None
    top_literals: Optional[List[NameCount]] = None
    semantics: Optional[SemanticsSummary] = None
    complexity: Optional[ComplexitySection] = None
    repositories: Optional[RepositorySection] = None
    sources: Optional[SourceSection] = None
    baseline: Optional[BaselineSection] = None


def _share(part: int, whole: int) -> float:
    return part / whole if whole else 0.0


def semantics_summary(records: Sequence[LogRecord], top_n: int = 10, word_boundary: bool = False) -> SemanticsSummary:
    arg_counts: Counter[str] = Counter()
    embedded: Counter[str] = Counter()
    two_arg = with_string = with_any = labeled = with_calls = 0
    for record in records:
        profile = profile_from_record(record.arguments, record.embedded_calls, word_boundary)
        arg_counts[str(profile.arg_count)] += 1
        embedded.update(profile.embedded_callee_names)
        with_calls += bool(profile.embedded_callee_names)
        if profile.arg_count != 2:
            continue
        two_arg += 1
        with_string += profile.has_literal
        with_any += profile.has_any_literal
        labeled += profile.label_names_other

    total_calls = sum(embedded.values())
    return SemanticsSummary(
        arg_counts=Distribution.from_counts(arg_counts),
        two_argument=two_arg,
        two_argument_with_string_literal=with_string,
        two_argument_with_any_literal=with_any,
        string_literal_share=_share(with_string, two_arg),
        any_literal_share=_share(with_any, two_arg),
        labeled=labeled,
        label_share=_share(labeled, with_string),
        embedded_call_total=total_calls,
        records_with_embedded_calls=with_calls,
        top_embedded_calls=[
            NameShare(name=name, count=count, share=count / total_calls)
            for name, count in ranked(embedded)[:top_n]
        ],
    )


def _name_counts(pairs: List[tuple[str, int]]) -> List[NameCount]:
    return [NameCount(name=name, count=count) for name, count in pairs]


def build_report(
    records: Sequence[LogRecord],
    repos: Optional[Sequence[RepoMetadata]] = None,
    candidates: Optional[Sequence[CandidateCommit]] = None,
    baseline: Optional[BaselineCounts] = None,
    query_date: Optional[datetime] = None,
    top_n: int = 10,
    word_boundary: bool = False,
) -> CorpusReport:
    """Compute every corpus section that the given inputs allow."""
    blocks = block_distribution(records)
    root_level = sum(blocks.counts.get(kind, 0) for kind in FUNCTION_BLOCKS)
    report = CorpusReport(
        counts=CorpusCounts(
            records=len(records),
            commits=len({(r.repository_name, r.commit_sha) for r in records}),
            repositories=len({r.repository_name for r in records}),
            files=len({(r.repository_name, r.commit_sha, r.file_path or r.folder_path) for r in records}),
        ),
        blocks=BlockSection(distribution=blocks, root_level_share=_share(root_level, blocks.total)),
        intersections=flag_intersections(records),
        top_function_names=_name_counts(top_names(records, "function_name", top_n)),
        top_callback_callees=_name_counts(top_names(records, "callback_callee_name", top_n)),
        top_literals=_name_counts(top_names(records, "normalized_literal", top_n)),
        semantics=semantics_summary(records, top_n, word_boundary),
    )

    event_series = monthly_async_series(records, "event_time")
    author_series = monthly_async_series(records, "author_time")
    report.async_series_event_time = event_series or None
    report.async_series_author_time = author_series or None

    complexities = log_function_complexities(records)
    if complexities:
        comparison = None
        if baseline is not None:
            comparison = complexity_comparison(records, baseline.complexities)
        report.complexity = ComplexitySection(logs=summary_stats(complexities), comparison=comparison)

    if repos:
        summary = repo_summary(repos)
        if summary is not None and query_date is not None:
            curve = cumulative_activity_curve(repos, query_date)
            report.repositories = RepositorySection(
                query_date=query_date,
                summary=summary,
                activity_curve=[CurvePoint(months_since_update=n, cumulative_fraction=f) for n, f in curve],
            )

    if candidates:
        distribution, by_year = source_distribution(candidates)
        report.sources = SourceSection(distribution=distribution, by_year=by_year)

    if baseline is not None:
        report.baseline = BaselineSection(**baseline.model_dump(exclude={"complexities"}))

    logger.info(f"Built report over {len(records)} records")
    return report


def round_significant(value: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Round every float inside a JSON-like value to ``digits`` significant digits."""
    if isinstance(value, float):
        if not math.isfinite(value):
            return value
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {key: round_significant(item, digits) for key, item in value.items()}
    if isinstance(value, list):
        return [round_significant(item, digits) for item in value]
    return value


def report_document(report: CorpusReport) -> Dict[str, Any]:
    """The report as a JSON-ready dict with rounded floats and availability flags."""
    document: Dict[str, Any] = {}
    for name in CorpusReport.model_fields:
        section = getattr(report, name)
        if section is None:
            document[name] = {"available": False}
        elif isinstance(section, list):
            document[name] = {"available": True, "items": [item.model_dump(mode="json") for item in section]}
        else:
            document[name] = {"available": True, **section.model_dump(mode="json")}
    return round_significant(document)


def write_report(report: CorpusReport, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(report_document(report), indent=2, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")


def load_report(path: Path) -> Dict[str, Any]:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _fmt(value: Any) -> Any:
    return f"{value:.{SIGNIFICANT_DIGITS}g}" if isinstance(value, float) else value


def _write_table(path: Path, header: Sequence[str], rows: List[Sequence[Any]]) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(value) for value in row])
    return path


def _distribution_rows(distribution: Dict[str, Any]) -> List[Sequence[Any]]:
    return [
        (label, count, distribution["fractions"][label]) for label, count in distribution["counts"].items()
    ]


def _stats_row(label: str, stats: Dict[str, Any]) -> Sequence[Any]:
    return (label, stats["count"], stats["mean"], stats["std_dev"], stats["min"], stats["median"], stats["max"])


STATS_HEADER = ("sample", "count", "mean", "std_dev", "min", "median", "max")


def write_csv_tables(document: Dict[str, Any], csv_dir: Path) -> List[Path]:
    """Export each available report section as its own CSV table."""
    csv_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def available(name: str) -> Optional[Dict[str, Any]]:
        section = document.get(name) or {}
        return section if section.get("available") else None

    if blocks := available("blocks"):
        written.append(
            _write_table(csv_dir / "blocks.csv", ("block", "count", "fraction"), _distribution_rows(blocks["distribution"]))
        )
    if table := available("intersections"):
        written.append(
            _write_table(csv_dir / "intersections.csv", ("cell", "count"), list(table["cells"].items()))
        )
    for name in ("async_series_event_time", "async_series_author_time"):
        if series := available(name):
            rows = [(p["month"], p["records"], p["percentage"]) for p in series["items"]]
            written.append(_write_table(csv_dir / f"{name}.csv", ("month", "records", "percentage"), rows))
    for name in ("top_function_names", "top_callback_callees", "top_literals"):
        if top := available(name):
            rows = [(item["name"], item["count"]) for item in top["items"]]
            written.append(_write_table(csv_dir / f"{name}.csv", ("name", "count"), rows))
    if semantics := available("semantics"):
        written.append(
            _write_table(
                csv_dir / "arg_counts.csv", ("arg_count", "count", "fraction"), _distribution_rows(semantics["arg_counts"])
            )
        )
        rows = [(item["name"], item["count"], item["share"]) for item in semantics["top_embedded_calls"]]
        written.append(_write_table(csv_dir / "embedded_calls.csv", ("callee", "count", "share"), rows))
    if complexity := available("complexity"):
        rows = [_stats_row("logs", complexity["logs"])]
        comparison = complexity.get("comparison")
        if comparison:
            rows.append(_stats_row("baseline", comparison["baseline"]))
        written.append(_write_table(csv_dir / "complexity.csv", STATS_HEADER, rows))
    if repositories := available("repositories"):
        summary = repositories["summary"]
        metrics = ("stars", "forks", "watchers", "size", "contributors")
        written.append(
            _write_table(csv_dir / "repo_metrics.csv", STATS_HEADER, [_stats_row(m, summary[m]) for m in metrics])
        )
        rows = [(p["months_since_update"], p["cumulative_fraction"]) for p in repositories["activity_curve"]]
        written.append(
            _write_table(csv_dir / "activity_curve.csv", ("months_since_update", "cumulative_fraction"), rows)
        )
    if sources := available("sources"):
        rows = [
            (year, source, count)
            for year, per_source in sources["by_year"].items()
            for source, count in per_source.items()
        ]
        written.append(_write_table(csv_dir / "sources.csv", ("year", "source", "count"), rows))

    logger.info(f"Wrote {len(written)} CSV tables to {csv_dir}")
    return written


def render_summary(document: Dict[str, Any]) -> str:
    """Short plain-text digest of a report document."""
    counts = document["counts"]
    lines = [
        f"Records: {counts['records']} from {counts['commits']} commits "
        f"in {counts['repositories']} repositories",
    ]
    blocks = document.get("blocks", {})
    if blocks.get("available"):
        lines.append(f"Logs at function root level: {blocks['root_level_share']:.1%}")
        for label, fraction in blocks["distribution"]["fractions"].items():
            lines.append(f"  {label:<26} {fraction:.1%}")
    semantics = document.get("semantics", {})
    if semantics.get("available") and semantics["two_argument"]:
        lines.append(
            f"Two-argument logs with a string literal: {semantics['string_literal_share']:.1%}, "
            f"labeled: {semantics['label_share']:.1%}"
        )
    complexity = document.get("complexity", {})
    if complexity.get("available") and complexity.get("comparison"):
        test = complexity["comparison"]["test"]
        lines.append(
            f"Complexity vs baseline: t={test['t_statistic']:.2f}, "
            f"df={test['degrees_of_freedom']:.1f}, p={test['p_value']:.3g}"
        )
    return "\n".join(lines)
