# -*- coding: utf-8 -*-
"""Stage orchestration: commit extraction, baseline scans and record persistence."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ValidationError

from .client import RemoteClient, fetch_commit_detail
from .config import Settings
from .context import (
    DEFAULT_CONSOLE_METHODS,
    EXTRA_CONSOLE_METHODS,
    build_log_record,
    find_log_calls,
    match_deleted_logs,
)
from .diffing import build_file_diff, detect_library, detect_minified, is_target_path
from .errors import (
    AdhocLogMinerError,
    CommitUnavailableError,
    SourceParseError,
    UnifiedDiffParseError,
)
from .models import (
    CandidateCommit,
    ChangedFile,
    CommitDiagnostic,
    ExclusionReason,
    FileDiagnostic,
    LogRecord,
)
from .parsing import parse_source
from .stats import BaselineCounts, baseline_function_distribution

logger = logging.getLogger(__name__)


@dataclass
class CommitExtraction:
    """Records and diagnostic produced for one candidate commit."""

    records: List[LogRecord] = field(default_factory=list)
    diagnostic: Optional[CommitDiagnostic] = None


def console_methods(settings: Settings) -> Tuple[str, ...]:
    return EXTRA_CONSOLE_METHODS if settings.extra_console_methods else DEFAULT_CONSOLE_METHODS


def extract_file(
    changed: ChangedFile,
    candidate: CandidateCommit,
    settings: Settings,
    author_time: Optional[datetime] = None,
) -> Tuple[List[LogRecord], FileDiagnostic]:
    """Extract the deleted log calls of one changed file."""
    diagnostic = FileDiagnostic(path=changed.filename)
    try:
        file_diff = build_file_diff(
            changed,
            extended_extensions=settings.extended_extensions,
            max_file_bytes=settings.max_file_bytes,
            diff_source=settings.diff_source,
        )
    except UnifiedDiffParseError as e:
        logger.warning(f"{candidate.repo_full_name}@{candidate.sha[:10]} {changed.filename}: {e}")
        diagnostic.parse_error = str(e)
        return [], diagnostic

    diagnostic.excluded = file_diff.excluded
    diagnostic.deleted_lines = len(file_diff.deleted_lines)
    diagnostic.patch_agrees = file_diff.patch_agrees
    if file_diff.excluded != ExclusionReason.NONE or not file_diff.deleted_lines:
        return [], diagnostic
    if changed.before_content is None:
        diagnostic.parse_error = "no pre-commit content to parse"
        return [], diagnostic

    try:
        parsed = parse_source(file_diff.before_content, file_diff.path)
    except SourceParseError as e:
        logger.warning(f"{candidate.repo_full_name}@{candidate.sha[:10]}: {e}")
        diagnostic.parse_error = str(e)
        return [], diagnostic

    calls = match_deleted_logs(find_log_calls(parsed, console_methods(settings)), file_diff.deleted_lines)
    records = [
        build_log_record(
            call,
            parsed,
            file_diff.path,
            candidate,
            author_time=author_time,
            count_logical_operators=settings.count_logical_operators,
        )
        for call in calls
    ]
    diagnostic.matched_logs = len(records)
    return records, diagnostic


def extract_commit(candidate: CandidateCommit, client: RemoteClient, settings: Settings) -> CommitExtraction:
    """Fetch one candidate commit and extract every deleted log it contains.

    Fetch failures never raise; they produce an ``unavailable`` or ``error``
    diagnostic and no records.
    """
    diagnostic = CommitDiagnostic(repo_full_name=candidate.repo_full_name, sha=candidate.sha)
    try:
        detail = fetch_commit_detail(client, candidate.repo_full_name, candidate.sha)
    except CommitUnavailableError as e:
        logger.info(f"Skipping commit: {e}")
        diagnostic.status = "unavailable"
        diagnostic.reason = str(e)
        return CommitExtraction(diagnostic=diagnostic)
    except (AdhocLogMinerError, ValidationError, ValueError) as e:
        logger.warning(f"Skipping commit {candidate.repo_full_name}@{candidate.sha}: {e}")
        diagnostic.status = "error"
        diagnostic.reason = str(e)
        return CommitExtraction(diagnostic=diagnostic)

    records: List[LogRecord] = []
    for changed in sorted(detail.files, key=lambda f: f.filename):
        try:
            file_records, file_diagnostic = extract_file(changed, candidate, settings, detail.author_time)
        except Exception as e:
            logger.error(
                f"Unexpected failure on {candidate.repo_full_name}@{candidate.sha[:10]} {changed.filename}: {e}",
                exc_info=True,
            )
            file_records = []
            file_diagnostic = FileDiagnostic(path=changed.filename, parse_error=f"internal error: {e}")
        records.extend(file_records)
        diagnostic.files.append(file_diagnostic)
    diagnostic.matched_logs = len(records)
    logger.debug(f"{candidate.repo_full_name}@{candidate.sha[:10]}: {len(records)} logs")
    return CommitExtraction(records=records, diagnostic=diagnostic)


def run_extraction(
    candidates: Sequence[CandidateCommit], client: RemoteClient, settings: Settings
) -> Tuple[List[LogRecord], List[CommitDiagnostic]]:
    """Extract all candidates on a bounded thread pool, keeping candidate order."""
    logger.info(f"Extracting {len(candidates)} commits with parallelism {settings.parallelism}")
    with ThreadPoolExecutor(max_workers=settings.parallelism) as executor:
        results = list(executor.map(lambda c: extract_commit(c, client, settings), candidates))

    records: List[LogRecord] = []
    diagnostics: List[CommitDiagnostic] = []
    for result in results:
        records.extend(result.records)
        if result.diagnostic is not None:
            diagnostics.append(result.diagnostic)
    logger.info(f"Extracted {len(records)} logs from {len(candidates)} commits")
    return records, diagnostics


def scan_corpus(corpus_dir: Path, settings: Settings) -> Tuple[BaselineCounts, List[FileDiagnostic]]:
    """Classify every function in a directory of source files.

    Library paths and minified files are excluded like in extraction;
    unparseable files are reported and skipped.
    """
    counts = BaselineCounts()
    diagnostics: List[FileDiagnostic] = []
    for path in sorted(p for p in corpus_dir.rglob("*") if p.is_file()):
        relative = path.relative_to(corpus_dir).as_posix()
        if not is_target_path(relative, settings.extended_extensions):
            continue
        diagnostic = FileDiagnostic(path=relative)
        diagnostics.append(diagnostic)
        if detect_library(relative):
            diagnostic.excluded = ExclusionReason.LIBRARY
            continue
        if path.stat().st_size > settings.max_file_bytes:
            diagnostic.excluded = ExclusionReason.TOO_LARGE
            continue
        try:
            source = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            diagnostic.parse_error = f"unreadable: {e}"
            continue
        if detect_minified(source):
            diagnostic.excluded = ExclusionReason.MINIFIED
            continue
        try:
            parsed = parse_source(source, relative)
        except SourceParseError as e:
            logger.warning(str(e))
            diagnostic.parse_error = str(e)
            continue
        counts.add(baseline_function_distribution([parsed], settings.count_logical_operators))
    logger.info(f"Baseline over {counts.files} files: {counts.total} functions")
    return counts, diagnostics


def write_jsonl(path: Path, items: Sequence[BaseModel]) -> None:
    """Write pydantic models one per line; records use their camelCase names."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for item in items:
            handle.write(item.model_dump_json(by_alias=True) + "\n")


def read_records(path: Path) -> List[LogRecord]:
    with open(path, encoding="utf-8") as handle:
        return [LogRecord.model_validate_json(line) for line in handle if line.strip()]


def read_baseline(path: Path) -> BaselineCounts:
    return BaselineCounts.model_validate_json(path.read_text(encoding="utf-8"))


def write_baseline(path: Path, counts: BaselineCounts) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(counts.model_dump_json(indent=2) + "\n", encoding="utf-8")
