# -*- coding: utf-8 -*-
"""Push-event decoding, removal-commit filtering and candidate persistence."""

import gzip
import json
import logging
import re
import zlib
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timedelta
from functools import lru_cache
from pathlib import Path
from typing import Any, BinaryIO, Dict, Iterable, Iterator, List, Optional, Sequence

from pydantic import ValidationError

from .errors import IngestError
from .models import CandidateCommit, CommitSource, PushEvent, RepoMetadata, as_utc

logger = logging.getLogger(__name__)

REMOVAL_PATTERN = r"(remove|delete).*?console.log"
ACTIVE_WINDOW = timedelta(days=183)
GZIP_MAGIC = b"\x1f\x8b"


@dataclass
class IngestStats:
    """Counters collected while decoding one or more event streams."""

    lines: int = 0
    push_events: int = 0
    other_events: int = 0
    skipped_lines: int = 0

    def merge(self, other: "IngestStats") -> "IngestStats":
        return IngestStats(
            lines=self.lines + other.lines,
            push_events=self.push_events + other.push_events,
            other_events=self.other_events + other.other_events,
            skipped_lines=self.skipped_lines + other.skipped_lines,
        )


@contextmanager
def open_event_stream(path: Path) -> Iterator[BinaryIO]:
    """Open an event file, transparently decompressing gzip input."""
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == GZIP_MAGIC:
        with gzip.open(path, "rb") as handle:
            yield handle  # type: ignore[misc]
    else:
        with open(path, "rb") as handle:
            yield handle


def _decode_push_event(event: Dict[str, Any]) -> PushEvent:
    payload = event.get("payload") or {}
    commits = [
        {"sha": commit.get("sha", ""), "message": commit.get("message") or ""}
        for commit in payload.get("commits") or []
    ]
    return PushEvent(
        repo_full_name=(event.get("repo") or {}).get("name", ""),
        pushed_at=event.get("created_at"),
        commits=commits,
    )


def parse_event_stream(
    stream: Iterable[bytes], stats: Optional[IngestStats] = None
) -> Iterator[PushEvent]:
    """Decode newline-delimited archive events, yielding only push events.

    Malformed lines are counted in ``stats.skipped_lines`` and skipped. A
    failure of the underlying stream raises ``IngestError`` carrying the
    byte offset reached so far.
    """
    stats = stats if stats is not None else IngestStats()
    offset = 0
    line_number = 0
    iterator = iter(stream)
    while True:
        try:
            raw = next(iterator)
        except StopIteration:
            return
        except (OSError, EOFError, zlib.error) as e:
            raise IngestError(f"Failed to read event stream: {e}", offset) from e

        line_number += 1
        offset += len(raw)
        if not raw.strip():
            continue
        stats.lines += 1

        try:
            event = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            stats.skipped_lines += 1
            logger.warning(f"Skipping undecodable event line {line_number}: {e}")
            continue
        if not isinstance(event, dict):
            stats.skipped_lines += 1
            logger.warning(f"Skipping event line {line_number}: not an object")
            continue
        if event.get("type") != "PushEvent":
            stats.other_events += 1
            continue

        try:
            push = _decode_push_event(event)
        except (ValidationError, AttributeError) as e:
            stats.skipped_lines += 1
            logger.warning(f"Skipping malformed push event on line {line_number}: {e}")
            continue
        stats.push_events += 1
        yield push


@lru_cache(maxsize=8)
def _removal_regex(case_sensitive: bool, dotall: bool) -> re.Pattern[str]:
    flags = 0 if case_sensitive else re.IGNORECASE
    if dotall:
        flags |= re.DOTALL
    return re.compile(REMOVAL_PATTERN, flags)


def match_removal_message(
    message: str, case_sensitive: bool = False, dotall: bool = False
) -> bool:
    """Check whether a commit message announces removing console.log calls.

    By default the match is case-insensitive and stays within one line.
    """
    return _removal_regex(case_sensitive, dotall).search(message) is not None


def extract_candidates(
    events: Iterable[PushEvent],
    source: CommitSource,
    first_commit_only: bool = False,
    case_sensitive: bool = False,
    dotall: bool = False,
    since: Optional[datetime] = None,
    until: Optional[datetime] = None,
) -> Iterator[CandidateCommit]:
    """Turn push events into candidate commits whose message matches."""
    for event in events:
        if since is not None and event.pushed_at < since:
            continue
        if until is not None and event.pushed_at > until:
            continue
        commits = event.commits[:1] if first_commit_only else event.commits
        for commit in commits:
            if match_removal_message(commit.message, case_sensitive, dotall):
                yield CandidateCommit(
                    repo_full_name=event.repo_full_name,
                    sha=commit.sha,
                    message=commit.message,
                    event_time=event.pushed_at,
                    source=source,
                )


def dedupe_candidates(candidates: Iterable[CandidateCommit]) -> List[CandidateCommit]:
    """Collapse candidates sharing (repo, sha).

    Output follows first-occurrence order; when sources disagree, the record
    from the source earliest in ``CommitSource`` order takes that slot.
    """
    result: List[CandidateCommit] = []
    positions: Dict[tuple[str, str], int] = {}
    for candidate in candidates:
        index = positions.get(candidate.key)
        if index is None:
            positions[candidate.key] = len(result)
            result.append(candidate)
        elif candidate.source.priority < result[index].source.priority:
            result[index] = candidate
    return result


def compute_is_active(last_updated: datetime, query_date: datetime) -> bool:
    """Check whether a repository was updated within 183 days of the query."""
    last_updated, query_date = as_utc(last_updated), as_utc(query_date)
    if query_date < last_updated:
        raise ValueError(
            f"Query date {query_date.isoformat()} precedes last update {last_updated.isoformat()}"
        )
    return query_date - last_updated <= ACTIVE_WINDOW


def repo_metadata_from_api(
    payload: Dict[str, Any], contributors: int, query_date: datetime
) -> RepoMetadata:
    """Build RepoMetadata from a repository API document."""
    raw_updated = payload.get("pushed_at") or payload.get("updated_at")
    if raw_updated is None:
        raise ValueError(f"Repository document for {payload.get('full_name')} has no update time")
    last_updated = as_utc(datetime.fromisoformat(raw_updated.replace("Z", "+00:00")))
    return RepoMetadata(
        full_name=payload["full_name"],
        description=payload.get("description") or "",
        contributors=contributors,
        stars=payload.get("stargazers_count", 0),
        forks_count=payload.get("forks_count", 0),
        watchers_count=payload.get("watchers_count", 0),
        size=payload.get("size", 0),
        last_updated=last_updated,
        is_active=compute_is_active(last_updated, query_date),
    )


def write_candidates(path: Path, candidates: Sequence[CandidateCommit]) -> None:
    """Write candidates as newline-delimited JSON records."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for candidate in candidates:
            handle.write(candidate.model_dump_json() + "\n")


def read_candidates(path: Path) -> List[CandidateCommit]:
    """Read candidates written by ``write_candidates``."""
    with open(path, encoding="utf-8") as handle:
        return [CandidateCommit.model_validate_json(line) for line in handle if line.strip()]


def write_repos(path: Path, repos: Sequence[RepoMetadata]) -> None:
    """Write repository metadata with the published field names."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for repo in repos:
            handle.write(repo.model_dump_json(by_alias=True) + "\n")


def read_repos(path: Path) -> List[RepoMetadata]:
    with open(path, encoding="utf-8") as handle:
        return [RepoMetadata.model_validate_json(line) for line in handle if line.strip()]
