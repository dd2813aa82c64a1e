# -*- coding: utf-8 -*-
"""Exception types raised across the mining pipeline."""

from typing import Optional


class AdhocLogMinerError(Exception):
    """Base class for all pipeline errors."""


class IngestError(AdhocLogMinerError):
    """An event stream could not be read."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class CommitUnavailableError(AdhocLogMinerError):
    """A commit or repository is missing, deleted or private."""

    def __init__(self, repo: str, sha: Optional[str] = None, reason: str = "") -> None:
        target = f"{repo}@{sha}" if sha else repo
        super().__init__(f"{target} is unavailable{': ' + reason if reason else ''}")
        self.repo = repo
        self.sha = sha
        self.reason = reason


class RateLimitExhaustedError(AdhocLogMinerError):
    """The remote rate limit was still exhausted after the last retry."""

    def __init__(self, message: str, wait_hint: float) -> None:
        super().__init__(f"{message}; retry in {wait_hint:.0f}s")
        self.wait_hint = wait_hint


class UnifiedDiffParseError(AdhocLogMinerError):
    """A unified diff hunk is malformed."""

    def __init__(self, message: str, hunk: str) -> None:
        super().__init__(f"{message} in hunk {hunk!r}")
        self.hunk = hunk


class SourceParseError(AdhocLogMinerError):
    """A JavaScript/TypeScript source file has syntax errors."""

    def __init__(self, path: str, line: Optional[int] = None) -> None:
        where = f" near line {line}" if line is not None else ""
        super().__init__(f"Syntax error in {path}{where}")
        self.path = path
        self.line = line
