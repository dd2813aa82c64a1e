# -*- coding: utf-8 -*-
"""Pydantic models for events, commits, repositories and extracted logs."""

import re
from datetime import datetime, timezone
from enum import StrEnum
from typing import List, Literal, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)
from pydantic.alias_generators import to_camel

SHA_PATTERN = re.compile(r"[0-9a-f]{40}")


def normalize_sha(value: str) -> str:
    """Lowercase and strip a commit SHA, rejecting anything but 40 hex chars."""
    sha = value.strip().lower()
    if not SHA_PATTERN.fullmatch(sha):
        raise ValueError(f"Invalid commit sha: {value!r}")
    return sha


def validate_repo_full_name(value: str) -> str:
    """Check the "owner/name" shape of a repository name."""
    owner, sep, name = value.partition("/")
    if not sep or not owner or not name or "/" in name:
        raise ValueError(f"Repository name must be 'owner/name', got {value!r}")
    return value


def as_utc(value: datetime) -> datetime:
    """Interpret naive timestamps as UTC and convert aware ones to UTC."""
    if value.tzinfo is None:
        return value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)


class CommitSource(StrEnum):
    """Where a candidate commit was found, in deduplication priority order."""

    ARCHIVE = "archive"
    QUERY_SAMPLE = "query-sample"
    LOCAL = "local"

    @property
    def priority(self) -> int:
        return list(CommitSource).index(self)


class ExclusionReason(StrEnum):
    """Why a changed file was not analyzed."""

    NONE = "none"
    MINIFIED = "minified"
    LIBRARY = "library"
    NON_TARGET_EXTENSION = "non-target-extension"
    TOO_LARGE = "too-large"


class PushCommit(BaseModel):
    """A commit listed in a push event payload."""

    sha: str
    message: str = ""

    normalize_sha_field = field_validator("sha")(normalize_sha)


class PushEvent(BaseModel):
    """A push event decoded from the public event archive."""

    repo_full_name: str
    pushed_at: datetime
    commits: List[PushCommit] = Field(default_factory=list)

    check_repo_name = field_validator("repo_full_name")(validate_repo_full_name)
    to_utc = field_validator("pushed_at")(as_utc)


class CandidateCommit(BaseModel):
    """A commit whose message suggests it removes ad-hoc logs."""

    repo_full_name: str
    sha: str
    message: str
    event_time: datetime
    source: CommitSource

    check_repo_name = field_validator("repo_full_name")(validate_repo_full_name)
    normalize_sha_field = field_validator("sha")(normalize_sha)
    to_utc = field_validator("event_time")(as_utc)

    @property
    def key(self) -> tuple[str, str]:
        return (self.repo_full_name, self.sha)


class ChangedFile(BaseModel):
    """One file touched by a commit, as recorded from the remote."""

    filename: str
    status: str = Field(default="modified", description="added, removed, modified or renamed.")
    previous_filename: Optional[str] = None
    patch: Optional[str] = Field(default=None, description="Unified diff text, if the remote sent one.")
    before_content: Optional[str] = Field(default=None, description="File content at the parent commit.")
    after_content: Optional[str] = Field(default=None, description="File content at the commit itself.")


class CommitDetail(BaseModel):
    """Changed-file list of one commit, with contents and/or patch text."""

    repo_full_name: str
    sha: str
    parent_sha: Optional[str] = None
    author_time: Optional[datetime] = None
    files: List[ChangedFile] = Field(default_factory=list)

    normalize_sha_field = field_validator("sha")(normalize_sha)


class RepoMetadata(BaseModel):
    """Repository descriptors and popularity metrics."""

    model_config = ConfigDict(populate_by_name=True)

    full_name: str
    description: str = ""
    contributors: int = Field(default=0, ge=0)
    stars: int = Field(default=0, ge=0)
    forks_count: int = Field(default=0, ge=0)
    watchers_count: int = Field(default=0, ge=0)
    size: int = Field(default=0, ge=0, description="Repository size in kilobytes.")
    last_updated: datetime = Field(alias="lastUpdated")
    is_active: bool = Field(alias="isActive")

    to_utc = field_validator("last_updated")(as_utc)


class SourcePosition(BaseModel):
    """A 1-based line and 0-based column in the pre-commit file."""

    line: int = Field(..., ge=1)
    column: int = Field(..., ge=0)


class LogLocation(BaseModel):
    start: SourcePosition
    end: SourcePosition


class FunctionComplexity(BaseModel):
    """Complexity of the function enclosing a log."""

    name: str
    complexity: int = Field(..., ge=1)
    line: int = Field(..., ge=1)


class LogArgument(BaseModel):
    """One argument of a log call: its source text and estree node kind."""

    model_config = ConfigDict(populate_by_name=True)

    text: str = Field(alias="str")
    type_of_arg: str = Field(alias="typeOfArg")


class LogRecord(BaseModel):
    """An extracted ad-hoc log with its syntactic context.

    Serialized with camelCase names (``logInString``, ``functionName`` ...)
    so output lines are comparable with the published log dataset.
    """

    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True)

    log_in_string: str
    function_name: str
    function_type: Optional[str] = None
    log_loc: LogLocation
    complexity_of_function: Optional[FunctionComplexity] = None
    arguments: List[LogArgument] = Field(default_factory=list)
    is_async_function: bool = False
    is_callback_function: bool = False
    is_anonymous_function: bool = False
    block_statement: str
    repository_name: str
    commit_sha: str
    folder_path: str
    callback_callee_name: Optional[str] = None
    embedded_calls: List[str] = Field(default_factory=list)
    file_path: str = ""
    event_time: Optional[datetime] = None
    author_time: Optional[datetime] = None

    @model_validator(mode="after")
    def check_function_fields(self) -> "LogRecord":
        if (self.function_type is None) != (self.complexity_of_function is None):
            raise ValueError("functionType and complexityOfFunction must both be set or both be null")
        return self


class FileDiagnostic(BaseModel):
    """Outcome of analyzing one changed file."""

    path: str
    excluded: ExclusionReason = ExclusionReason.NONE
    parse_error: Optional[str] = None
    deleted_lines: int = 0
    matched_logs: int = 0
    patch_agrees: Optional[bool] = None


class CommitDiagnostic(BaseModel):
    """Outcome of analyzing one candidate commit."""

    repo_full_name: str
    sha: str
    status: Literal["ok", "unavailable", "error"] = "ok"
    reason: Optional[str] = None
    matched_logs: int = 0
    files: List[FileDiagnostic] = Field(default_factory=list)
