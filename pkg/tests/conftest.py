# -*- coding: utf-8 -*-
"""Shared fixtures and builders for the test suite."""

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import pytest

from adhoc_log_miner.models import (
    CandidateCommit,
    ChangedFile,
    CommitDetail,
    CommitSource,
    FunctionComplexity,
    LogArgument,
    LogLocation,
    LogRecord,
    SourcePosition,
)
from adhoc_log_miner.parsing import ParsedSource, parse_source, walk

FIXTURES = Path(__file__).parent / "fixtures"


def make_sha(seed: str) -> str:
    """Deterministic 40-character commit sha for a label."""
    return hashlib.sha1(seed.encode("utf-8")).hexdigest()


def make_candidate(
    repo: str = "octo/app",
    seed: str = "c1",
    message: str = "Remove console.log calls",
    event_time: Optional[datetime] = None,
    source: CommitSource = CommitSource.ARCHIVE,
) -> CandidateCommit:
    return CandidateCommit(
        repo_full_name=repo,
        sha=make_sha(seed),
        message=message,
        event_time=event_time or datetime(2024, 8, 14, 12, 0, tzinfo=timezone.utc),
        source=source,
    )


def push_event_line(repo: str, created_at: str, commits: List[Dict[str, str]], event_type: str = "PushEvent") -> str:
    event: Dict[str, Any] = {
        "type": event_type,
        "repo": {"name": repo},
        "created_at": created_at,
        "payload": {"commits": commits},
    }
    return json.dumps(event)


def make_record(**overrides: Any) -> LogRecord:
    """A top-level LogRecord with every required field filled in."""
    fields: Dict[str, Any] = {
        "log_in_string": "console.log(x)",
        "function_name": "(top-level)",
        "log_loc": LogLocation(start=SourcePosition(line=1, column=0), end=SourcePosition(line=1, column=14)),
        "arguments": [LogArgument(text="x", type_of_arg="Identifier")],
        "block_statement": "Program",
        "repository_name": "octo_app",
        "commit_sha": make_sha("c1"),
        "folder_path": "src_app_js",
        "file_path": "src/app.js",
    }
    fields.update(overrides)
    return LogRecord(**fields)


def in_function(name: str, complexity: int, line: int = 1, kind: str = "FunctionDeclaration") -> Dict[str, Any]:
    """Overrides placing a record inside a named function."""
    return {
        "function_name": name,
        "function_type": kind,
        "complexity_of_function": FunctionComplexity(name=name, complexity=complexity, line=line),
        "block_statement": kind,
    }


def write_commit_fixture(
    fixture_dir: Path, repo: str, sha: str, files: List[ChangedFile], author_time: Optional[datetime] = None
) -> Path:
    owner, _, name = repo.partition("/")
    path = fixture_dir / f"{owner}__{name}" / f"{sha}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    detail = CommitDetail(repo_full_name=repo, sha=sha, author_time=author_time, files=files)
    path.write_text(detail.model_dump_json(indent=2), encoding="utf-8")
    return path


def parse_js(source: str, path: str = "src/test.js") -> ParsedSource:
    return parse_source(source, path)


def first_node(parsed: ParsedSource, node_type: str):
    """First node of ``node_type`` in pre-order."""
    for node in walk(parsed.root):
        if node.type == node_type:
            return node
    raise AssertionError(f"No {node_type} node in source")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
