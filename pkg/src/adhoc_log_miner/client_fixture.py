# -*- coding: utf-8 -*-
"""Offline client replaying recorded responses from a fixture store."""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from .client import RemoteClient as RemoteClientProtocol
from .client import fixture_path
from .errors import AdhocLogMinerError, CommitUnavailableError
from .ingest import repo_metadata_from_api
from .models import CommitDetail, RepoMetadata

logger = logging.getLogger(__name__)


class FixtureClient(RemoteClientProtocol):
    """Reads ``<owner>__<name>/<sha>.json`` and ``<owner>__<name>/repo.json``."""

    def __init__(self, fixture_dir: Path, query_date: Optional[datetime] = None) -> None:
        self.fixture_dir = Path(fixture_dir)
        self.query_date = query_date or datetime.now(timezone.utc)
        logger.info(f"Replaying recorded responses from {self.fixture_dir}")

    def _read(self, repo: str, name: str, sha: Optional[str] = None) -> bytes:
        path = fixture_path(self.fixture_dir, repo, name)
        try:
            return path.read_bytes()
        except FileNotFoundError as e:
            raise CommitUnavailableError(repo, sha, "no recorded response") from e

    def fetch_commit_detail(self, repo: str, sha: str) -> CommitDetail:
        raw = self._read(repo, sha, sha)
        try:
            return CommitDetail.model_validate_json(raw)
        except ValidationError as e:
            raise AdhocLogMinerError(f"Corrupt recorded response for {repo}@{sha}: {e}") from e

    def fetch_repo_metadata(self, repo: str) -> RepoMetadata:
        raw = self._read(repo, "repo")
        try:
            document = json.loads(raw)
            return repo_metadata_from_api(
                document["repo"], int(document.get("contributors", 0)), self.query_date
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise AdhocLogMinerError(f"Corrupt recorded repository response for {repo}: {e}") from e
