# -*- coding: utf-8 -*-
"""Protocol-based interface for commit and repository data sources."""

import logging
import threading
import time
from pathlib import Path
from typing import Callable, Optional, Protocol, runtime_checkable

from .config import Settings
from .models import CommitDetail, RepoMetadata, normalize_sha, validate_repo_full_name

logger = logging.getLogger(__name__)


@runtime_checkable
class RemoteClient(Protocol):
    """Protocol for sources of commit detail, live or recorded."""

    def fetch_commit_detail(self, repo: str, sha: str) -> CommitDetail:
        """Fetch the changed-file list of one commit.

        Args:
            repo: Repository name in "owner/name" form.
            sha: Full 40-character commit SHA.

        Returns:
            The commit detail with file contents and/or patch text.

        Raises:
            CommitUnavailableError: The repository or commit is gone or private.
            RateLimitExhaustedError: Retries ran out while rate limited.
        """
        ...

    def fetch_repo_metadata(self, repo: str) -> RepoMetadata:
        """Fetch repository descriptors and popularity metrics."""
        ...


class TokenPool:
    """Thread-safe token bucket shared by every caller of one client.

    Holds at most ``capacity`` tokens and refills at ``rate`` tokens per
    second. ``acquire`` blocks until a token is available.
    """

    def __init__(
        self,
        rate: float,
        capacity: int = 1,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if rate <= 0:
            raise ValueError("Token refill rate must be positive")
        self.rate = rate
        self.capacity = max(1, capacity)
        self._clock = clock
        self._sleep = sleep
        self._tokens = float(self.capacity)
        self._updated = clock()
        self._lock = threading.Lock()

    def _refill(self) -> None:
        now = self._clock()
        self._tokens = min(self.capacity, self._tokens + (now - self._updated) * self.rate)
        self._updated = now

    def acquire(self) -> None:
        while True:
            with self._lock:
                self._refill()
                if self._tokens >= 1:
                    self._tokens -= 1
                    return
                wait = (1 - self._tokens) / self.rate
            self._sleep(wait)

    def drain(self, seconds: float) -> None:
        """Empty the pool and push the next refill ``seconds`` into the future."""
        with self._lock:
            self._tokens = 0.0
            self._updated = self._clock() + seconds


def fixture_path(fixture_dir: Path, repo: str, name: str) -> Path:
    """Location of a recorded response: ``<dir>/<owner>__<name>/<name>.json``."""
    owner, _, repo_name = repo.partition("/")
    return fixture_dir / f"{owner}__{repo_name}" / f"{name}.json"


def fetch_commit_detail(client: RemoteClient, repo: str, sha: str) -> CommitDetail:
    """Validate the commit coordinates and fetch its detail from ``client``."""
    repo = validate_repo_full_name(repo)
    sha = normalize_sha(sha)
    logger.debug(f"Fetching commit detail for {repo}@{sha}")
    detail = client.fetch_commit_detail(repo, sha)
    logger.debug(f"{repo}@{sha}: {len(detail.files)} changed files")
    return detail


def create_client(settings: Settings, pool: Optional[TokenPool] = None) -> RemoteClient:
    """Instantiate the remote client named by ``settings.client``."""
    if settings.client == "fixture":
        from .client_fixture import FixtureClient

        return FixtureClient(settings.fixture_dir, query_date=settings.query_date)
    if settings.client == "github":
        from .client_github import GitHubClient

        return GitHubClient(
            base_url=settings.api_base_url,
            raw_base_url=settings.raw_base_url,
            token=settings.github_token,
            pool=pool or TokenPool(settings.requests_per_second),
            max_retries=settings.max_retries,
            backoff_base=settings.backoff_base,
            record_dir=settings.fixture_dir if settings.record else None,
            query_date=settings.query_date,
        )
    if settings.client == "git":
        from .client_git import LocalGitClient

        if settings.local_repo_path is None:
            raise ValueError("The git client needs local_repo_path")
        return LocalGitClient(settings.local_repo_path, query_date=settings.query_date)
    raise ValueError(f"Unsupported client type: {settings.client}")
