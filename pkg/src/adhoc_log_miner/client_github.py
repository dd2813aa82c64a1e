# -*- coding: utf-8 -*-
"""GitHub REST implementation of the remote client protocol."""

import json
import logging
import time
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import httpx

from .client import RemoteClient as RemoteClientProtocol
from .client import TokenPool, fixture_path
from .diffing import is_target_path
from .errors import AdhocLogMinerError, CommitUnavailableError, RateLimitExhaustedError
from .ingest import repo_metadata_from_api
from .models import ChangedFile, CommitDetail, RepoMetadata

logger = logging.getLogger(__name__)

UNAVAILABLE_STATUSES = {404, 409, 410, 451}


def parse_retry_after(value: Optional[str], now: Optional[float] = None) -> Optional[float]:
    """Seconds to wait from a Retry-After header, in delay or HTTP-date form.

    Returns None for a missing or unparseable header.
    """
    if not value:
        return None
    value = value.strip()
    try:
        return max(0.0, float(value))
    except ValueError:
        pass
    try:
        when = parsedate_to_datetime(value)
    except (TypeError, ValueError):
        logger.debug(f"Ignoring unparseable Retry-After header {value!r}")
        return None
    if when.tzinfo is None:
        when = when.replace(tzinfo=timezone.utc)
    return max(0.0, when.timestamp() - (time.time() if now is None else now))


class GitHubClient(RemoteClientProtocol):
    """Fetches commit and repository data from the GitHub REST API.

    All requests go through a shared ``TokenPool``. Rate-limit responses are
    retried with exponential backoff up to ``max_retries`` times; when
    ``record_dir`` is set, every successful response is written to the
    fixture layout so later runs can replay it offline.
    """

    def __init__(
        self,
        base_url: str = "https://api.github.com",
        raw_base_url: str = "https://raw.githubusercontent.com",
        token: Optional[str] = None,
        pool: Optional[TokenPool] = None,
        max_retries: int = 5,
        backoff_base: float = 1.0,
        record_dir: Optional[Path] = None,
        query_date: Optional[datetime] = None,
        timeout: float = 30.0,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        headers = {
            "Accept": "application/vnd.github+json",
            "X-GitHub-Api-Version": "2022-11-28",
        }
        if token:
            headers["Authorization"] = f"Bearer {token}"
        else:
            logger.warning("No GitHub token configured; unauthenticated rate limits apply.")
        self.raw_base_url = raw_base_url.rstrip("/")
        self.pool = pool or TokenPool(rate=1.0)
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.record_dir = Path(record_dir) if record_dir is not None else None
        self.query_date = query_date or datetime.now(timezone.utc)
        self._sleep = sleep
        self._client = httpx.Client(
            base_url=base_url, headers=headers, timeout=timeout, transport=transport
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "GitHubClient":
        return self

    def __exit__(self, *args: object) -> None:
        self.close()

    def _rate_limit_wait(self, response: httpx.Response, attempt: int) -> Optional[float]:
        """Seconds to wait if ``response`` signals rate limiting, else None."""
        limited = response.status_code == 429 or (
            response.status_code == 403 and response.headers.get("x-ratelimit-remaining") == "0"
        )
        if not limited:
            return None
        retry_after = parse_retry_after(response.headers.get("retry-after"))
        if retry_after is not None:
            return retry_after
        if "x-ratelimit-reset" in response.headers:
            return max(0.0, float(response.headers["x-ratelimit-reset"]) - time.time())
        return self.backoff_base * 2**attempt

    def _get(
        self, url: str, repo: str, sha: Optional[str] = None, params: Optional[Dict[str, Any]] = None
    ) -> httpx.Response:
        for attempt in range(self.max_retries + 1):
            self.pool.acquire()
            try:
                response = self._client.get(url, params=params)
            except httpx.TransportError as e:
                if attempt == self.max_retries:
                    raise AdhocLogMinerError(f"Request to {url} failed: {e}") from e
                delay = self.backoff_base * 2**attempt
                logger.warning(f"Transport error for {url} ({e}); retrying in {delay:.1f}s")
                self._sleep(delay)
                continue

            if response.status_code in UNAVAILABLE_STATUSES:
                raise CommitUnavailableError(repo, sha, f"HTTP {response.status_code}")

            wait = self._rate_limit_wait(response, attempt)
            if wait is not None:
                if attempt == self.max_retries:
                    raise RateLimitExhaustedError(f"Rate limit exhausted for {url}", wait_hint=wait)
                logger.warning(f"Rate limited on {url}; waiting {wait:.1f}s (attempt {attempt + 1})")
                self.pool.drain(wait)
                continue

            if response.status_code >= 500:
                if attempt == self.max_retries:
                    raise AdhocLogMinerError(f"Server error {response.status_code} for {url}")
                delay = self.backoff_base * 2**attempt
                logger.warning(f"Server error {response.status_code} for {url}; retrying in {delay:.1f}s")
                self._sleep(delay)
                continue

            try:
                response.raise_for_status()
            except httpx.HTTPStatusError as e:
                raise AdhocLogMinerError(f"Request to {url} failed: {e}") from e
            return response
        raise AdhocLogMinerError(f"Request to {url} failed after {self.max_retries} retries")

    def _raw_content(self, repo: str, ref: str, path: str) -> Optional[str]:
        url = f"{self.raw_base_url}/{repo}/{ref}/{path}"
        try:
            return self._get(url, repo, ref).text
        except CommitUnavailableError:
            logger.info(f"No content for {path} at {repo}@{ref}")
            return None

    def _record(self, repo: str, name: str, payload: str) -> None:
        if self.record_dir is None:
            return
        path = fixture_path(self.record_dir, repo, name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(payload, encoding="utf-8")
        logger.debug(f"Recorded response to {path}")

    def fetch_commit_detail(self, repo: str, sha: str) -> CommitDetail:
        document = self._get(f"/repos/{repo}/commits/{sha}", repo, sha).json()
        parents = document.get("parents") or []
        parent_sha = parents[0]["sha"] if parents else None
        author_date = ((document.get("commit") or {}).get("author") or {}).get("date")

        files = []
        for entry in document.get("files") or []:
            filename = entry["filename"]
            status = entry.get("status", "modified")
            previous = entry.get("previous_filename")
            before = after = None
            if is_target_path(filename, extended=True):
                if parent_sha and status != "added":
                    before = self._raw_content(repo, parent_sha, previous or filename)
                if status != "removed":
                    after = self._raw_content(repo, sha, filename)
            files.append(
                ChangedFile(
                    filename=filename,
                    status=status,
                    previous_filename=previous,
                    patch=entry.get("patch"),
                    before_content=before,
                    after_content=after,
                )
            )

        detail = CommitDetail(
            repo_full_name=repo,
            sha=sha,
            parent_sha=parent_sha,
            author_time=author_date,
            files=files,
        )
        self._record(repo, sha, detail.model_dump_json(indent=2))
        return detail

    def _contributor_count(self, repo: str) -> int:
        response = self._get(
            f"/repos/{repo}/contributors", repo, params={"per_page": 1, "anon": "true"}
        )
        if response.status_code == 204 or not response.content:
            return 0
        last = response.links.get("last", {}).get("url")
        if last:
            return int(httpx.URL(last).params.get("page", "1"))
        return len(response.json())

    def fetch_repo_metadata(self, repo: str) -> RepoMetadata:
        document = self._get(f"/repos/{repo}", repo).json()
        contributors = self._contributor_count(repo)
        self._record(repo, "repo", json.dumps({"repo": document, "contributors": contributors}, indent=2))
        return repo_metadata_from_api(document, contributors, self.query_date)
