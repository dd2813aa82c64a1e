# -*- coding: utf-8 -*-
"""Local-clone implementation of the remote client protocol using pydriller."""

import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Optional

from git.exc import BadName, BadObject, GitCommandError
from pydriller import Git, ModificationType, Repository

from .client import RemoteClient as RemoteClientProtocol
from .errors import CommitUnavailableError
from .ingest import compute_is_active, match_removal_message
from .models import CandidateCommit, ChangedFile, CommitDetail, CommitSource, RepoMetadata, as_utc

logger = logging.getLogger(__name__)

CHANGE_STATUS = {
    ModificationType.ADD: "added",
    ModificationType.DELETE: "removed",
    ModificationType.RENAME: "renamed",
}


class LocalGitClient(RemoteClientProtocol):
    """Reads commits of one local clone; ``repo`` only names the records."""

    def __init__(self, repo_path: Path, query_date: Optional[datetime] = None) -> None:
        self.repo_path = Path(repo_path)
        self.query_date = query_date or datetime.now(timezone.utc)
        self._git = Git(str(self.repo_path))
        logger.info(f"Reading commits from local clone {self.repo_path}")

    def fetch_commit_detail(self, repo: str, sha: str) -> CommitDetail:
        try:
            commit = self._git.get_commit(sha)
        except (BadName, BadObject, GitCommandError, ValueError) as e:
            raise CommitUnavailableError(repo, sha, f"not in {self.repo_path}") from e

        files = []
        for modified in commit.modified_files:
            files.append(
                ChangedFile(
                    filename=modified.new_path or modified.old_path,
                    status=CHANGE_STATUS.get(modified.change_type, "modified"),
                    previous_filename=modified.old_path if modified.change_type == ModificationType.RENAME else None,
                    patch=modified.diff or None,
                    before_content=modified.source_code_before,
                    after_content=modified.source_code,
                )
            )
        return CommitDetail(
            repo_full_name=repo,
            sha=commit.hash,
            parent_sha=commit.parents[0] if commit.parents else None,
            author_time=as_utc(commit.author_date),
            files=files,
        )

    def fetch_repo_metadata(self, repo: str) -> RepoMetadata:
        """Local clones have no popularity metrics; only activity and authors."""
        authors = set()
        last_updated: Optional[datetime] = None
        for commit in Repository(str(self.repo_path)).traverse_commits():
            authors.add(commit.author.email)
            committed = as_utc(commit.committer_date)
            if last_updated is None or committed > last_updated:
                last_updated = committed
        if last_updated is None:
            raise CommitUnavailableError(repo, None, "repository has no commits")
        return RepoMetadata(
            full_name=repo,
            contributors=len(authors),
            last_updated=last_updated,
            is_active=compute_is_active(last_updated, self.query_date),
        )


def scan_local_repository(
    repo_path: Path,
    repo_full_name: str,
    case_sensitive: bool = False,
    dotall: bool = False,
    since: Optional[datetime] = None,
    until: Optional[datetime] = None,
) -> Iterator[CandidateCommit]:
    """Yield commits of a local clone whose message announces log removal."""
    repository = Repository(str(repo_path), since=since, to=until)
    for commit in repository.traverse_commits():
        if not match_removal_message(commit.msg, case_sensitive, dotall):
            continue
        logger.debug(f"Local candidate {commit.hash[:10]}: {commit.msg.splitlines()[0]}")
        yield CandidateCommit(
            repo_full_name=repo_full_name,
            sha=commit.hash,
            message=commit.msg,
            event_time=as_utc(commit.committer_date),
            source=CommitSource.LOCAL,
        )
