# -*- coding: utf-8 -*-
"""Configuration management for the mining pipeline."""

import tomllib
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

from pydantic import AliasChoices, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .models import CommitSource, as_utc

DEFAULT_MAX_FILE_BYTES = 5 * 1024 * 1024


class Settings(BaseSettings):
    """Configuration settings for the mining pipeline.

    Every toggle defaults to the behavior documented for its stage; values
    from a TOML config file are overridden by command-line flags.
    """

    model_config = SettingsConfigDict(env_prefix="ADHOC_", case_sensitive=False)

    # Inputs and outputs
    input_paths: List[Path] = Field(default_factory=list)
    fixture_dir: Path = Path("fixtures")
    output_dir: Path = Path("out")
    source: CommitSource = CommitSource.ARCHIVE
    since: Optional[datetime] = None
    until: Optional[datetime] = None

    # Commit filtering
    case_sensitive: bool = False
    dotall: bool = False
    first_commit_only: Optional[bool] = None  # None = per-source default

    # File and log extraction
    extended_extensions: bool = False
    max_file_bytes: int = Field(default=DEFAULT_MAX_FILE_BYTES, gt=0)
    diff_source: Literal["auto", "content", "patch"] = "auto"
    count_logical_operators: bool = True
    extra_console_methods: bool = False
    label_word_boundary: bool = False

    # Remote access
    client: Literal["fixture", "github", "git"] = "fixture"
    record: bool = False
    api_base_url: str = "https://api.github.com"
    raw_base_url: str = "https://raw.githubusercontent.com"
    github_token: Optional[str] = Field(
        default=None,
        validation_alias=AliasChoices("github_token", "adhoc_github_token", "GITHUB_TOKEN"),
    )
    local_repo_path: Optional[Path] = None
    max_retries: int = Field(default=5, ge=0)
    backoff_base: float = Field(default=1.0, ge=0.0)
    requests_per_second: float = Field(default=1.0, gt=0.0)

    # Execution
    parallelism: int = Field(default=1, ge=1)
    query_date: Optional[datetime] = None
    top_n: int = Field(default=10, ge=1)
    log_level: str = "info"

    @field_validator("since", "until", "query_date")
    @classmethod
    def check_utc(cls, value: Optional[datetime]) -> Optional[datetime]:
        return as_utc(value) if value is not None else None

    @model_validator(mode="after")
    def check_output_dir(self) -> "Settings":
        output = self.output_dir.resolve()
        for path in self.input_paths:
            candidate = path.resolve()
            if output == candidate or output.is_relative_to(candidate):
                raise ValueError(f"Output directory {self.output_dir} overlaps input path {path}")
        return self


def effective_first_commit_only(settings: Settings) -> bool:
    """Resolve the first-commit-only mode for the configured source.

    Archive input keeps every commit of a push; query-sample input keeps only
    the first one, mirroring how the two sources were originally sampled.
    """
    if settings.first_commit_only is not None:
        return settings.first_commit_only
    return settings.source == CommitSource.QUERY_SAMPLE


def effective_query_date(settings: Settings, reference_times: Sequence[datetime] = ()) -> datetime:
    """Get the reference date for activity checks.

    An explicit ``query_date`` wins, then the latest of ``reference_times``,
    then the current time.
    """
    if settings.query_date is not None:
        return settings.query_date
    if reference_times:
        return max(as_utc(value) for value in reference_times)
    return datetime.now(timezone.utc)


def load_config_file(path: Optional[Path]) -> Dict[str, Any]:
    """Read a TOML config file into Settings keyword arguments.

    Keys may be written with dashes (``first-commit-only``) or underscores.
    A ``[pipeline]`` table is used when present, otherwise the top level.
    """
    if path is None:
        return {}
    with open(path, "rb") as handle:
        data = tomllib.load(handle)
    section = data.get("pipeline", data)
    return {key.replace("-", "_"): value for key, value in section.items()}


def load_settings(config_file: Optional[Path] = None, **overrides: Any) -> Settings:
    """Build Settings from a config file and command-line overrides.

    Overrides that are ``None`` are treated as "flag not given".
    """
    values = load_config_file(config_file)
    values.update({key: value for key, value in overrides.items() if value is not None})
    return Settings(**values)


def get_available_clients() -> Dict[str, str]:
    """Get available remote client types and their descriptions."""
    return {
        "fixture": "Replay recorded commit responses from the fixture store (offline)",
        "github": "GitHub REST API with rate limiting and optional recording",
        "git": "Local clone read through pydriller",
    }
