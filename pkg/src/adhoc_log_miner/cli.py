# -*- coding: utf-8 -*-
"""Command line interface for the ad-hoc log mining pipeline."""

import argparse
import json
import logging
import os
import sys
import tomllib
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, TypeVar

from pydantic import ValidationError

from .client import create_client
from .config import (
    Settings,
    effective_first_commit_only,
    effective_query_date,
    get_available_clients,
    load_settings,
)
from .errors import AdhocLogMinerError, IngestError
from .ingest import (
    IngestStats,
    dedupe_candidates,
    extract_candidates,
    open_event_stream,
    parse_event_stream,
    read_candidates,
    read_repos,
    write_candidates,
    write_repos,
)
from .models import CandidateCommit, CommitSource, RepoMetadata
from .pipeline import read_baseline, read_records, run_extraction, scan_corpus, write_baseline, write_jsonl
from .report import build_report, load_report, render_summary, report_document, write_csv_tables, write_report

logger = logging.getLogger(__name__)

LOG_LEVELS = ["debug", "info", "warning", "error", "critical"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INPUT = 2
EXIT_NO_SOURCES = 3

CANDIDATES_FILE = "candidates.jsonl"
RECORDS_FILE = "records.jsonl"
DIAGNOSTICS_FILE = "diagnostics.jsonl"
REPOS_FILE = "repos.jsonl"
REPORT_FILE = "report.json"
BASELINE_FILE = "baseline.json"
BASELINE_DIAGNOSTICS_FILE = "baseline_diagnostics.jsonl"


class InputPathError(Exception):
    """An input path given on the command line cannot be read."""


T = TypeVar("T")


def _require(path: Path, directory: bool = False) -> Path:
    if not path.exists():
        raise InputPathError(f"Input path does not exist: {path}")
    if directory and not path.is_dir():
        raise InputPathError(f"Input path is not a directory: {path}")
    if not directory and not path.is_file():
        raise InputPathError(f"Input path is not a file: {path}")
    if not os.access(path, os.R_OK):
        raise InputPathError(f"Input path is not readable: {path}")
    return path


def _read_input(reader: Callable[[Path], T], path: Path) -> T:
    """Run a file reader, reporting I/O and decoding failures with the path."""
    try:
        return reader(path)
    except (OSError, UnicodeDecodeError) as e:
        raise InputPathError(f"Unreadable input {path}: {e}") from e


def _optional_input(explicit: Optional[Path], default: Path) -> Optional[Path]:
    """An explicit path must exist; the default one is used only if present."""
    if explicit is not None:
        return _require(explicit)
    return default if default.exists() else None


def config_show(settings: Settings) -> None:
    """Show current configuration."""
    print("Current Configuration:")
    print(f"  Client: {settings.client}")
    print(f"  Source: {settings.source}")
    print(f"  Fixture Dir: {settings.fixture_dir}")
    print(f"  Output Dir: {settings.output_dir}")
    print(f"  First Commit Only: {effective_first_commit_only(settings)}")
    print(f"  Case Sensitive: {settings.case_sensitive}")
    print(f"  Extended Extensions: {settings.extended_extensions}")
    print(f"  Count Logical Operators: {settings.count_logical_operators}")
    print(f"  Extra Console Methods: {settings.extra_console_methods}")
    print(f"  Diff Source: {settings.diff_source}")
    print(f"  Parallelism: {settings.parallelism}")
    print(f"  Query Date: {settings.query_date.isoformat() if settings.query_date else 'now'}")
    print(f"  GitHub Token: {'set' if settings.github_token else 'not set'}")
    print(f"  Log Level: {settings.log_level}")
    print()
    print("Available Clients:")
    for client_type, description in get_available_clients().items():
        marker = " (current)" if client_type == settings.client else ""
        print(f"  {client_type}: {description}{marker}")


def _ingest_file(path: Path, settings: Settings) -> Tuple[List[CandidateCommit], IngestStats]:
    stats = IngestStats()
    try:
        with open_event_stream(path) as stream:
            events = list(parse_event_stream(stream, stats))
    except OSError as e:
        raise InputPathError(f"Unreadable input {path}: {e}") from e
    candidates = list(
        extract_candidates(
            events,
            source=settings.source,
            first_commit_only=effective_first_commit_only(settings),
            case_sensitive=settings.case_sensitive,
            dotall=settings.dotall,
            since=settings.since,
            until=settings.until,
        )
    )
    logger.info(f"{path}: {stats.push_events} push events, {len(candidates)} matching commits")
    return candidates, stats


def cmd_filter_events(settings: Settings) -> int:
    """Filter push-event archives down to deduplicated candidate commits."""
    paths = [_require(path) for path in settings.input_paths]
    with ThreadPoolExecutor(max_workers=settings.parallelism) as executor:
        results = list(executor.map(lambda path: _ingest_file(path, settings), paths))

    stats = IngestStats()
    matched: List[CandidateCommit] = []
    for candidates, file_stats in results:
        matched.extend(candidates)
        stats = stats.merge(file_stats)
    deduped = dedupe_candidates(matched)

    output = settings.output_dir / CANDIDATES_FILE
    write_candidates(output, deduped)
    print(f"Events read: {stats.lines} ({stats.push_events} push, {stats.skipped_lines} malformed)")
    print(f"Commits matched: {len(matched)}")
    print(f"Candidates after dedupe: {len(deduped)} -> {output}")
    return EXIT_OK


def cmd_scan_local(settings: Settings, repo_name: str) -> int:
    """Collect removal commits from a local clone as candidates."""
    from .client_git import scan_local_repository

    repo_path = _require(settings.local_repo_path or Path("."), directory=True)
    candidates = dedupe_candidates(
        scan_local_repository(
            repo_path,
            repo_name,
            case_sensitive=settings.case_sensitive,
            dotall=settings.dotall,
            since=settings.since,
            until=settings.until,
        )
    )
    output = settings.output_dir / CANDIDATES_FILE
    write_candidates(output, candidates)
    print(f"Candidates from {repo_path}: {len(candidates)} -> {output}")
    return EXIT_OK


def cmd_extract(settings: Settings, candidates_path: Optional[Path]) -> int:
    """Extract deleted console.log calls from every candidate commit."""
    path = _require(candidates_path or settings.output_dir / CANDIDATES_FILE)
    candidates = _read_input(read_candidates, path)
    client = create_client(settings)
    try:
        records, diagnostics = run_extraction(candidates, client, settings)
    finally:
        close = getattr(client, "close", None)
        if callable(close):
            close()

    write_jsonl(settings.output_dir / RECORDS_FILE, records)
    write_jsonl(settings.output_dir / DIAGNOSTICS_FILE, diagnostics)
    statuses = {status: sum(d.status == status for d in diagnostics) for status in ("ok", "unavailable", "error")}
    print(f"Commits: {len(candidates)} (ok {statuses['ok']}, unavailable {statuses['unavailable']}, error {statuses['error']})")
    print(f"Records: {len(records)} -> {settings.output_dir / RECORDS_FILE}")
    return EXIT_OK


def cmd_fetch_repos(settings: Settings, candidates_path: Optional[Path]) -> int:
    """Fetch metadata for every repository named by the candidates."""
    path = _require(candidates_path or settings.output_dir / CANDIDATES_FILE)
    names = list(dict.fromkeys(candidate.repo_full_name for candidate in _read_input(read_candidates, path)))
    client = create_client(settings)

    def fetch(name: str) -> Optional[RepoMetadata]:
        try:
            return client.fetch_repo_metadata(name)
        except (AdhocLogMinerError, ValueError) as e:
            logger.warning(f"Skipping repository {name}: {e}")
            return None

    try:
        with ThreadPoolExecutor(max_workers=settings.parallelism) as executor:
            repos = [repo for repo in executor.map(fetch, names) if repo is not None]
    finally:
        close = getattr(client, "close", None)
        if callable(close):
            close()

    output = settings.output_dir / REPOS_FILE
    write_repos(output, repos)
    print(f"Repositories: {len(repos)} of {len(names)} -> {output}")
    return EXIT_OK


def cmd_analyze(settings: Settings, args: argparse.Namespace) -> int:
    """Compute every corpus statistic over an extracted record file."""
    records = _read_input(read_records, _require(args.records or settings.output_dir / RECORDS_FILE))
    repos_path = _optional_input(args.repos, settings.output_dir / REPOS_FILE)
    candidates_path = _optional_input(args.candidates, settings.output_dir / CANDIDATES_FILE)
    baseline_path = _optional_input(args.baseline, settings.output_dir / BASELINE_FILE)

    repos = _read_input(read_repos, repos_path) if repos_path else None

    report = build_report(
        records,
        repos=repos,
        candidates=_read_input(read_candidates, candidates_path) if candidates_path else None,
        baseline=_read_input(read_baseline, baseline_path) if baseline_path else None,
        query_date=effective_query_date(settings, [repo.last_updated for repo in repos or []]),
        top_n=settings.top_n,
        word_boundary=settings.label_word_boundary,
    )
    output = settings.output_dir / REPORT_FILE
    write_report(report, output)
    if args.csv:
        write_csv_tables(report_document(report), settings.output_dir / "csv")
    print(f"Report over {len(records)} records -> {output}")
    return EXIT_OK


def cmd_baseline(settings: Settings, corpus_dir: Path) -> int:
    """Count function kinds across a corpus of source files."""
    _require(corpus_dir, directory=True)
    counts, diagnostics = scan_corpus(corpus_dir, settings)
    write_jsonl(settings.output_dir / BASELINE_DIAGNOSTICS_FILE, diagnostics)
    if counts.files == 0:
        print(f"No parseable source files under {corpus_dir}", file=sys.stderr)
        return EXIT_NO_SOURCES

    output = settings.output_dir / BASELINE_FILE
    write_baseline(output, counts)
    skipped = sum(1 for d in diagnostics if d.parse_error)
    print(f"Files: {counts.files} parsed, {skipped} unparseable")
    print(f"Functions: {counts.total}")
    print(f"  async:     {counts.async_count}")
    print(f"  anonymous: {counts.anonymous_count}")
    print(f"  callback:  {counts.callback_count}")
    print(f"  others:    {counts.others}")
    print(f"-> {output}")
    return EXIT_OK


def cmd_report(settings: Settings, report_path: Optional[Path]) -> int:
    """Export an analysis document to CSV tables and print a digest."""
    document = _read_input(load_report, _require(report_path or settings.output_dir / REPORT_FILE))
    written = write_csv_tables(document, settings.output_dir / "csv")
    print(render_summary(document))
    print(f"{len(written)} CSV tables -> {settings.output_dir / 'csv'}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="TOML config file; flags override its values.")
    parser.add_argument("--output-dir", type=Path, help="Directory for all outputs (default: out).")
    parser.add_argument("--log-level", type=str, choices=LOG_LEVELS, help="Log level (default: info).")
    parser.add_argument("--parallelism", type=int, help="Worker threads (default: 1).")


def _add_matching(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--case-sensitive",
        action=argparse.BooleanOptionalAction,
        help="Match the removal pattern case-sensitively (default: off).",
    )
    parser.add_argument(
        "--dotall",
        action=argparse.BooleanOptionalAction,
        help="Let the removal pattern span lines of the message (default: off).",
    )
    parser.add_argument("--since", type=datetime.fromisoformat, help="Earliest push time, ISO 8601.")
    parser.add_argument("--until", type=datetime.fromisoformat, help="Latest push time, ISO 8601.")


def _add_client(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--client",
        type=str,
        choices=list(get_available_clients().keys()),
        help="Commit data source (default: fixture).",
    )
    parser.add_argument("--fixture-dir", type=Path, help="Fixture store directory (default: fixtures).")
    parser.add_argument("--local-repo", dest="local_repo_path", type=Path, help="Local clone for the git client.")
    parser.add_argument(
        "--record",
        action=argparse.BooleanOptionalAction,
        help="Save live responses into the fixture store (default: off).",
    )
    parser.add_argument("--query-date", type=datetime.fromisoformat, help="Reference date for activity checks.")


def _add_extraction(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--extended-extensions",
        action=argparse.BooleanOptionalAction,
        help="Also analyze .jsx/.tsx/.mjs/.cjs files (default: off).",
    )
    parser.add_argument(
        "--logical-operators",
        dest="count_logical_operators",
        action=argparse.BooleanOptionalAction,
        help="Count &&, || and ?? in cyclomatic complexity (default: on).",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Mine removed console.log statements from commits and analyze them."
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    filter_parser = subparsers.add_parser(
        "filter-events", help="Select commits whose message announces removing console.log."
    )
    filter_parser.add_argument("inputs", nargs="+", type=Path, help="Event archive files (plain or gzip).")
    filter_parser.add_argument(
        "--source",
        type=str,
        choices=[CommitSource.ARCHIVE.value, CommitSource.QUERY_SAMPLE.value],
        help="Source label of the input (default: archive).",
    )
    filter_parser.add_argument(
        "--first-commit-only",
        action=argparse.BooleanOptionalAction,
        help="Check only the first commit of each push (default: on for query-sample).",
    )
    _add_matching(filter_parser)
    _add_common(filter_parser)

    scan_parser = subparsers.add_parser("scan-local", help="Collect removal commits from a local clone.")
    scan_parser.add_argument("repo_path", type=Path, help="Path to the local clone.")
    scan_parser.add_argument("--repo-name", required=True, help="Repository name as owner/name.")
    _add_matching(scan_parser)
    _add_common(scan_parser)

    extract_parser = subparsers.add_parser("extract", help="Extract deleted console.log calls.")
    extract_parser.add_argument("--candidates", type=Path, help="Candidate file (default: <output>/candidates.jsonl).")
    extract_parser.add_argument(
        "--extra-console-methods",
        action=argparse.BooleanOptionalAction,
        help="Also extract console.info/warn/error/debug (default: off).",
    )
    extract_parser.add_argument(
        "--diff-source",
        type=str,
        choices=["auto", "content", "patch"],
        help="Diff file contents, parse patches, or choose per file (default: auto).",
    )
    _add_client(extract_parser)
    _add_extraction(extract_parser)
    _add_common(extract_parser)

    repos_parser = subparsers.add_parser("fetch-repos", help="Fetch metadata of candidate repositories.")
    repos_parser.add_argument("--candidates", type=Path, help="Candidate file (default: <output>/candidates.jsonl).")
    _add_client(repos_parser)
    _add_common(repos_parser)

    analyze_parser = subparsers.add_parser("analyze", help="Compute corpus statistics over extracted records.")
    analyze_parser.add_argument("--records", type=Path, help="Record file (default: <output>/records.jsonl).")
    analyze_parser.add_argument("--repos", type=Path, help="Repository file (default: <output>/repos.jsonl if present).")
    analyze_parser.add_argument(
        "--candidates", type=Path, help="Candidate file (default: <output>/candidates.jsonl if present)."
    )
    analyze_parser.add_argument(
        "--baseline", type=Path, help="Baseline counts (default: <output>/baseline.json if present)."
    )
    analyze_parser.add_argument("--top-n", type=int, help="Length of top-name tables (default: 10).")
    analyze_parser.add_argument(
        "--label-word-boundary",
        action=argparse.BooleanOptionalAction,
        help="Require whole-word matches when detecting labels (default: off).",
    )
    analyze_parser.add_argument("--query-date", type=datetime.fromisoformat, help="Reference date for activity.")
    analyze_parser.add_argument("--csv", action="store_true", help="Also write per-table CSV files.")
    _add_common(analyze_parser)

    baseline_parser = subparsers.add_parser("baseline", help="Count function kinds over a source corpus.")
    baseline_parser.add_argument("corpus_dir", type=Path, help="Directory of JavaScript/TypeScript sources.")
    _add_extraction(baseline_parser)
    _add_common(baseline_parser)

    report_parser = subparsers.add_parser("report", help="Export a report to CSV tables and print a digest.")
    report_parser.add_argument("--report", type=Path, help="Report file (default: <output>/report.json).")
    _add_common(report_parser)

    config_parser = subparsers.add_parser("config", help="Configuration management.")
    config_subparsers = config_parser.add_subparsers(dest="config_action", help="Config actions")
    show_parser = config_subparsers.add_parser("show", help="Show current configuration.")
    show_parser.add_argument("--config", type=Path, help="TOML config file.")
    return parser


def _settings_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Command-line values for every option that shares a name with a Settings field."""
    return {name: value for name, value in vars(args).items() if name in Settings.model_fields}


def _dispatch(args: argparse.Namespace, settings: Settings) -> int:
    commands: Dict[str, Callable[[], int]] = {
        "filter-events": lambda: cmd_filter_events(settings),
        "scan-local": lambda: cmd_scan_local(settings, args.repo_name),
        "extract": lambda: cmd_extract(settings, args.candidates),
        "fetch-repos": lambda: cmd_fetch_repos(settings, args.candidates),
        "analyze": lambda: cmd_analyze(settings, args),
        "baseline": lambda: cmd_baseline(settings, args.corpus_dir),
        "report": lambda: cmd_report(settings, args.report),
    }
    return commands[args.command]()


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_OK

    overrides = _settings_overrides(args)
    if args.command == "filter-events":
        overrides["input_paths"] = args.inputs
    elif args.command == "baseline":
        overrides["input_paths"] = [args.corpus_dir]
    elif args.command == "scan-local":
        overrides["local_repo_path"] = args.repo_path
        overrides["source"] = CommitSource.LOCAL

    try:
        settings = load_settings(getattr(args, "config", None), **overrides)
    except (ValidationError, ValueError, OSError, tomllib.TOMLDecodeError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    if args.command == "config":
        if args.config_action == "show":
            config_show(settings)
            return EXIT_OK
        parser.print_help()
        return EXIT_OK

    settings.output_dir.mkdir(parents=True, exist_ok=True)
    try:
        return _dispatch(args, settings)
    except InputPathError as e:
        print(str(e), file=sys.stderr)
        return EXIT_INPUT
    except (IngestError, ValidationError, json.JSONDecodeError, OSError, UnicodeDecodeError) as e:
        print(f"Unreadable input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    """Entry point for the CLI."""
    code = run()
    if code:
        sys.exit(code)


if __name__ == "__main__":
    main()
