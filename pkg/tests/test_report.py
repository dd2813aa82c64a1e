# -*- coding: utf-8 -*-
"""Tests for report assembly, serialization and CSV export."""

import csv
import json
import math
from datetime import datetime, timedelta, timezone

import pytest
from conftest import in_function, make_candidate, make_record, make_sha

from adhoc_log_miner.models import LogArgument, RepoMetadata
from adhoc_log_miner.report import (
    build_report,
    load_report,
    render_summary,
    report_document,
    round_significant,
    semantics_summary,
    write_csv_tables,
    write_report,
)
from adhoc_log_miner.stats import BaselineCounts

QUERY_DATE = datetime(2024, 10, 29, tzinfo=timezone.utc)


def args(*pairs):
    return [LogArgument(text=text, type_of_arg=kind) for text, kind in pairs]


def sample_records():
    pushed = datetime(2024, 8, 14, tzinfo=timezone.utc)
    return [
        make_record(
            arguments=args(("'Results: '", "Literal"), ("results", "Identifier")),
            event_time=pushed,
            is_async_function=True,
            **in_function("render", 3, line=10),
        ),
        make_record(
            arguments=args(("'>>>'", "Literal"), ("x", "Identifier")),
            event_time=pushed,
            **in_function("render", 3, line=10),
        ),
        make_record(
            arguments=args(("JSON.stringify(o)", "CallExpression")),
            embedded_calls=["JSON.stringify"],
            event_time=pushed - timedelta(days=31),
            commit_sha=make_sha("c2"),
            **in_function("load", 5, line=40),
        ),
        make_record(commit_sha=make_sha("c2"), block_statement="IfStatement"),
    ]


class TestSemanticsSummary:
    """Test cases for argument statistics."""

    def test_counts_and_shares(self):
        summary = semantics_summary(sample_records())

        assert summary.arg_counts.counts == {"1": 2, "2": 2}
        assert summary.two_argument == 2
        assert summary.two_argument_with_string_literal == 2
        assert summary.labeled == 1
        assert summary.label_share == 0.5
        assert summary.records_with_embedded_calls == 1
        assert [(c.name, c.count, c.share) for c in summary.top_embedded_calls] == [("JSON.stringify", 1, 1.0)]

    def test_empty(self):
        summary = semantics_summary([])
        assert summary.arg_counts.total == 0
        assert summary.string_literal_share == 0.0


class TestBuildReport:
    """Test cases for build_report."""

    def test_empty_records_give_zeroed_sections(self):
        document = report_document(build_report([]))

        assert document["counts"]["records"] == 0
        assert document["blocks"]["available"] is True
        assert document["blocks"]["distribution"]["total"] == 0
        assert document["intersections"]["total"] == 0
        assert document["top_function_names"] == {"available": True, "items": []}
        assert document["async_series_event_time"] == {"available": False}
        assert document["complexity"] == {"available": False}
        assert document["repositories"] == {"available": False}

    def test_sections_from_records(self):
        report = build_report(sample_records())

        assert report.counts.records == 4
        assert report.counts.commits == 2
        assert report.blocks.root_level_share == 0.75
        assert report.intersections.total == 4
        assert [(p.month, p.records) for p in report.async_series_event_time] == [("2024-07", 1), ("2024-08", 2)]
        assert report.async_series_author_time is None
        assert [(n.name, n.count) for n in report.top_function_names] == [("render", 2), ("load", 1)]
        assert report.complexity.logs.count == 2
        assert report.complexity.comparison is None

    def test_complexity_comparison_with_baseline(self):
        baseline = BaselineCounts(files=2, total=6, others=6, complexities=[1, 1, 2, 1, 1, 2])
        report = build_report(sample_records(), baseline=baseline)

        assert report.complexity.comparison is not None
        assert report.complexity.comparison.test.t_statistic > 0
        assert report.baseline.total == 6

    def test_repository_section_needs_query_date(self):
        repos = [
            RepoMetadata(full_name="octo/app", last_updated=QUERY_DATE - timedelta(days=40), is_active=True),
            RepoMetadata(full_name="octo/lib", last_updated=QUERY_DATE - timedelta(days=400), is_active=False),
        ]
        assert build_report([], repos=repos).repositories is None

        section = build_report([], repos=repos, query_date=QUERY_DATE).repositories
        assert section.summary.active_share == 0.5
        assert [(p.months_since_update, p.cumulative_fraction) for p in section.activity_curve] == [(1, 0.5), (13, 1.0)]

    def test_sources_section(self):
        report = build_report([], candidates=[make_candidate(seed="a"), make_candidate(seed="b")])
        assert report.sources.distribution.counts == {"archive": 2}


class TestSerialization:
    """Test cases for rounding, writing and rendering."""

    @pytest.mark.parametrize(
        "value,expected",
        [
            (0.123456789, 0.123457),
            (123456789.0, 123457000.0),
            (2, 2),
            ({"a": [1.0000001, "x"]}, {"a": [1.0, "x"]}),
        ],
    )
    def test_round_significant(self, value, expected):
        assert round_significant(value) == expected

    def test_non_finite_values_are_kept(self):
        assert math.isnan(round_significant(math.nan))

    def test_write_is_byte_identical(self, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        write_report(build_report(sample_records()), first)
        write_report(build_report(sample_records()), second)

        assert first.read_bytes() == second.read_bytes()
        assert first.read_text(encoding="utf-8").endswith("}\n")
        assert load_report(first) == json.loads(second.read_text(encoding="utf-8"))

    def test_render_summary(self):
        text = render_summary(report_document(build_report(sample_records())))
        assert text.startswith("Records: 4 from 2 commits in 1 repositories")
        assert "Logs at function root level: 75.0%" in text
        assert "labeled: 50.0%" in text


class TestCsvExport:
    """Test cases for write_csv_tables."""

    def test_tables_for_available_sections(self, tmp_path):
        document = report_document(build_report(sample_records()))
        written = write_csv_tables(document, tmp_path / "csv")
        names = {path.name for path in written}

        assert {"blocks.csv", "intersections.csv", "top_function_names.csv", "arg_counts.csv"} <= names
        assert "async_series_author_time.csv" not in names
        assert "repo_metrics.csv" not in names

        with open(tmp_path / "csv" / "blocks.csv", encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["block", "count", "fraction"]
        assert rows[1] == ["FunctionDeclaration", "3", "0.75"]
        assert rows[2] == ["IfStatement", "1", "0.25"]
