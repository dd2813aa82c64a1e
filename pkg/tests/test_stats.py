# -*- coding: utf-8 -*-
"""Tests for corpus aggregates and statistical tests."""

import math
import random
from collections import Counter
from datetime import datetime, timedelta, timezone
from itertools import product

import numpy as np
import pytest
from conftest import in_function, make_candidate, make_record, parse_js
from scipy import stats

from adhoc_log_miner.models import CommitSource, LogArgument, RepoMetadata
from adhoc_log_miner.stats import (
    INTERSECTION_CELLS,
    BaselineCounts,
    Distribution,
    IntersectionTable,
    baseline_function_distribution,
    block_distribution,
    cohens_kappa,
    complexity_comparison,
    cumulative_activity_curve,
    flag_intersections,
    intersection_key,
    log_function_complexities,
    monthly_async_series,
    months_since,
    repo_summary,
    source_distribution,
    summary_stats,
    top_names,
    welch_t_test,
)

QUERY_DATE = datetime(2024, 10, 29, tzinfo=timezone.utc)


def flagged(is_async: bool, is_callback: bool, is_anonymous: bool, **overrides):
    return make_record(
        is_async_function=is_async, is_callback_function=is_callback, is_anonymous_function=is_anonymous, **overrides
    )


def repo(days_ago: float, **overrides) -> RepoMetadata:
    fields = {
        "full_name": "octo/app",
        "last_updated": QUERY_DATE - timedelta(days=days_ago),
        "is_active": days_ago <= 183,
    }
    fields.update(overrides)
    return RepoMetadata(**fields)


class TestDistribution:
    """Test cases for block_distribution and Distribution."""

    def test_single_label(self):
        records = [make_record() for _ in range(4)]
        result = block_distribution(records)
        assert result.total == 4
        assert result.fractions == {"Program": 1.0}

    def test_hand_labeled_records(self):
        labels = ["FunctionDeclaration"] * 4 + ["IfStatement"] * 3 + ["Program"] * 2 + ["TryStatement"]
        result = block_distribution([make_record(block_statement=label) for label in labels])

        assert list(result.counts) == ["FunctionDeclaration", "IfStatement", "Program", "TryStatement"]
        assert result.fractions["FunctionDeclaration"] == pytest.approx(0.4)
        assert result.fractions["TryStatement"] == pytest.approx(0.1)
        assert sum(result.fractions.values()) == pytest.approx(1.0, abs=1e-9)

    def test_ties_are_lexicographic(self):
        result = Distribution.from_counts({"b": 2, "a": 2, "c": 5})
        assert list(result.counts) == ["c", "a", "b"]

    def test_empty(self):
        result = block_distribution([])
        assert result.total == 0
        assert result.counts == {} and result.fractions == {}

    def test_merge_matches_whole(self):
        labels = ["Program", "IfStatement", "For", "Program", "CatchClause", "For", "For"]
        records = [make_record(block_statement=label) for label in labels]
        merged = block_distribution(records[:3]).merge(block_distribution(records[3:]))
        assert merged == block_distribution(records)


class TestFlagIntersections:
    """Test cases for the exclusive async/callback/anonymous cells."""

    def test_single_record(self):
        table = flag_intersections([flagged(True, True, True)])
        assert table.cell(True, True, True) == 1
        assert sum(table.cells.values()) == 1

    def test_all_eight_triples(self):
        table = flag_intersections([flagged(*triple) for triple in product((True, False), repeat=3)])
        assert set(table.cells.values()) == {1}
        assert len(INTERSECTION_CELLS) == 8

    def test_cell_names(self):
        assert intersection_key(True, False, True) == "async+anonymous"
        assert intersection_key(False, False, False) == "none"

    def test_partition_against_enumeration(self):
        """Random records across 100 seeds: cells partition and match a brute-force count."""
        prototypes = {triple: flagged(*triple) for triple in product((True, False), repeat=3)}
        triples = list(prototypes)
        for seed in range(100):
            rng = random.Random(seed)
            drawn = [rng.choice(triples) for _ in range(10_000)]
            table = flag_intersections(prototypes[triple] for triple in drawn)

            assert table.total == 10_000
            assert sum(table.cells.values()) == 10_000
            expected = Counter(drawn)
            for triple in triples:
                assert table.cell(*triple) == expected[triple]

    def test_merge(self):
        first = flag_intersections([flagged(True, False, False), flagged(False, False, False)])
        second = flag_intersections([flagged(True, False, False)])
        merged = first.merge(second)
        assert merged.total == 3
        assert merged.cell(True, False, False) == 2
        assert merged == second.merge(first)
        assert IntersectionTable().merge(merged) == merged


class TestMonthlyAsyncSeries:
    """Test cases for the monthly async share."""

    def at(self, year: int, month: int, is_async: bool, **overrides):
        return make_record(
            is_async_function=is_async, event_time=datetime(year, month, 15, tzinfo=timezone.utc), **overrides
        )

    def test_one_async_record(self):
        series = monthly_async_series([self.at(2024, 8, True)])
        assert [(p.month, p.records, p.percentage) for p in series] == [("2024-08", 1, 100.0)]

    def test_half_async(self):
        records = [self.at(2024, 8, flag) for flag in (True, True, False, False)]
        assert monthly_async_series(records)[0].percentage == 50.0

    def test_three_months(self):
        records = [
            self.at(2024, 6, False),
            self.at(2024, 8, True),
            self.at(2024, 6, True),
            self.at(2024, 7, False),
            self.at(2024, 8, True),
            self.at(2024, 6, False),
            self.at(2024, 6, False),
        ]
        series = monthly_async_series(records)
        assert [(p.month, p.records, p.percentage) for p in series] == [
            ("2024-06", 4, 25.0),
            ("2024-07", 1, 0.0),
            ("2024-08", 2, 100.0),
        ]

    def test_author_time_series_and_missing_timestamps(self):
        records = [
            self.at(2024, 8, True, author_time=datetime(2024, 7, 31, 23, 0, tzinfo=timezone.utc)),
            make_record(is_async_function=True),
        ]
        assert [p.month for p in monthly_async_series(records, "author_time")] == ["2024-07"]
        assert [p.month for p in monthly_async_series(records)] == ["2024-08"]

    def test_months_are_utc(self):
        offset = timezone(timedelta(hours=-5))
        record = make_record(event_time=datetime(2024, 8, 31, 22, 0, tzinfo=offset))
        assert monthly_async_series([record])[0].month == "2024-09"


class TestTopNames:
    """Test cases for top-N frequency tables."""

    def test_function_names(self):
        records = [make_record(**in_function("render", 1))] * 3 + [make_record(**in_function("init", 1))]
        assert top_names(records, "function_name", 2) == [("render", 3), ("init", 1)]
        assert top_names(records, "function_name", 10) == [("render", 3), ("init", 1)]

    def test_placeholders_are_skipped(self):
        records = [make_record(), make_record(**in_function("(anonymous)", 1)), make_record(**in_function("go", 1))]
        assert top_names(records, "function_name", 5) == [("go", 1)]

    def test_callback_callee_names(self):
        records = [
            make_record(callback_callee_name="then"),
            make_record(callback_callee_name="then"),
            make_record(callback_callee_name="setTimeout"),
            make_record(),
        ]
        assert top_names(records, "callback_callee_name", 5) == [("then", 2), ("setTimeout", 1)]

    def test_normalized_literals(self):
        def literal_record(*texts):
            return make_record(arguments=[LogArgument(text=t, type_of_arg="Literal") for t in texts])

        records = [
            literal_record("'-----'"),
            literal_record("'----------'", "42"),
            literal_record("7"),
            make_record(arguments=[LogArgument(text="`a=${a}`", type_of_arg="TemplateLiteral")]),
        ]
        assert top_names(records, "normalized_literal", 5) == [("-R", 2), ("<NUM>", 2), ("a=${a}", 1)]

    def test_prefix_of_full_ranking(self):
        rng = random.Random(4)
        names = ["a", "b", "c", "d", "e", "f"]
        records = [make_record(**in_function(rng.choice(names), 1)) for _ in range(200)]
        full = top_names(records, "function_name", len(names))
        assert full == sorted(Counter(r.function_name for r in records).items(), key=lambda i: (-i[1], i[0]))
        for n in range(1, len(names) + 1):
            assert top_names(records, "function_name", n) == full[:n]

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            top_names([], "function_name", 0)


class TestWelchTTest:
    """Test cases for Welch's t-test."""

    def test_hand_evaluated_example(self):
        result = welch_t_test([1, 2, 3], [2, 4, 6])
        assert result.t_statistic == pytest.approx(-1.5492, abs=1e-4)
        assert result.degrees_of_freedom == pytest.approx(2.9412, abs=1e-4)

    def test_identical_samples(self):
        result = welch_t_test([1, 2, 3, 4], [1, 2, 3, 4])
        assert result.t_statistic == 0.0
        assert result.p_value == pytest.approx(0.5, abs=1e-10)

    def test_antisymmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.normal(0, 1, size=int(rng.integers(2, 30)))
            b = rng.normal(0.3, 2, size=int(rng.integers(2, 30)))
            ab, ba = welch_t_test(a, b), welch_t_test(b, a)
            assert ab.t_statistic == pytest.approx(-ba.t_statistic, abs=1e-12)
            assert ab.p_value == pytest.approx(1.0 - ba.p_value, abs=1e-12)
            assert ab.degrees_of_freedom == pytest.approx(ba.degrees_of_freedom, abs=1e-12)

    def test_degrees_of_freedom_bounds(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            n_a, n_b = int(rng.integers(2, 40)), int(rng.integers(2, 40))
            a, b = rng.normal(0, rng.uniform(0.1, 5), n_a), rng.normal(0, rng.uniform(0.1, 5), n_b)
            df = welch_t_test(a, b).degrees_of_freedom
            assert min(n_a, n_b) - 1 - 1e-9 <= df <= n_a + n_b - 2 + 1e-9

    def test_known_shift(self):
        rng = np.random.default_rng(21)
        a = rng.normal(1.0, 1.0, 1000)
        b = rng.normal(0.0, 1.5, 1000)
        result = welch_t_test(a, b)
        assert result.t_statistic > 0
        assert result.p_value < 0.001

    def test_matches_scipy_reference(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            a = rng.normal(0.2, 1.0, int(rng.integers(3, 40)))
            b = rng.normal(0.0, 2.0, int(rng.integers(3, 40)))
            greater = stats.ttest_ind(a, b, equal_var=False, alternative="greater")
            both = stats.ttest_ind(a, b, equal_var=False)

            assert welch_t_test(a, b).t_statistic == pytest.approx(float(greater.statistic), abs=1e-10)
            assert welch_t_test(a, b).p_value == pytest.approx(float(greater.pvalue), abs=1e-10)
            assert welch_t_test(a, b, "two-sided").p_value == pytest.approx(float(both.pvalue), abs=1e-10)

    @pytest.mark.parametrize("a,b", [([1], [1, 2]), ([1, 2], []), ([3, 3], [5, 5])])
    def test_invalid_samples(self, a, b):
        with pytest.raises(ValueError):
            welch_t_test(a, b)


class TestSummaryStats:
    """Test cases for summary_stats."""

    def test_single_value(self):
        result = summary_stats([5])
        assert (result.mean, result.std_dev, result.median) == (5.0, 0.0, 5.0)

    def test_even_median(self):
        assert summary_stats([1, 2, 3, 4]).median == 2.5

    def test_against_formulae(self):
        rng = random.Random(50)
        values = [rng.uniform(-100, 100) for _ in range(50)]
        result = summary_stats(values)
        mean = sum(values) / 50
        ordered = sorted(values)
        assert result.mean == pytest.approx(mean)
        assert result.std_dev == pytest.approx(math.sqrt(sum((v - mean) ** 2 for v in values) / 49))
        assert result.median == pytest.approx((ordered[24] + ordered[25]) / 2)
        assert result.min <= result.median <= result.max

    def test_empty(self):
        with pytest.raises(ValueError):
            summary_stats([])


class TestActivityCurve:
    """Test cases for months_since and the cumulative activity curve."""

    def test_all_recent(self):
        assert cumulative_activity_curve([repo(1), repo(2)], QUERY_DATE) == [(0, 1.0)]

    def test_two_groups(self):
        repos = [repo(31), repo(31), repo(366), repo(366)]
        assert cumulative_activity_curve(repos, QUERY_DATE) == [(1, 0.5), (12, 1.0)]

    def test_monotone_and_complete(self):
        rng = random.Random(30)
        repos = [repo(rng.uniform(0, 1500)) for _ in range(30)]
        curve = cumulative_activity_curve(repos, QUERY_DATE)
        gaps = [months_since(r.last_updated, QUERY_DATE) for r in repos]

        assert curve[-1][1] == pytest.approx(1.0)
        assert all(earlier[1] <= later[1] for earlier, later in zip(curve, curve[1:]))
        for gap, fraction in curve:
            assert fraction == pytest.approx(sum(g <= gap for g in gaps) / 30)

    def test_empty(self):
        assert cumulative_activity_curve([], QUERY_DATE) == []

    def test_months_since(self):
        assert months_since(QUERY_DATE - timedelta(days=30), QUERY_DATE) == 0
        assert months_since(QUERY_DATE - timedelta(days=61), QUERY_DATE) == 2
        with pytest.raises(ValueError):
            months_since(QUERY_DATE + timedelta(days=1), QUERY_DATE)


class TestBaselineFunctionDistribution:
    """Test cases for baseline function counts."""

    def test_async_function(self):
        counts = baseline_function_distribution([parse_js("async function f(){}")])
        assert (counts.total, counts.async_count, counts.others) == (1, 1, 0)
        assert counts.complexities == [1]

    def test_map_callback(self):
        counts = baseline_function_distribution([parse_js("arr.map(x=>x);")])
        assert (counts.total, counts.anonymous_count, counts.callback_count) == (1, 1, 1)

    def test_fixture_corpus(self):
        """Counts agree with classifying each kind of function by hand."""
        snippets = {
            "function plain() {}": (False, False, False),
            "async function a() {}": (True, False, False),
            "run(function named() {});": (False, True, False),
            "const v = () => {};": (False, False, True),
            "run(async () => {});": (True, True, True),
        }
        sources = []
        expected = BaselineCounts()
        rng = random.Random(40)
        for index in range(40):
            snippet = rng.choice(list(snippets))
            is_async, is_callback, is_anonymous = snippets[snippet]
            sources.append(parse_js(snippet, f"src/f{index}.js"))
            expected.total += 1
            expected.async_count += is_async
            expected.callback_count += is_callback
            expected.anonymous_count += is_anonymous
            expected.others += not (is_async or is_callback or is_anonymous)

        counts = baseline_function_distribution(sources)
        assert counts.files == 40
        assert (counts.total, counts.async_count, counts.callback_count, counts.anonymous_count, counts.others) == (
            expected.total,
            expected.async_count,
            expected.callback_count,
            expected.anonymous_count,
            expected.others,
        )

    def test_merge(self):
        first = baseline_function_distribution([parse_js("function f() { if (a) {} }")])
        second = baseline_function_distribution([parse_js("arr.map(x => x);")])
        merged = first.merge(second)
        assert merged.files == 2 and merged.total == 2
        assert merged.complexities == [2, 1]
        assert first.complexities == [2]

    def test_add_accumulates_in_place(self):
        counts = BaselineCounts()
        complexities = counts.complexities
        for source in ("function f() { if (a) {} }", "arr.map(x => x);", "function g() {}"):
            counts.add(baseline_function_distribution([parse_js(source)]))

        assert counts.files == 3 and counts.total == 3
        assert counts.callback_count == 1
        assert counts.complexities is complexities
        assert complexities == [2, 1, 1]


class TestCohensKappa:
    """Test cases for Cohen's kappa."""

    def test_identical(self):
        assert cohens_kappa(["a", "b", "a", "c"], ["a", "b", "a", "c"]) == 1.0

    def test_hand_example(self):
        assert cohens_kappa(["x", "x", "y", "y"], ["x", "y", "x", "y"]) == pytest.approx(0.0, abs=1e-12)

    def test_twenty_items(self):
        a = ["yes"] * 10 + ["no"] * 10
        b = ["yes"] * 8 + ["no"] * 2 + ["yes"] * 3 + ["no"] * 7
        p_o = 15 / 20
        p_e = (10 * 11 + 10 * 9) / 400
        assert cohens_kappa(a, b) == pytest.approx((p_o - p_e) / (1 - p_e))

    def test_range(self):
        rng = random.Random(77)
        for _ in range(100):
            n = rng.randint(2, 30)
            a = [rng.choice("abc") for _ in range(n)]
            b = [rng.choice("abc") for _ in range(n)]
            kappa = cohens_kappa(a, b)
            assert math.isnan(kappa) or -1.0 <= kappa <= 1.0

    def test_single_shared_label_is_undefined(self):
        assert math.isnan(cohens_kappa(["a", "a"], ["a", "a"]))

    def test_invalid(self):
        with pytest.raises(ValueError):
            cohens_kappa(["a"], ["a", "b"])
        with pytest.raises(ValueError):
            cohens_kappa([], [])


class TestComplexityComparison:
    """Test cases for the log-hosting versus baseline complexity test."""

    def test_functions_are_counted_once(self):
        records = [
            make_record(**in_function("render", 5, line=10)),
            make_record(**in_function("render", 5, line=10)),
            make_record(**in_function("init", 2, line=40)),
            make_record(),
        ]
        assert sorted(log_function_complexities(records)) == [2, 5]

    def test_comparison(self):
        records = [make_record(**in_function(f"f{i}", 4 + i % 3, line=i + 1)) for i in range(20)]
        result = complexity_comparison(records, [1, 1, 2, 1, 3, 1, 2, 1])
        assert result is not None
        assert result.test.t_statistic > 0
        assert result.logs.count == 20
        assert result.baseline.count == 8

    def test_too_few_functions(self):
        records = [make_record(**in_function("only", 3))]
        assert complexity_comparison(records, [1, 2, 3]) is None


class TestRepositoryAndSources:
    """Test cases for repository and candidate source summaries."""

    def test_repo_summary(self):
        repos = [repo(10, stars=10, contributors=2), repo(400, stars=0, contributors=1), repo(20, stars=5)]
        summary = repo_summary(repos)
        assert summary.count == 3
        assert summary.active_share == pytest.approx(2 / 3)
        assert summary.stars.median == 5.0
        assert repo_summary([]) is None

    def test_source_distribution(self):
        candidates = [
            make_candidate(seed="a", event_time=datetime(2023, 5, 1, tzinfo=timezone.utc)),
            make_candidate(seed="b", source=CommitSource.QUERY_SAMPLE),
            make_candidate(seed="c"),
        ]
        distribution, by_year = source_distribution(candidates)
        assert distribution.counts == {"archive": 2, "query-sample": 1}
        assert by_year == {"2023": {"archive": 1}, "2024": {"archive": 1, "query-sample": 1}}
