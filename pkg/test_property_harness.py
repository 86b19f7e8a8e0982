"""
Tests for the seeded property suites

Run with: pytest test_property_harness.py -v
"""

import json

import pytest

from presets import get_preset, preset_names
from property_harness import DESK_GROUPS, SUITES, PropertyHarness, PropertyResult


@pytest.fixture
def harness(tmp_path):
    return PropertyHarness(str(tmp_path / "results"))


class TestSuites:
    """Every suite passes on small groups"""

    @pytest.mark.parametrize("name", sorted(SUITES))
    def test_suite_passes_on_small_groups(self, harness, name):
        results = harness.run_suite(SUITES[name], seed=1, groups=["C2", "S3"])
        summary = harness.compute_summary(SUITES[name], results, seed=1)
        failures = [f"{r.group} {r.case_id}: {r.error or r.detail}" for r in results if not r.passed]
        print(f"\n✓ {name}: {summary.passed}/{summary.total_cases}")
        assert summary.total_cases > 0
        assert summary.ok, "\n".join(failures)

    def test_same_seed_same_cases(self, harness):
        suite = SUITES["double-coset"]
        first = harness.run_suite(suite, seed=7, groups=["C4"])
        second = harness.run_suite(suite, seed=7, groups=["C4"])
        assert [(r.case_id, r.detail) for r in first] == [(r.case_id, r.detail) for r in second]

    def test_suite_groups_are_presets(self):
        for suite in SUITES.values():
            assert suite.groups
            assert set(suite.groups) <= set(preset_names()) | {"trivial"}, suite.name
            assert suite.quick_samples <= suite.full_samples

    def test_suites_cover_the_acceptance_groups(self):
        orders = {name: get_preset(name).order for name in preset_names()}

        def up_to(bound):
            return {name for name, order in orders.items() if 1 < order <= bound}

        for name in ["universe-axioms", "unisum", "double-coset", "product-composition"]:
            assert set(DESK_GROUPS) <= set(SUITES[name].groups), name
        assert up_to(12) <= set(SUITES["burnside"].groups)
        assert up_to(8) <= set(SUITES["span-laws"].groups)


class TestSummaries:
    """Tests for compute_summary, save_results and compare_suites"""

    def test_summary_counts(self, harness):
        suite = SUITES["burnside"]
        results = [
            PropertyResult("burnside", "C2", "0", True, latency_seconds=0.2),
            PropertyResult("burnside", "C2", "1", False, error="CapExceededError: too big"),
            PropertyResult("burnside", "S3", "0", False),
        ]
        summary = harness.compute_summary(suite, results, seed=3)
        assert (summary.total_cases, summary.passed, summary.failed) == (3, 1, 2)
        assert summary.failed_by_group == {"C2": 1, "S3": 1}
        assert summary.pass_rate == pytest.approx(1 / 3)
        assert not summary.ok

    def test_empty_summary(self, harness):
        summary = harness.compute_summary(SUITES["burnside"], [])
        assert summary.pass_rate == 0.0
        assert summary.ok

    def test_save_results(self, harness):
        suite = SUITES["universe-extremes"]
        results = harness.run_suite(suite, groups=["C2"])
        summary = harness.compute_summary(suite, results)
        run_dir = harness.save_results(suite, results, summary)

        assert sorted(p.name for p in run_dir.iterdir()) == ["config.json", "results.json", "summary.json"]
        saved = json.loads((run_dir / "summary.json").read_text())
        assert saved["total_cases"] == len(results)
        assert json.loads((run_dir / "config.json").read_text())["name"] == "universe-extremes"

    def test_compare_suites(self, harness, tmp_path):
        summaries = []
        for name in ["universe-extremes", "enumeration"]:
            results = harness.run_suite(SUITES[name], groups=["C3"])
            summaries.append(harness.compute_summary(SUITES[name], results))
        table = harness.compare_suites(summaries, save_to=tmp_path / "table.txt")
        assert "universe-extremes" in table and "enumeration" in table
        assert "100%" in table
        assert (tmp_path / "table.txt").read_text() == table + "\n"
