import pytest

from subfitlab.core.exceptions import InvalidInputError
from subfitlab.core.metrics import MetricsCollector, metric_key
from subfitlab.services.sweeps import SPACE_CHECK_TARGETS, TARGETS, run_sweep


class TestLatticeSweeps:
    def test_thm21(self):
        metrics = MetricsCollector()
        [summary] = run_sweep("thm21", max_n=5, jobs=1, metrics=metrics)
        assert summary.passed
        # distributive lattices with at most five elements
        assert summary.instances == 8
        assert summary.coverage["non_distributive_skipped"] == 2
        assert summary.coverage["y_join_a"] > 0
        assert summary.coverage["w_join_x"] > 0
        assert summary.coverage["tuples"] == summary.coverage["y_join_a"] + summary.coverage["w_join_x"]
        key = metric_key("sweep_coverage", {"check": "thm21", "counter": "tuples"})
        assert metrics.counters()[key] == summary.coverage["tuples"]

    def test_thm42(self):
        [summary] = run_sweep("thm42", max_n=5, jobs=1)
        assert summary.passed
        assert summary.instances == 10
        assert summary.counterexample is None

    @pytest.mark.parametrize("name", ["envelope-identity", "idealsubfit"])
    def test_other_lattice_targets(self, name):
        [summary] = run_sweep(name, max_n=5, jobs=1)
        assert summary.passed
        assert summary.check == name

    def test_roundtrip_has_two_parts(self):
        summaries = run_sweep("roundtrip", max_n=4, jobs=1)
        assert [s.check for s in summaries] == ["roundtrip-lattices", "roundtrip-spaces"]
        assert all(s.passed for s in summaries)
        assert summaries[1].instances == 1 + 2 + 5 + 16


class TestSpaceSweeps:
    @pytest.mark.parametrize("name", SPACE_CHECK_TARGETS)
    def test_small_spaces(self, name):
        [summary] = run_sweep(name, max_n=3, jobs=1)
        assert summary.passed
        assert summary.instances == 1 + 2 + 5

    def test_job_count_does_not_change_the_answer(self):
        [one] = run_sweep("cor53", max_n=4, jobs=1)
        [two] = run_sweep("cor53", max_n=4, jobs=2)
        assert (one.instances, one.failures, one.coverage) == (two.instances, two.failures, two.coverage)

    def test_space_bound(self):
        with pytest.raises(InvalidInputError):
            run_sweep("prop52", max_n=8, jobs=1)


class TestTargets:
    def test_unknown_target(self):
        with pytest.raises(InvalidInputError):
            run_sweep("thm99")

    def test_registry(self):
        assert set(TARGETS) == {
            "thm21",
            "thm42",
            "envelope-identity",
            "idealsubfit",
            "prop52",
            "cor53",
            "union",
            "roundtrip",
        }


@pytest.mark.slow
class TestFullSweeps:
    def test_thm21_up_to_seven(self):
        [summary] = run_sweep("thm21", max_n=7, jobs=2)
        assert summary.passed

    def test_prop52_up_to_six(self):
        [summary] = run_sweep("prop52", max_n=6, jobs=2)
        assert summary.passed
        assert summary.instances == 1 + 2 + 5 + 16 + 63 + 318

    @pytest.mark.parametrize("name", ["thm42", "idealsubfit"])
    def test_lattice_targets_up_to_six(self, name):
        [summary] = run_sweep(name, max_n=6, jobs=2)
        assert summary.passed
        # lattices per size: 1, 1, 1, 2, 5, 15
        assert summary.instances == 25

    def test_envelope_identity_up_to_six(self):
        [summary] = run_sweep("envelope-identity", max_n=6, jobs=2)
        assert summary.passed
        # distributive lattices per size: 1, 1, 1, 2, 3, 5
        assert summary.instances == 13
        assert summary.coverage["non_distributive_skipped"] == 12

    def test_union_up_to_five(self):
        [summary] = run_sweep("union", max_n=5, jobs=2)
        assert summary.passed
        assert summary.instances == 1 + 2 + 5 + 16 + 63

    def test_cor53_up_to_six(self):
        [summary] = run_sweep("cor53", max_n=6, jobs=2)
        assert summary.passed
        assert summary.instances == 1 + 2 + 5 + 16 + 63 + 318

    def test_roundtrip_up_to_six(self):
        lattices, spaces = run_sweep("roundtrip", max_n=6, jobs=2)
        assert lattices.passed and spaces.passed
        assert lattices.instances == 13
        assert spaces.instances == 1 + 2 + 5 + 16 + 63 + 318


class TestSweepMetrics:
    def test_worker_snapshots_are_merged(self):
        metrics = MetricsCollector()
        run_sweep("thm42", max_n=5, jobs=1, metrics=metrics)
        # lattices per size: 1, 1, 1, 2, 5
        assert metrics.counters()[metric_key("sweep_instances", {"check": "thm42", "n": 4})] == 2
        assert metrics.counters()[metric_key("sweep_instances", {"check": "thm42", "n": 5})] == 5
        assert sum(metrics.counters("sweep_instances").values()) == 10
        assert metrics.timings()[metric_key("instance_seconds", {"check": "thm42"})]["count"] == 10
        assert metrics.timings()[metric_key("sweep_seconds", {"check": "thm42"})]["count"] == 1

    def test_merged_counters_ignore_the_job_count(self):
        one, two = MetricsCollector(), MetricsCollector()
        run_sweep("cor53", max_n=4, jobs=1, metrics=one)
        run_sweep("cor53", max_n=4, jobs=2, metrics=two)
        assert one.counters() == two.counters()
        assert one.counters("sweep_instances")
