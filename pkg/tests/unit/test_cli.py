import json

import pytest

from subfitlab.cli.main import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_OK, build_parser, inputs_digest, main
from subfitlab.config import get_settings
from tests.conftest import INTRO_COVERS, INTRO_LABELS, boolean_covers, write_document

N5_COVERS = [(0, 1), (1, 2), (0, 3), (2, 4), (3, 4)]


@pytest.fixture
def intro_file(tmp_path):
    return write_document(tmp_path / "intro.json", 6, INTRO_COVERS, INTRO_LABELS)


@pytest.fixture
def boolean2_file(tmp_path):
    return write_document(tmp_path / "b2.json", 4, boolean_covers(2), ["0", "p", "q", "1"])


@pytest.fixture
def quick_sampling(monkeypatch):
    sampling = get_settings().sampling
    monkeypatch.setattr(sampling, "min_case_hits", 0)
    monkeypatch.setattr(sampling, "closure_samples", 300)


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


class TestStructureCommands:
    def test_check(self, capsys, intro_file):
        code, report = run(capsys, "check", intro_file)
        assert code == EXIT_OK
        assert report["command"] == "check"
        details = report["results"][0]["details"]
        assert details["lattice"] is True
        assert details["distributive"] is False
        assert details["join_subfit"] is False
        assert details["same_coannihilators"] == ["t", "s"]
        assert details["meet_subfit"] is False

    def test_check_singleton(self, capsys, tmp_path):
        path = write_document(tmp_path / "one.json", 1, [])
        code, report = run(capsys, "check", path)
        details = report["results"][0]["details"]
        assert code == EXIT_OK
        for flag in ("poset", "join_semilattice", "lattice", "bounded", "distributive", "join_subfit", "meet_subfit"):
            assert details[flag] is True

    def test_check_non_lattice(self, capsys, tmp_path):
        path = write_document(tmp_path / "v.json", 3, [(0, 1), (0, 2)])
        code, report = run(capsys, "check", path)
        assert code == EXIT_OK
        details = report["results"][0]["details"]
        assert details["join_semilattice"] is False
        assert details["join_subfit"] is None
        assert details["meet_subfit"] is not None

    def test_subfit_elements(self, capsys, intro_file):
        code, report = run(capsys, "subfit-elements", intro_file)
        details = report["results"][0]["details"]
        assert code == EXIT_OK
        assert details["subfit_set"] == ["0", "a", "b", "t"]
        assert details["is_ideal"] is False
        assert details["offending_pair"] == ["a", "b"]

    def test_witness(self, capsys, boolean2_file):
        code, report = run(capsys, "witness", boolean2_file, "p", "q", "p", "q")
        details = report["results"][0]["details"]
        assert code == EXIT_OK
        assert details["z"] == "p"
        assert details["branch"] == "y_join_a"
        assert details["t_join_z_is_top"] is True

    def test_envelope(self, capsys, tmp_path):
        path = write_document(tmp_path / "m3.json", 5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])
        code, report = run(capsys, "envelope", path)
        details = report["results"][0]["details"]
        assert code == EXIT_OK
        assert details["size_A"] == 5
        assert details["join_subfit_A"] == details["join_subfit_L"]
        assert details["condition_a"] and details["condition_b"]

    def test_dualize(self, capsys, boolean2_file):
        code, report = run(capsys, "dualize", boolean2_file)
        details = report["results"][0]["details"]
        assert code == EXIT_OK
        assert details["space"]["n"] == 2
        assert details["space"]["covers"] == []
        assert details["lattice_roundtrip"] is True


class TestInputErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, body = run(capsys, "check", str(tmp_path / "absent.json"))
        assert code == EXIT_INPUT_ERROR
        assert body["error_code"] == "INVALID_INPUT"

    def test_malformed_document(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 2, "covers": [[0, 7]]}')
        code, body = run(capsys, "check", str(path))
        assert code == EXIT_INPUT_ERROR
        assert body["error"] == "ValidationError"

    def test_cycle(self, capsys, tmp_path):
        path = write_document(tmp_path / "cycle.json", 2, [(0, 1), (1, 0)])
        code, body = run(capsys, "check", path)
        assert code == EXIT_INPUT_ERROR
        assert body["error_code"] == "CYCLE_DETECTED"

    def test_witness_precondition(self, capsys, boolean2_file):
        code, body = run(capsys, "witness", boolean2_file, "p", "p", "0", "q")
        assert code == EXIT_INPUT_ERROR
        assert body["error_code"] == "PRECONDITION_VIOLATED"

    def test_unknown_label(self, capsys, boolean2_file):
        code, body = run(capsys, "witness", boolean2_file, "p", "nope", "p", "q")
        assert code == EXIT_INPUT_ERROR
        assert body["error_code"] == "INVALID_INPUT"

    def test_dualize_needs_distributive(self, capsys, tmp_path):
        path = write_document(tmp_path / "n5.json", 5, N5_COVERS)
        code, body = run(capsys, "dualize", path)
        assert code == EXIT_INPUT_ERROR
        assert body["error_code"] == "NOT_DISTRIBUTIVE"

    def test_no_command(self):
        assert main([]) == EXIT_INPUT_ERROR


class TestSweepCommands:
    def test_enumerate_counts(self, capsys):
        code, report = run(capsys, "enumerate", "--max-n", "5")
        assert code == EXIT_OK
        counts = report["results"][0]["details"]["lattices_per_size"]
        assert counts == {"1": 1, "2": 1, "3": 1, "4": 2, "5": 5}
        assert report["metrics"]["lattices{n=5}"] == 5

    def test_enumerate_verify(self, capsys):
        code, report = run(capsys, "enumerate", "--max-n", "5", "--verify", "thm21", "--jobs", "1")
        assert code == EXIT_OK
        assert report["passed"] is True
        assert report["results"][0]["name"] == "thm21"
        assert report["counterexample"] is None
        assert report["metrics"]["sweep_coverage{check=thm21,counter=non_distributive_skipped}"] == 2
        assert sum(v for k, v in report["metrics"].items() if k.startswith("sweep_instances{check=thm21")) == 8

    def test_space_check(self, capsys):
        code, report = run(capsys, "space-check", "--max-n", "3", "--jobs", "1")
        assert code == EXIT_OK
        assert [r["name"] for r in report["results"]] == ["prop52", "cor53", "union"]


class TestCounterexampleCommand:
    def test_claims(self, capsys, quick_sampling):
        argv = ("counterexample", "--claims", "1,3", "--samples", "300", "--seed", "4", "--bound", "16", "--jobs", "1")
        code, report = run(capsys, *argv)
        assert code == EXIT_OK
        names = [r["name"] for r in report["results"]]
        assert names[:2] == ["claim1", "claim3"]
        claim1_hits = sum(
            v for k, v in report["metrics"].items() if k.startswith("property_case{case=") and k.endswith("property=claim1}")
        )
        assert claim1_hits == 300

    def test_reports_are_reproducible(self, capsys, quick_sampling):
        argv = ("counterexample", "--claims", "5,6", "--samples", "300", "--seed", "8", "--bound", "16", "--jobs", "1")
        _, first = run(capsys, *argv)
        _, second = run(capsys, *argv)
        first.pop("elapsed_ms")
        second.pop("elapsed_ms")
        assert first == second

    def test_space(self, capsys, quick_sampling):
        argv = ("counterexample", "--space", "--samples", "200", "--seed", "1", "--bound", "16", "--jobs", "1")
        code, report = run(capsys, *argv)
        assert code == EXIT_OK
        assert "x_not_join_subfit" in [r["name"] for r in report["results"]]
        assert "claim1" not in [r["name"] for r in report["results"]]

    def test_unknown_claim(self, capsys, quick_sampling):
        code, body = run(capsys, "counterexample", "--claims", "9", "--samples", "10", "--jobs", "1")
        assert code == EXIT_INPUT_ERROR
        assert body["error_code"] == "INVALID_INPUT"


class TestReportFormat:
    def test_digest_tracks_file_contents(self, tmp_path):
        path = write_document(tmp_path / "c.json", 2, [(0, 1)])
        args = build_parser().parse_args(["check", path])
        before = inputs_digest(args)
        write_document(tmp_path / "c.json", 2, [])
        assert inputs_digest(args) != before
        assert len(before) == 64

    def test_pretty(self, capsys, intro_file):
        assert main(["--pretty", "check", intro_file]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("{\n  ")

    def test_failed_check_exit_code(self):
        assert EXIT_CHECK_FAILED == 1
