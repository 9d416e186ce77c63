import csv
import json
import shutil

import pytest

from beliefsim.cli import UsageError, main, parse_arc, parse_assignments, parse_groups
from beliefsim.fixtures import FIXTURE_DIR, FIXTURE_NAMES, fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(out):
    return json.loads(out)


class TestParsing:
    def test_assignments(self):
        assert parse_assignments("A=TRUE, B=FALSE") == {"A": "TRUE", "B": "FALSE"}

    def test_contradiction(self):
        with pytest.raises(UsageError, match="contradictory"):
            parse_assignments("E=TRUE,E=FALSE")

    def test_arc_and_groups(self):
        assert parse_arc("A-B") == ("A", "B")
        assert parse_groups("A+B;C") == [("A", "B"), ("C",)]
        assert parse_groups("auto") is None
        with pytest.raises(UsageError):
            parse_arc("AB")


class TestExact:
    def test_fig21(self, capsys):
        code, out, _ = run(capsys, "exact", "--net", str(fixture_path("fig2-1")),
                           "--evidence", "E=TRUE", "--query", "A")
        assert code == 0
        rep = report(out)
        assert rep["posteriors"]["A"]["TRUE"] == pytest.approx(0.2526, abs=1e-4)
        assert rep["config"]["evidence"] == "E=TRUE" and rep["version"]

    def test_fig22_by_fixture_name(self, capsys):
        code, out, _ = run(capsys, "exact", "--net", "fig2-2.json", "--query", "A")
        assert code == 0 and report(out)["posteriors"]["A"]["TRUE"] == pytest.approx(0.5)

    def test_contradictory_evidence(self, capsys):
        code, _, err = run(capsys, "exact", "--net", "fig2-1.json", "--evidence", "E=TRUE,E=FALSE",
                           "--query", "A")
        assert code == 2 and "contradictory" in err

    def test_unknown_value(self, capsys):
        code, _, err = run(capsys, "exact", "--net", "fig2-1", "--evidence", "E=MAYBE")
        assert code == 2

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "exact", "--net", "nowhere.json")
        assert code == 1 and "nowhere" in err


class TestValidate:
    def test_fixture(self, capsys):
        code, out, _ = run(capsys, "validate", "--net", "fig2-1")
        rep = report(out)
        assert code == 0 and rep["findings"] == []
        assert set(rep["markov_blankets"]["B"]) == {"A", "D", "E"}

    def test_bad_row(self, tmp_path, capsys):
        doc = {"variables": [{"name": "A", "values": ["FALSE", "TRUE"]}],
               "cpts": [{"child": "A", "parents": [], "rows": [[0.5, 0.55]]}]}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "validate", "--net", str(path))
        assert code == 1 and report(out)["findings"][0]["code"] == "row-sum"


class TestSample:
    def test_rejection(self, capsys, tmp_path):
        code, out, _ = run(capsys, "sample", "--scheme", "rejection", "--net", "fig2-1.json",
                           "--evidence", "E=TRUE", "-n", "1000000", "--seed", "7")
        rep = report(out)
        assert code == 0
        assert rep["report"]["acceptance_rate"] == pytest.approx(0.0392, abs=0.001)
        assert rep["seed"] == 7 and rep["config"]["seed"] == 7

    def test_gibbs_trace(self, capsys, tmp_path):
        trace = tmp_path / "t.csv"
        code, out, _ = run(capsys, "sample", "--scheme", "gibbs", "--net", "fig2-2.json",
                           "--sweeps", "1000000", "--seed", "7", "--trace", str(trace))
        assert code == 0
        assert 0.45 <= report(out)["report"]["estimates"]["A"]["TRUE"] <= 0.55
        with open(trace) as fh:
            header = next(csv.reader(fh))
        assert header == ["sweep", "A", "B", "weight", "accepted"]
        code, out, _ = run(capsys, "diagnose", "--metric", "tau", "--net", "fig2-2",
                           "--trace", str(trace), "--node", "A")
        assert code == 0 and 250 <= report(out)["tau_hat"] <= 1000

    def test_deterministic_pair_fixation(self, capsys):
        code, _, err = run(capsys, "sample", "--scheme", "gibbs", "--net", "det-pair", "--sweeps",
                           "2000", "--seed", "1")
        assert code == 1 and "fixation" in err

    def test_blocked_auto_groups(self, capsys):
        code, out, _ = run(capsys, "sample", "--scheme", "blocked-gibbs", "--net", "det-pair",
                           "--sweeps", "2000", "--seed", "1")
        assert code == 0 and report(out)["report"]["state_changes"] > 0

    def test_seed_generated_and_reported(self, capsys):
        code, out, err = run(capsys, "sample", "--scheme", "logic", "--net", "fig2-2", "-n", "100")
        assert code == 0 and "seed:" in err
        rep = report(out)
        assert rep["config"]["seed"] == rep["seed"]

    def test_byte_reproducible(self, capsys):
        args = ("sample", "--scheme", "lw", "--net", "fig2-1", "--evidence", "E=TRUE", "-n", "5000",
                "--seed", "3")
        first = report(run(capsys, *args)[1])
        second = report(run(capsys, *args)[1])
        assert first["report"] == second["report"]

    def test_logic_with_evidence_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "sample", "--scheme", "logic", "--net", "fig2-2",
                         "--evidence", "B=TRUE", "--seed", "1")
        assert code == 2

    def test_clamped_forward_refusal(self, capsys):
        code, _, err = run(capsys, "sample", "--scheme", "clamped-forward", "--net", "fig2-2",
                           "--evidence", "B=TRUE", "--seed", "1")
        assert code == 1 and "A->B" in err


class TestDiagnose:
    @pytest.mark.parametrize("name,D,SM", [("fig2-2.json", 0.002, 500.0), ("fig2-4.json", 0.501, 1 / 0.501)])
    def test_D(self, capsys, name, D, SM):
        code, out, _ = run(capsys, "diagnose", "--metric", "D", "--net", name, "--arc", "A-B")
        rep = report(out)
        assert code == 0 and rep["D"] == D and rep["SM"] == pytest.approx(SM)

    def test_blanket_and_flip(self, capsys):
        rep = report(run(capsys, "diagnose", "--metric", "blanket-D", "--net", "fig2-1", "--node", "B")[1])
        assert rep["D"] == 0.0
        rep = report(run(capsys, "diagnose", "--metric", "flip", "--net", "fig2-2", "--node", "A")[1])
        assert rep["worst_case_flip_probability"] == pytest.approx(0.001)

    def test_sm_sweep_csv(self, capsys, tmp_path):
        path = tmp_path / "sm.csv"
        code, _, _ = run(capsys, "diagnose", "--metric", "sm-sweep", "--grid", "0.5,0.25",
                         "--sweeps", "20000", "--seed", "2", "--csv", str(path))
        rows = list(csv.reader(open(path)))
        assert code == 0 and rows[0] == ["q", "D", "SM_pred", "tau_hat", "runs"] and len(rows) == 3

    def test_trace_required(self, capsys):
        code, _, _ = run(capsys, "diagnose", "--metric", "tau", "--net", "fig2-2")
        assert code == 2


class TestTransform:
    def test_reverse(self, capsys, tmp_path):
        out_path = tmp_path / "rev.json"
        code, _, _ = run(capsys, "transform", "--op", "reverse", "--net", "fig2-2.json", "--arc", "A-B",
                         "--out", str(out_path))
        doc = json.loads(out_path.read_text())
        cpts = {c["child"]: c for c in doc["cpts"]}
        assert code == 0
        assert cpts["B"]["rows"][0][1] == pytest.approx(0.5)
        assert cpts["A"]["parents"] == ["B"] and cpts["A"]["rows"][1][1] == pytest.approx(0.999)

    def test_absorb_plan(self, capsys, tmp_path):
        plan = tmp_path / "plan.json"
        code, _, _ = run(capsys, "transform", "--op", "absorb", "--net", "fig2-2.json",
                         "--evidence", "B", "--query", "A", "--plan", str(plan))
        steps = json.loads(plan.read_text())["steps"]
        assert code == 0 and [s["kind"] for s in steps] == ["reverse"]

    def test_reduce_refusal(self, capsys):
        code, _, err = run(capsys, "transform", "--op", "reduce", "--net", "fork.json", "--node", "X")
        assert code == 1 and "2 children" in err


class TestRepro:
    def test_subset(self, capsys):
        code, out, _ = run(capsys, "repro", "--only", "3")
        assert code == 0 and "C3" in out and "C2 " not in out

    def test_corrupted_fixture(self, capsys, tmp_path):
        for name in FIXTURE_NAMES:
            shutil.copy(FIXTURE_DIR / f"{name}.json", tmp_path)
        (tmp_path / "fig2-1.json").write_text("{ not json")
        code, out, _ = run(capsys, "repro", "--only", "1", "--fixtures", str(tmp_path))
        assert code == 1 and "[FAIL] C1" in out and "NetworkSyntaxError" in out

    def test_unknown_selection(self, capsys):
        code, out, _ = run(capsys, "repro", "--only", "nothing-matches")
        assert code == 1
