import json

import pytest

from conftest import GOLDEN, load_cases, run_cli
from incongruity.learners import LabeledDataset, LabelKind, knn_predict
from incongruity.schema import validate_report

CASES = load_cases()


@pytest.mark.parametrize("case", CASES, ids=[c["name"] for c in CASES])
def test_golden(case):
    code1, out1, err1 = run_cli(case["argv"])
    code2, out2, _ = run_cli(case["argv"])
    assert code1 == code2 == case.get("exit", 0), err1
    assert out1 == out2
    assert out1 == (GOLDEN / f"{case['name']}.json").read_text()
    validate_report(json.loads(out1))


class TestWorkedValues:
    def test_eval_constant_zero(self):
        code, out, _ = run_cli(["eval", "--data", "erm_toy.csv", "--theory", "pw_theory.json",
                                "--hypothesis", '{"constant": 0}'])
        assert code == 0
        assert json.loads(out)["total"] == 0.5

    def test_no_collisions_flag(self):
        _, out, _ = run_cli(["eval", "--data", "no_collision.csv", "--theory", "pw_theory.json"])
        rep = json.loads(out)
        assert rep["aspects"][0]["no_collisions"] is True
        assert rep["total"] == 0.0

    def test_agg_geomean(self):
        code, out, _ = run_cli(["agg", "--id", "geomean", "--values", "4,9"])
        assert code == 0 and json.loads(out)["total"] == 6.0

    def test_check_median_passes(self):
        code, out, _ = run_cli(["check", "--agg", "median", "--trials", "1000"])
        assert code == 0 and json.loads(out)["decision"]["passed"]

    def test_check_fake_fails(self):
        code, out, _ = run_cli(["check", "--agg", "fake_min_minus_one", "--trials", "100"])
        assert code == 1
        ax = json.loads(out)["decision"]["axioms"]
        assert not ax["idempotence"]["passed"] and not ax["tautology"]["passed"]

    def test_itinerary_zero(self):
        code, out, _ = run_cli(["scenario", "--data", "sightings_zero.csv", "--scenario",
                                '{"name": "itinerary", "travel": "travel.csv"}'])
        assert code == 0 and json.loads(out)["total"] == 0.0

    def test_hoeffding_trace_cardinality(self, fixtures_dir):
        _, out, _ = run_cli(["learn", "--data", "knn_toy.csv", "--learner",
                             '{"name": "hoeffding_knn", "params": {"k0": 2, "x": [1, 1]}}'])
        rep = json.loads(out)
        weights = [t for t in rep["trace"] if t["step"] == "weight"]
        assert len(weights) == 8 - 2

    def test_thin_shell_knn(self, fixtures_dir):
        import numpy as np
        data = np.loadtxt(fixtures_dir / "knn_toy.csv", delimiter=",", skiprows=1)
        S = LabeledDataset(data[:, :2], data[:, 2], LabelKind.BINARY01)
        d = knn_predict([0.1, 0.1], S, 3)
        _, out, _ = run_cli(["learn", "--data", "knn_toy.csv", "--learner",
                             '{"name": "knn", "params": {"k": 3, "x": [0.1, 0.1]}}'])
        rep = json.loads(out)
        assert rep["total"] == d.loss and rep["decision"]["hypothesis"] == d.hypothesis

    def test_svm_separable_zero_training_error(self):
        _, out, _ = run_cli(["learn", "--data", "svm_separable.csv", "--learner",
                             '{"name": "svm", "params": {"alpha": 0.01, "max_iter": 2000}}'])
        assert json.loads(out)["decision"]["info"]["training_error"] == 0.0

    def test_fast_mode_has_timing(self):
        _, out, _ = run_cli(["agg", "--id", "mean", "--values", "1,2", "--mode", "fast"])
        assert json.loads(out)["timing"]["seconds"] >= 0


class TestExitCodes:
    def test_unknown_learner(self):
        code, _, err = run_cli(["learn", "--data", "knn_toy.csv", "--learner", '{"name": "nope"}'])
        assert code == 2 and "unknown learner" in err

    def test_bad_csv_field(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("x1,y\n0,1\nabc,0\n")
        code, _, err = run_cli(["agg", "--id", "mean", "--values", "1"])
        assert code == 0
        code, _, err = run_cli(["eval", "--data", str(p), "--theory", "pw_theory.json",
                                "--hypothesis", '{"constant": 0}'])
        assert code == 2 and "line 3" in err and "x1" in err

    def test_bad_theory_field(self):
        code, _, err = run_cli(["eval", "--data", "erm_toy.csv", "--theory",
                                '{"aspects": [{"condition": {"atom": "x_equal"}, "deviation": {"id": "bogus"}, "aggregator": {"id": "mean"}}]}',
                                "--hypothesis", '{"constant": 0}'])
        assert code == 2 and "aspects/0/deviation/id" in err

    def test_geomean_domain(self):
        code, _, err = run_cli(["agg", "--id", "geomean", "--values", "4,-1"])
        assert code == 3

    def test_missing_flag(self):
        code, _, err = run_cli(["agg", "--id", "mean"])
        assert code == 2 and "--values" in err

    def test_argparse_usage(self):
        code, _, _ = run_cli(["frobnicate"])
        assert code == 2

    def test_seed_range(self):
        code, _, _ = run_cli(["agg", "--id", "mean", "--values", "1", "--seed", str(2**64)])
        assert code == 2

    def test_out_file(self, tmp_path):
        out = tmp_path / "r.json"
        code, stdout, _ = run_cli(["agg", "--id", "max", "--values", "1,7,3", "--out", str(out)])
        assert code == 0 and stdout == ""
        assert json.loads(out.read_text())["total"] == 7.0
