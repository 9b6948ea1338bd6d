"""Bridge contract: baseline CSVs score cleanly in the primary evaluator.

These tests talk to the primary component only through its external
interfaces: the dataset JSON and fold-plan JSON formats and the `cuberec`
CLI invoked as a subprocess.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from recbaselines import (BaselineJob, BridgeError, METHODS, run_baseline,
                          write_predictions)


def cuberec(*argv):
    result = subprocess.run([sys.executable, "-m", "cuberec", *argv],
                            capture_output=True, text=True)
    if result.returncode != 0:
        raise AssertionError(f"cuberec {argv[0]} failed: {result.stderr}")
    return result.stdout


@pytest.fixture(scope="module")
def planted(tmp_path_factory):
    root = tmp_path_factory.mktemp("bridge")
    data = root / "d.json"
    folds = root / "folds.json"
    cuberec("synth", "--n", "12", "--items", "40", "--seed", "9",
            "--mode", "star-rounded", "-o", str(data))
    cuberec("folds", "--data", str(data), "--k", "5", "-o", str(folds))
    return data, folds


def constant_dataset(path):
    doc = {
        "user_id": "const",
        "scale": [1, 2, 3, 4, 5],
        "attributes": ["a", "b", "c"],
        "items": [{"id": f"r{k}", "bits": ("101", "011", "110")[k % 3]}
                  for k in range(12)],
        "ratings": [{"item_id": f"r{k}", "raw": 4} for k in range(12)],
    }
    path.write_text(json.dumps(doc))


def evaluate_csv(data, folds, csv_path):
    out = cuberec("evaluate", "--data", str(data), "--method", "baseline-file",
                  "--predictions", str(csv_path), "--fold-plan", str(folds),
                  "--json")
    return json.loads(out)


class TestBridgeContract:
    @pytest.mark.parametrize("method", METHODS)
    def test_zero_coverage_errors_for_every_method(self, planted, tmp_path,
                                                   method):
        data, folds = planted
        rows = run_baseline(BaselineJob(str(data), str(folds), method, seed=3))
        csv_path = tmp_path / f"{method}.csv"
        write_predictions(csv_path, rows)
        report = evaluate_csv(data, folds, csv_path)
        assert report["method"] == "baseline-file"
        assert len(report["per_fold_errors"]) == 5
        assert 0.0 <= report["mean_error"] <= 4.0

    def test_constant_dataset_scores_zero(self, tmp_path):
        data = tmp_path / "const.json"
        constant_dataset(data)
        folds = tmp_path / "folds.json"
        cuberec("folds", "--data", str(data), "--k", "4", "-o", str(folds))
        rows = run_baseline(BaselineJob(str(data), str(folds), "rf", seed=1))
        assert all(row[3] == 4 for row in rows)
        csv_path = tmp_path / "rf.csv"
        write_predictions(csv_path, rows)
        report = evaluate_csv(data, folds, csv_path)
        assert report["mean_error"] == 0.0

    def test_repeated_runs_byte_identical(self, planted, tmp_path):
        data, folds = planted
        paths = []
        for run in (1, 2):
            job = BaselineJob(str(data), str(folds), "nn", seed=11)
            csv_path = tmp_path / f"run{run}.csv"
            write_predictions(csv_path, run_baseline(job))
            paths.append(csv_path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_rf_smoke_on_planted_noiseless(self, tmp_path):
        data = tmp_path / "noiseless.json"
        folds = tmp_path / "folds.json"
        cuberec("synth", "--n", "10", "--items", "30", "--seed", "21",
                "--mode", "star-rounded", "-o", str(data))
        cuberec("folds", "--data", str(data), "--k", "5", "-o", str(folds))
        rows = run_baseline(BaselineJob(str(data), str(folds), "rf", seed=2))
        csv_path = tmp_path / "rf.csv"
        write_predictions(csv_path, rows)
        report = evaluate_csv(data, folds, csv_path)
        assert "mean_error" in report


class TestValidation:
    def test_predictions_stay_on_the_scale(self, planted, tmp_path):
        data, folds = planted
        for method in METHODS:
            rows = run_baseline(BaselineJob(str(data), str(folds), method,
                                            seed=7))
            assert all(1 <= row[3] <= 5 for row in rows)

    def test_fold_plan_mismatch_is_a_coverage_error(self, planted, tmp_path):
        data, folds = planted
        doc = json.loads(Path(folds).read_text())
        first = next(iter(doc["assignments"]))
        del doc["assignments"][first]
        broken = tmp_path / "broken.json"
        broken.write_text(json.dumps(doc))
        with pytest.raises(BridgeError):
            run_baseline(BaselineJob(str(data), str(broken), "dt", seed=1))

    def test_unknown_method_rejected(self, planted):
        data, folds = planted
        with pytest.raises(BridgeError):
            BaselineJob(str(data), str(folds), "xgboost")

    def test_hyperparameter_overrides_apply(self, planted, tmp_path):
        data, folds = planted
        light = run_baseline(BaselineJob(str(data), str(folds), "rf", seed=5,
                                         params={"rf": {"n_estimators": 3}}))
        heavy = run_baseline(BaselineJob(str(data), str(folds), "rf", seed=5))
        assert len(light) == len(heavy)

    def test_cli_end_to_end(self, planted, tmp_path):
        data, folds = planted
        out_csv = tmp_path / "cli.csv"
        result = subprocess.run(
            [sys.executable, "-m", "recbaselines", "--data", str(data),
             "--fold-plan", str(folds), "--method", "dt", "-o", str(out_csv)],
            capture_output=True, text=True)
        assert result.returncode == 0, result.stderr
        header = out_csv.read_text().splitlines()[0]
        assert header == "user_id,fold,item_id,predicted_level,actual_level,method"
