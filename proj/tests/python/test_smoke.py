import json
import math
import os
import subprocess

import numpy as np
import pytest

import robustreg as rr

CLI = os.environ.get("ROBUSTREG_CLI")


def test_statistics():
    assert rr.median([1, 3, 2]) == 2.0
    assert rr.mad([1, 2, 3, 4, 5]) == 1.0
    assert rr.rmse([2, 2], [0, 0]) == 2.0
    assert rr.r_squared([1, -1], [-1, 1]) == -3.0
    with pytest.raises(ValueError):
        rr.median([])


def test_weight_kernel():
    assert rr.weight(0.0) == 1.0
    assert math.isclose(rr.weight(1.0), math.exp(-7.0), rel_tol=1e-12)
    assert rr.weight(1.3) < 1e-24
    residuals = np.array([[1.0, 2.0, 3.0, 4.0, 5.0]])
    weights, stats = rr.weight_matrix(residuals, gamma=2.0)
    assert weights.shape == (1, 5)
    assert stats[0]["mad"] == 1.0
    assert stats[0]["threshold"] == 2.0
    assert weights[0, 2] == 1.0


def test_generate_split_and_table(tmp_path):
    assert "linear-1" in rr.dataset_ids()
    ds = rr.generate("linear-1", seed=3)
    assert len(ds) == 1100
    assert sum(ds.outlier_flags) == 100
    assert ds.generator == "linear-1"
    train, val, test = rr.split(ds, 7)
    assert (len(train), len(val), len(test)) == (880, 110, 110)
    path = tmp_path / "lin1.csv"
    rr.write_table(ds, path)
    assert rr.read_table(path) == ds
    with pytest.raises(rr.IoError):
        rr.read_table(tmp_path / "missing.csv")


def test_linear_and_robust_fit():
    x = np.linspace(0, 10, 50).reshape(-1, 1)
    y = 2 * x + 1
    y[::10] += 40
    coef, intercept = rr.linear_fit(x, y)
    assert abs(coef[0, 0] - 2.0) > 0.01
    ds = rr.Dataset(x, y)
    fit = rr.robust_fit(ds, regressor="linear")
    assert fit.refinements == 5
    assert np.allclose(fit.predict(x[:3]), 2 * x[:3] + 1, atol=1e-6)
    assert not fit.inlier_mask[0, ::10].any()
    assert fit.weights.max() == 1.0


def test_mlp_robust_fit():
    x = np.linspace(-1, 1, 60).reshape(-1, 1)
    ds = rr.Dataset(x, 3 * x - 1)
    fit = rr.robust_fit(ds, regressor="mlp", hidden=[4], activation="identity", refinements=2, max_epochs=300,
                        validation=ds)
    assert fit.refinements == 2
    assert len(fit.train_losses) == 2
    assert np.abs(fit.predict(x) - (3 * x - 1)).max() < 0.05


def test_run_experiment_in_memory():
    report = rr.run_experiment({"dataset": "linear-1", "method": "robust-linear", "seed": 1}, write_files=False)
    assert report["schema_version"] == rr.REPORT_SCHEMA_VERSION
    assert report["truth"]["basis"] == "grid"
    assert report["truth"]["metrics"][0]["rmse"] < 0.02
    assert report["outliers"]["recall"] >= 0.9


def test_config_errors():
    with pytest.raises(rr.ConfigError, match="robust.gamma"):
        rr.run_experiment({"dataset": "linear-1", "method": "robust-linear", "robust": {"gamma": -1}},
                          write_files=False)
    with pytest.raises(ValueError):
        rr.run_experiment({"dataset": "linear-1"}, write_files=False)


@pytest.mark.skipif(CLI is None, reason="ROBUSTREG_CLI not set")
def test_cli_exit_codes(tmp_path):
    def cli(*args):
        return subprocess.run([CLI, *args], cwd=tmp_path, capture_output=True, text=True)

    data = tmp_path / "lin1.csv"
    assert cli("generate", "--dataset", "linear-1", "--seed", "2", "--out", str(data)).returncode == 0
    res = cli("fit", "--dataset", str(data), "--method", "ransac", "--out", "run")
    assert res.returncode == 0, res.stderr
    report = json.loads((tmp_path / "run" / "report.json").read_text())
    assert report["method"]["id"] == "ransac"
    assert cli("report", "run", "--out", "cmp").returncode == 0
    assert (tmp_path / "cmp" / "comparison.csv").exists()

    assert cli("fit", "--dataset", "dynamics", "--method", "ransac", "--out", "bad").returncode == 2
    assert cli("fit", "--dataset", "linear-1", "--method", "lasso").returncode == 2
    assert cli("fit", "--bogus-flag").returncode == 2
    assert cli("fit", "--dataset", str(tmp_path / "none.csv"), "--method", "ransac").returncode == 4
    bad_cfg = tmp_path / "bad.json"
    bad_cfg.write_text('{"dataset": "linear-1", "method": "robust-linear", "robust": {"gamma": 0}}')
    assert cli("fit", "--config", str(bad_cfg)).returncode == 2
