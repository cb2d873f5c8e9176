import json
import subprocess
import sys

import numpy as np
import pytest

from deconvkde.asymptotics import mean_theory
from deconvkde.bandwidth import select_bandwidth
from deconvkde.cli import main
from deconvkde.deconvolver import make_grid
from deconvkde.densities import Gaussian, GaussianError
from deconvkde.kernels import FanKernel
from deconvkde.simulation import ExperimentConfig, run_experiment


def _read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


@pytest.fixture
def obs_file(tmp_path):
    rng = np.random.default_rng(42)
    data = rng.standard_normal(1000) + 0.1 * rng.standard_normal(1000)
    path = tmp_path / "obs.txt"
    path.write_text("\n".join(repr(float(v)) for v in data) + "\n")
    return path, data


def test_estimate_sigma_zero_is_kde(tmp_path, obs_file, capsys):
    path, data = obs_file
    out = tmp_path / "o"
    assert main(["estimate", "--data", str(path), "--h", "0.3", "--sigma", "0", "--out", str(out)]) == 0
    header, rows = _read_csv(out / "estimate.csv")
    assert header == ["x", "fhat"]
    kde = FanKernel().w((rows[:, :1] - data[None, :]) / 0.3).mean(axis=1) / 0.3
    np.testing.assert_allclose(rows[:, 1], kde, atol=1e-6)
    printed = capsys.readouterr().out
    assert "n=1000" in printed and "r=sigma/h=0" in printed and "regime=" in printed
    assert json.loads((out / "manifest.json").read_text())["exit_status"] == 0


def test_estimate_fig1_config_near_theory(tmp_path, obs_file):
    path, _ = obs_file
    out = tmp_path / "o"
    assert main(["estimate", "--data", str(path), "--h", "0.1", "--sigma", "0.1", "--out", str(out)]) == 0
    _, rows = _read_csv(out / "estimate.csv")
    i0 = int(np.argmin(np.abs(rows[:, 0])))
    cfg = ExperimentConfig(Gaussian(), GaussianError(), FanKernel(), n=1000, sigma=0.1, h=0.1,
                           grid=np.array([0.0]), reps=100, seed=3)
    sd = run_experiment(cfg).sample_sd[0]
    assert abs(rows[i0, 1] - mean_theory(Gaussian(), FanKernel(), 0.0, 0.1)) < 4 * sd


def test_estimate_missing_file(tmp_path, capsys):
    code = main(["estimate", "--data", str(tmp_path / "nope.txt"), "--h", "0.1", "--out", str(tmp_path)])
    assert code == 2
    assert "nope.txt" in capsys.readouterr().err


def test_estimate_overflow_exit_code(tmp_path, obs_file, capsys):
    path, _ = obs_file
    code = main(["estimate", "--data", str(path), "--h", "0.01", "--sigma", "2", "--out", str(tmp_path)])
    assert code == 3
    assert "maximum supported ratio" in capsys.readouterr().err


def test_usage_errors(tmp_path):
    assert main(["reproduce", "fig9", "--out", str(tmp_path)]) == 2
    assert main(["theory", "--h", "-1", "--out", str(tmp_path)]) == 2
    assert main(["frobnicate"]) == 2


def test_mise_prints_grid_minimiser(tmp_path, capsys):
    assert main(["mise", "--n", "1000", "--sigma", "0.1", "--out", str(tmp_path)]) == 0
    h, _ = select_bandwidth(Gaussian(), FanKernel(), GaussianError(), 1000, 0.1)
    assert f"h*={h:.2f}" in capsys.readouterr().out
    header, rows = _read_csv(tmp_path / "mise.csv")
    assert header == ["h", "mise", "variance_term", "bias_sq_term"] and rows.shape == (100, 4)


def test_mise_boundary_exit_code(tmp_path):
    assert main(["mise", "--n", "1000", "--sigma", "0.1", "--K", "5", "--out", str(tmp_path)]) == 4


def test_theory_fig1(tmp_path, capsys):
    assert main(["theory", "--n", "1000", "--sigma", "0.1", "--h", "0.1", "--out", str(tmp_path), "--pdf"]) == 0
    header, rows = _read_csv(tmp_path / "theory.csv")
    assert header == ["x", "mean_theory", "sd_thm1", "sd_thm3_exact", "sd_thm3_expansion"]
    assert rows[0, 3] == pytest.approx(0.034477, rel=5e-3)
    text = capsys.readouterr().out
    assert "sd_thm3_exact=0.0344770" in text and "3.41646" in text
    header, _ = _read_csv(tmp_path / "pdf.csv")
    assert header == ["x", "pdf"]


def test_theory_sigma_zero_has_only_thm1(tmp_path):
    assert main(["theory", "--sigma", "0", "--h", "0.1", "--out", str(tmp_path)]) == 0
    header, _ = _read_csv(tmp_path / "theory.csv")
    assert header == ["x", "mean_theory", "sd_thm1"]


def test_nine_significant_digits(tmp_path):
    main(["theory", "--sigma", "0.1", "--h", "0.1", "--grid", "0:0:1", "--out", str(tmp_path)])
    row = (tmp_path / "theory.csv").read_text().splitlines()[1].split(",")
    assert row[3] == "0.0344770032"


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# fig1 setup\nsigma = 0.1\nn=1000\nh=0.1\ngrid=-1:1:0.5\n")
    assert main(["theory", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    _, rows = _read_csv(tmp_path / "a" / "theory.csv")
    assert rows.shape[0] == 5
    assert main(["theory", "--config", str(cfg), "--h", "0.2", "--out", str(tmp_path / "b")]) == 0
    manifest = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert manifest["config"]["h"] == 0.2 and manifest["config"]["sigma"] == 0.1
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n")
    assert main(["theory", "--config", str(bad), "--out", str(tmp_path)]) == 2


def test_manifest_rerun_is_byte_identical(tmp_path):
    args = ["simulate", "--n", "300", "--sigma", "0.1", "--h", "0.2", "--reps", "20", "--seed", "4",
            "--grid", "-1:1:0.5", "--threads", "3", "--out", str(tmp_path / "a")]
    assert main(args) == 0
    assert main(["simulate", "--config", str(tmp_path / "a" / "manifest.json"),
                 "--out", str(tmp_path / "b"), "--threads", "1"]) == 0
    assert (tmp_path / "a" / "report.csv").read_bytes() == (tmp_path / "b" / "report.csv").read_bytes()
    meta = json.loads((tmp_path / "b" / "report.json").read_text())
    assert meta["config"]["reps"] == 20


def test_reproduce_small(tmp_path, capsys):
    assert main(["reproduce", "fig1", "--reps", "10", "--seed", "1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "report.csv").read_text().splitlines()
    assert lines[0].startswith("x,sample_mean") and len(lines) == 62
    assert "without the zeta(rho) factor: 3.41646" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "deconvkde", "theory", "--sigma", "0.1", "--h", "0.1",
                          "--grid", "0:0:1", "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0 and "sd_thm3_exact" in res.stdout
