import csv
import json
import subprocess
import sys

import pytest

from harmonic_dpo.cli import TRANSIENT_HEADER, main


@pytest.fixture
def cfg(tmp_path):
    def make(**over):
        data = {"kappa_values": [1.0], "lambda_c": 0.5, "eps1_grid": {"start": 0.3, "stop": 5.0, "count": 10}}
        data.update(over)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(data))
        return str(path)
    return make


def test_steady(capsys):
    assert main(["steady", "--kappa", "1", "--lambda", "0.5", "--drive", "1.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["regime"] == "above" and out["eps1"] == pytest.approx(1.0)
    assert out["oracle"]["duan_sum"] == pytest.approx(247 / 72)
    assert out["closed_reduced"]["var_minus"] == pytest.approx(7 / 12)


def test_steady_at_threshold_reports_unavailable(capsys):
    assert main(["steady", "--kappa", "1", "--lambda", "0.5", "--drive", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["regime"] == "at"
    assert out["oracle"].startswith("unavailable")


def test_steady_bad_params(capsys):
    assert main(["steady", "--kappa", "-1", "--lambda", "0.5", "--drive", "1"]) == 2


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["steady", "--kappa", "1"])
    assert exc.value.code == 2


def test_sweep(cfg, tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", cfg(), "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0][0] == "kappa" and len(rows) == 11


def test_sweep_all_singular(cfg, tmp_path):
    path = cfg(eps1_grid={"start": 0.25 - 1e-12, "stop": 0.25 + 1e-12, "count": 2})
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "s.csv")]) == 3


def test_sweep_bad_config(cfg, tmp_path):
    assert main(["sweep", "--config", cfg(lambda_c=-1), "--out", str(tmp_path / "s.csv")]) == 2


def test_sweep_missing_config(tmp_path):
    assert main(["sweep", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path / "s.csv")]) == 4


def test_sweep_unwritable_output(cfg, tmp_path):
    assert main(["sweep", "--config", cfg(), "--out", str(tmp_path / "no" / "dir" / "s.csv")]) == 4


def test_figure(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["figure", "--n", "3", "--out", str(out), "--kappas", "0.3", "--count", "5"]) == 0
    text = out.read_text()
    assert text.startswith("# figure 3")
    assert "nbar_oracle" in text


def test_optimum(capsys):
    assert main(["optimum", "--kappa", "0.3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["eps1_star_over_kappa"] == pytest.approx(1.0, rel=1e-4)


def test_boundary(capsys):
    assert main(["boundary", "--kappa", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["eps1_over_kappa"] == pytest.approx(1.2253233, abs=1e-6)
    assert main(["boundary", "--kappa", "1", "--pipeline", "oracle"]) == 3


def test_validate(cfg, tmp_path):
    out = tmp_path / "v.json"
    assert main(["validate", "--config", cfg(forms=["general", "reduced"]), "--out", str(out), "--top-k", "3"]) == 0
    data = json.loads(out.read_text())
    assert len(data["worst_offenders"]) == 3 and data["flags"]


def test_transient(tmp_path):
    out = tmp_path / "t.csv"
    args = ["transient", "--kappa", "1", "--lambda", "0.5", "--drive", "1.5", "--t-final", "1", "--every", "20", "--out", str(out)]
    assert main(args) == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == TRANSIENT_HEADER
    assert len(rows) == 1 + 11
    assert float(rows[1][1]) == 0.0 and float(rows[1][5]) == pytest.approx(2.0)


def test_transient_step_too_large(tmp_path):
    args = ["transient", "--kappa", "1", "--lambda", "0.5", "--drive", "1.5", "--t-final", "1", "--dt", "0.1", "--out", str(tmp_path / "t.csv")]
    assert main(args) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "harmonic_dpo", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "transient" in proc.stdout
