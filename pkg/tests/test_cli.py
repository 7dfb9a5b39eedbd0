import csv
import json
import subprocess
import sys

import pytest

from radial_bv.cli import main
from reference import TRACE_MU3_GAP2

MU3 = ["--density", "phi-mu", "--mu", "3", "--rho1", "1", "--rho2", "2", "--m1", "0", "--m2", "2"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_solve_outputs(tmp_path):
    assert main(["solve", *MU3, "--out", str(tmp_path), "--format", "csv,json,svg"]) == 0
    rows = read_csv(tmp_path / "solution.csv")
    assert list(rows[0]) == ["r", "u", "du", "flux"] and len(rows) == 512
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["lambda"] == 1.0 and summary["attained_inner"] is False
    assert summary["trace_inner"] == pytest.approx(TRACE_MU3_GAP2, abs=1e-12)
    assert (tmp_path / "profile.svg").read_text().startswith("<svg")


def test_infinite_values_are_json_strings(tmp_path):
    args = ["solve", "--density", "phi-mu", "--mu", "1.5", "--rho1", "1", "--rho2", "2",
            "--m1", "0", "--m2", "1", "--out", str(tmp_path)]
    assert main(args) == 0
    text = (tmp_path / "summary.json").read_text()
    summary = json.loads(text)  # strict JSON: no bare Infinity
    assert "Infinity" not in text and summary["delta_m_inf"] == "inf"


def test_config_file_and_flag_override(tmp_path):
    cfg = {"density": {"family": "phi-mu", "mu": 2.0}, "rho1": 1, "rho2": 2, "m1": 0, "m2": 5}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    assert main(["solve", "--config", str(path), "--m2", "0", "--out", str(out)]) == 0
    rows = read_csv(out / "solution.csv")
    assert {float(r["u"]) for r in rows} == {0.0}


@pytest.mark.parametrize("args", [
    ["solve", "--density", "phi-mu", "--mu", "3"],  # missing radii and data
    ["solve", *MU3[:-2], "--m2", "nan-ish"],
    ["solve", "--density", "phi-mu", "--mu", "0.5", "--rho1", "1", "--rho2", "2", "--m1", "0", "--m2", "1"],
    ["solve", *MU3, "--rho2", "0.5"],
    ["solve", *MU3, "--format", "xml"],
    ["frobnicate"],
])
def test_config_errors_exit_64(args, tmp_path):
    with pytest.raises(SystemExit) as err:
        code = main([*args, "--out", str(tmp_path)])
        raise SystemExit(code)
    assert err.value.code == 64


def test_numeric_failure_exit_1(tmp_path):
    code = main(["oracle-compare", *MU3, "--cells", "256", "--tol", "1e-30", "--out", str(tmp_path)])
    assert code == 1
    diag = json.loads((tmp_path / "diagnostics.json").read_text())
    assert diag["error"] == "OracleDidNotConverge" and "grad_norm" in diag["diagnostics"]


def test_oracle_compare(tmp_path):
    assert main(["oracle-compare", *MU3, "--out", str(tmp_path), "--format", "csv,json"]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["agreement"]["passed"] is True
    assert summary["oracle"]["trace_inner"] == pytest.approx(TRACE_MU3_GAP2, abs=1e-3)
    rows = read_csv(tmp_path / "comparison.csv")
    assert list(rows[0]) == ["r", "u_solver", "u_oracle"] and len(rows) == 2049


def test_reg_study(tmp_path):
    args = ["reg-study", "--density", "phi-mu", "--mu", "2", "--rho1", "1", "--rho2", "2",
            "--m1", "0", "--m2", "0.5493061443340549", "--cells", "512", "--out", str(tmp_path)]
    assert main(args) == 0
    rows = read_csv(tmp_path / "reg_study.csv")
    assert {r["kind"] for r in rows} == {"quadratic", "density"} and len(rows) == 8


def test_sweep(tmp_path):
    assert main(["sweep", "--n", "12", "--seed", "4", "--workers", "2", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert len(rows) == 12
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["failures"] == 0 and summary["max_principle_violations"] == 0


def test_verify_deterministic(tmp_path, monkeypatch):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "--out", str(a), "--workers", "3"]) == 0
    monkeypatch.setenv("RADIAL_BV_THREADS", "1")
    assert main(["verify", "--out", str(b)]) == 0
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_verify_failure_exit_2(tmp_path, monkeypatch):
    from radial_bv import analysis

    monkeypatch.setattr(analysis, "LINF_ATTAINED", 0.0)
    monkeypatch.setattr(analysis, "LINF_NOT_ATTAINED", 0.0)
    assert main(["verify", "--out", str(tmp_path), "--workers", "1"]) == 2
    assert json.loads((tmp_path / "summary.json").read_text())["passed"] is False


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "radial_bv", "solve", *MU3, "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "summary.json").exists()
