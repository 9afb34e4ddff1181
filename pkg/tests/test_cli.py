import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from splinestab import cli, toeplitz
from splinestab.galerkin import ExactMatrix, assemble


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_thresholds_table(capsys):
    code, out, _ = run(capsys, "thresholds", "--pmax", "6")
    assert code == cli.EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["p"] for r in rows] == ["1", "2", "3", "4", "5", "6"]
    assert rows[0]["rho_p"] == "12/1" and rows[0]["delta_p"] == "-1/12"
    assert rows[2]["rho_p"] == "168/17"
    assert float(rows[5]["rho_p_decimal"]) == pytest.approx(53898 / 5461, rel=1e-14)


def test_thresholds_json(capsys):
    code, out, _ = run(capsys, "thresholds", "--pmax", "2", "--format", "json")
    data = json.loads(out)
    assert data[1]["delta_p_k"] == {"1": "-1/10", "2": "-1/120"}


def test_assemble_round_trip(capsys):
    code, out, _ = run(capsys, "assemble", "-p", "2", "-N", "8", "--kind", "mass")
    assert code == 0
    mat = ExactMatrix.from_json(out)
    assert mat == assemble(2, 8, 8, "mass")
    assert mat[0, 0] == F(14, 120) and mat[1, 0] == F(40, 120)


def test_assemble_system_negative_delta(capsys):
    code, out, _ = run(capsys, "assemble", "-p", "2", "-N", "6", "--kind", "system", "--mu", "50",
                       "--delta", "-1/120")
    assert code == 0
    assert json.loads(out)["meta"]["kind"] == "system"


def test_assemble_formats(capsys):
    code, out, _ = run(capsys, "assemble", "-p", "1", "-N", "3", "--format", "mm")
    assert out.startswith("%%MatrixMarket")
    code, out, _ = run(capsys, "assemble", "-p", "1", "-N", "3", "--format", "csv")
    # row 0 tests phi_0 against phi_1, phi_2, ...
    assert out.splitlines()[:2] == ["1/6,0/1,0/1", "2/3,1/6,0/1"]
    code, _, err = run(capsys, "assemble", "-p", "1", "-N", "3", "--format", "svg")
    assert code == cli.EXIT_USAGE


def test_assemble_usage_errors(capsys):
    assert run(capsys, "assemble", "-p", "2")[0] == cli.EXIT_USAGE
    assert run(capsys, "assemble", "-p", "2", "-N", "4", "--kind", "deriv")[0] == cli.EXIT_USAGE
    assert run(capsys, "assemble", "-p", "2", "-N", "4", "--kind", "system")[0] == cli.EXIT_USAGE
    assert run(capsys, "bogus")[0] == cli.EXIT_USAGE
    assert run(capsys, "assemble", "-p", "2", "-N", "4", "--rho", "x/y")[0] == cli.EXIT_USAGE


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "-p", "1", "--rho", "13", "--delta", "0")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "exponential"
    assert set(data) >= {"type", "eta", "verdict", "roots"}
    assert all(set(r) == {"re", "im", "modulus"} for r in data["roots"])
    code, out, _ = run(capsys, "classify", "-p", "1", "--rho", "12", "--delta", "0")
    data = json.loads(out)
    assert data["verdict"] == "weak" and data["type"] == [0, 2, 0] and data["eta"] == 2


def test_classify_usage(capsys):
    assert run(capsys, "classify", "-p", "1", "--rho", "13")[0] == cli.EXIT_USAGE
    assert run(capsys, "classify", "-p", "1", "--rho", "13", "--delta", "1/10")[0] == cli.EXIT_USAGE


def test_classify_hypothesis_violation(capsys, monkeypatch):
    def boom(*a, **kw):
        raise toeplitz.HypothesisViolation("zero entry on outer codiagonal 1")

    monkeypatch.setattr(toeplitz, "classify_system", boom)
    code, _, err = run(capsys, "classify", "-p", "2", "--rho", "20", "--delta", "-1/60")
    assert code == cli.EXIT_HYPOTHESIS and "hypothesis violated" in err


def test_codiag(capsys):
    code, out, _ = run(capsys, "codiag", "-p", "2", "--rho", "1", "--delta", "0")
    data = json.loads(out)
    # (1/3 + 1/60) [1, 1/2, 1/2]
    assert data["K_star"] == ["7/20", "7/40", "7/40"]
    assert data["critical_rho"] is None
    code, out, _ = run(capsys, "codiag", "-p", "2", "--rho", "20", "--delta", "-1/60")
    data = json.loads(out)
    assert data["critical_rho"] == "20/1" and data["K_star"] == ["0/1"] * 3


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "-p", "1", "-n", "40", "--delta", "0", "--grid", "11,12,13")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["rho"] for r in rows] == ["11/1", "12/1", "13/1"]


def test_sweep_svg_and_manifest(tmp_path, capsys):
    out = tmp_path / "fig"
    code, _, _ = run(capsys, "sweep", "-p", "1", "-n", "30", "--rho", "20000", "--grid", "1e-3,1e-2",
                     "--format", "svg", "--out", str(out))
    assert code == 0
    assert (out / "sweep_p1.svg").exists() and (out / "sweep_p1.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "sweep"
    assert manifest["inputs"]["rho"] == "20000/1"
    assert "numpy" in manifest["versions"]
    assert len(manifest["outputs"]) == 2


def test_sweep_usage(capsys):
    assert run(capsys, "sweep", "-p", "1", "--grid", "1,2")[0] == cli.EXIT_USAGE
    assert run(capsys, "sweep", "-p", "1", "-n", "10", "--rho", "1", "--delta", "0",
               "--grid", "1")[0] == cli.EXIT_USAGE


def test_thresholds_out_file(tmp_path, capsys):
    target = tmp_path / "t.csv"
    assert run(capsys, "thresholds", "--out", str(target))[0] == 0
    assert target.read_text().startswith("p,rho_p")
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["outputs"] == [str(target)]
    assert "determinism" in manifest


def test_verify(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == cli.EXIT_OK
    assert out.count("PASS") >= 13 and "FAIL" not in out


def test_verify_failure_exit(capsys, monkeypatch):
    from splinestab import verify

    monkeypatch.setattr(verify, "CHECKS", [("always fails", lambda: (False, "forced"))])
    code, out, _ = run(capsys, "verify")
    assert code == cli.EXIT_VERIFY and "FAIL" in out


def test_negative_value_join():
    assert cli._join_negative(["--delta", "-1/2", "-p", "2"]) == ["--delta=-1/2", "-p", "2"]
    assert cli._join_negative(["--rho", "3"]) == ["--rho", "3"]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "splinestab", "thresholds", "--pmax", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "12/1" in res.stdout
    res = subprocess.run([sys.executable, "-m", "splinestab", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
