import json
import math

import pytest

from schur2.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_measure_reference_value(capsys):
    code, out = run_cli(capsys, "measure", "--set", "pqball:p=2,q=-0.4,eps=1",
                        "--k", "2", "--shift", "0.809,0.588")
    rec = json.loads(out)
    assert code == 0
    assert rec["value"] == pytest.approx(0.5250, abs=5e-4)


def test_measure_chi2_oracle(capsys):
    from scipy.stats import chi2
    code, out = run_cli(capsys, "measure", "--set", "pball:p=2,eps=1",
                        "--k", "3", "--shift", "0,0,0")
    rec = json.loads(out)
    assert code == 0
    assert rec["value"] == pytest.approx(chi2.cdf(3.0, 3), abs=1e-8)


def test_measure_cube_product(capsys):
    code, out = run_cli(capsys, "measure", "--set", "cube:a=1",
                        "--k", "2", "--shift", "0,0")
    rec = json.loads(out)
    assert rec["value"] == pytest.approx(0.466065, abs=1e-6)


def test_measure_dimension_mismatch_is_usage_error(capsys):
    code, _ = run_cli(capsys, "measure", "--set", "cube:a=1",
                      "--k", "2", "--shift", "0,0,0")
    assert code == 1


def test_critical_reference(capsys):
    code, out = run_cli(capsys, "critical", "--k", "2", "--p", "2",
                        "--alpha", "0.05")
    rec = json.loads(out)
    assert rec["critical_value"] == pytest.approx(1.73082, abs=1e-5)


def test_are_reference(capsys):
    code, out = run_cli(capsys, "are", "--k", "2", "--p", "1",
                        "--alpha", "0.05", "--beta", "0.95", "--u", "1,1")
    rec = json.loads(out)
    assert rec["are"] == pytest.approx(1.0317, abs=0.003)


def test_verify_counterexample(capsys):
    code, out = run_cli(capsys, "verify", "counterexample",
                        "--k", "2", "--eps", "0.15")
    rec = json.loads(out)
    assert code == 0
    assert rec["passed"]
    assert rec["R"] == pytest.approx(3.41, abs=0.01)


def test_sweep_csv_format(capsys):
    code, out = run_cli(capsys, "sweep", "--p", "2", "--alpha", "0.05",
                        "--beta", "0.9", "--angles", "3", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "angle,are,abs_error,s2_norm,sp_norm,exists_flag"
    assert len(lines) == 4


def test_seed_fixes_mc_output(capsys):
    args = ("measure", "--set", "pqball:p=5,q=-1,eps=1", "--k", "3",
            "--shift", "0.5,0.5,0.5", "--method", "MC_PLAIN", "--seed", "9")
    _, out1 = run_cli(capsys, *args, "--workers", "1")
    _, out2 = run_cli(capsys, *args, "--workers", "3")
    v1 = json.loads(out1)
    v2 = json.loads(out2)
    assert v1["value"] == v2["value"]


def test_output_file(tmp_path, capsys):
    dest = tmp_path / "out.json"
    code, _ = run_cli(capsys, "critical", "--k", "1", "--p", "inf",
                      "--alpha", "0.1", "--output", str(dest))
    rec = json.loads(dest.read_text())
    assert rec["critical_value"] == pytest.approx(1.6448536, abs=1e-6)


def test_unknown_flag_is_fatal(capsys):
    code = main(["critical", "--k", "2", "--p", "2", "--alpha", "0.05",
                 "--bogus"])
    assert code == 1


def test_figures_2_emits_four_measures(capsys):
    code, out = run_cli(capsys, "figures", "--which", "2")
    rows = json.loads(out)
    assert code == 0
    assert len(rows) == 4
    near = {round(r["angle"], 3): r["value"] for r in rows if r["radius"] == 1.0}
    assert near[round(math.pi / 5, 3)] == pytest.approx(0.5250, abs=5e-4)
    assert near[round(math.pi / 20, 3)] == pytest.approx(0.5268, abs=5e-4)
