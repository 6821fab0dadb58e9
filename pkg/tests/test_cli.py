import json
import subprocess
import sys

import pytest

from kerrsense.cli import main

GOOD = """\
units: gamma
sweeps:
  - name: pt
    base: {u_kerr: 1.0e-9, eps: 1.0e-3, g2: crit}
    outputs: [steady, snr]
"""


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1
    return code, json.loads(out[0])


def test_eigen_at_critical_point(capsys):
    code, out = run(capsys, "eigen", "--gamma-hz2pi", "1e9", "--g", "0.25", "--delta", "0", "--u", "0")
    assert code == 0
    assert out["Lambda_plus"] == {"re": 0.0, "im": 0.0}
    assert out["Lambda_minus"]["re"] == -1.0


def test_snr_headline(capsys):
    code, out = run(capsys, "snr", "--eps", "1e-3", "--u-hz2pi", "1", "--g", "crit")
    assert code == 0
    assert out["snr_db"] == pytest.approx(13.0, abs=1.0)


def test_steady_empty_cavity(capsys):
    code, out = run(capsys, "steady", "--eps", "0.1", "--g", "0", "--u", "0", "--delta", "0")
    assert code == 0
    assert out["alpha"] == {"re": pytest.approx(0.2), "im": 0.0}


def test_hz_units_flag(capsys):
    _, a = run(capsys, "steady", "--units", "hz2pi", "--gamma-hz2pi", "1e9", "--eps", "1e6", "--u", "1", "--g", "crit")
    _, b = run(capsys, "steady", "--eps", "1e-3", "--u", "1e-9", "--g", "0.25")
    assert a["n_mean"] == pytest.approx(b["n_mean"], rel=1e-10)


def test_divergent_regime_is_structured_error(capsys):
    code, out = run(capsys, "noise", "--eps", "1e-3", "--g", "0.3", "--u", "0")
    assert code == 2
    assert out["error"] == "DivergentSteadyState"


def test_bad_parameter_is_usage_error(capsys):
    code, out = run(capsys, "steady", "--u", "-1")
    assert code == 1 and out["field"] == "u_kerr"
    code, out = run(capsys, "steady", "--u", "1", "--u-hz2pi", "1")
    assert code == 1
    code, out = run(capsys, "sens", "--u", "0", "--g", "crit", "--eps", "1e-3")
    assert code == 1


def test_unknown_flag(capsys):
    assert main(["steady", "--bogus"]) == 1
    assert main([]) == 1


def test_sens_and_oracle(capsys):
    code, out = run(capsys, "sens", "--eps", "1e-3", "--u", "1e-9", "--g", "crit")
    assert code == 0 and out["s_numeric"] == pytest.approx(out["s_analytic"], rel=0.1)
    assert out["s_numeric_hz2pi"] == pytest.approx(out["s_numeric"] / 1e9)
    code, out = run(capsys, "oracle", "--eps", "0.1", "--u", "0", "--g", "0", "--cutoff", "16")
    assert code == 0 and out["expect_n"] == pytest.approx(0.04)


def test_config_for_point_commands(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(GOOD)
    code, out = run(capsys, "snr", "--config", str(cfg))
    assert code == 0 and out["snr_db"] == pytest.approx(13.47, abs=0.01)


def test_run_config(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(GOOD)
    code, out = run(capsys, "run", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 0
    assert (tmp_path / "o" / "pt.csv").exists() and (tmp_path / "o" / "pt.manifest.json").exists()
    cfg.write_text(GOOD + "    extra: 1\n")
    code, out = run(capsys, "run", str(cfg))
    assert code == 1 and out["line"] == 6


def test_run_flags_exit_two(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(GOOD.replace("u_kerr: 1.0e-9", "u_kerr: 0").replace("crit", "0.3"))
    code, out = run(capsys, "run", str(cfg), "--out", str(tmp_path), "--format", "json")
    assert code == 2 and out["sweeps"][0]["flagged"] == 1
    assert (tmp_path / "pt.json").exists()


def test_figure_command(tmp_path, capsys):
    code, out = run(capsys, "figure", "fig2a", "--out", str(tmp_path))
    assert code == 0
    header = (tmp_path / "fig2a.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("g2,g2_hz2pi,mf_eig_plus_re")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "kerrsense", "eigen", "--g", "0.2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["Lambda_plus"]["re"] == pytest.approx(-0.1)
