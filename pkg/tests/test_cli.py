import json

import pytest

from su2riccati.cli import main
from su2riccati.trace import COLUMNS, read_csv


def test_list(capsys):
    assert main(["list"]) == 0
    assert capsys.readouterr().out.split() == ["scenario_tanh", "scenario_sinh", "example1",
                                               "theta_sine", "theta_arctan_a", "theta_arctan_b"]


def test_verify_passes_and_is_deterministic(capsys):
    assert main(["verify", "scenario_tanh", "--t-max", "3", "--steps", "1001"]) == 0
    first = capsys.readouterr().out
    assert "FAIL" not in first and "8/8" in first
    assert main(["verify", "scenario_tanh", "--t-max", "3", "--steps", "1001"]) == 0
    assert capsys.readouterr().out == first


def test_verify_failure_exit_code(capsys):
    # a sloppy quadrature tolerance leaves the residuals exact but shifts the
    # integrated phases, which only the oracle comparison can see
    assert main(["verify", "theta_sine", "--steps", "5", "--tol", "1e-2"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_run_csv(tmp_path):
    out = tmp_path / "tr.csv"
    assert main(["run", "theta_arctan_b", "--t-max", "3", "--steps", "301",
                 "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].split(",") == list(COLUMNS)
    assert len(lines) == 302


def test_run_json_with_params(tmp_path):
    out = tmp_path / "tr.json"
    assert main(["run", "example1", "--param", "c=2", "--param", "phi_omega=0.2*t",
                 "--steps", "11", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["metadata"]["parameters"]["c"] == 2.0
    assert doc["metadata"]["parameters"]["phi_omega"] == "0.2*t"
    assert len(doc["samples"]) == 11


def test_run_rerun_reproduces(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["run", "theta_sine", "--steps", "51", "--out"]
    assert main(args + [str(a)]) == 0 and main(args + [str(b)]) == 0
    assert a.read_text() == b.read_text()
    cols = read_csv(a.read_text())
    assert cols["t"][-1] == 3.0


def test_general_integral(tmp_path, capsys):
    out = tmp_path / "gi.csv"
    assert main(["general-integral", "scenario_tanh", "--c0", "2", "--c0", "1+i", "--c0=-3i",
                 "--steps", "101", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 3 * 101
    assert main(["general-integral", "scenario_tanh", "--c0", "0.12773452832868973-0.8960899780817588j",
                 "--steps", "201", "--format", "json", "--out", str(tmp_path / "p.json")]) == 0
    assert "pole near" in capsys.readouterr().err


def _config(tmp_path, doc):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def test_custom_run_and_verify(tmp_path, capsys):
    cfg = _config(tmp_path, {"mode": "X",
                             "expressions": {"A": "t", "phi": "t + t^2/4", "Omega": "k*cos(t)"},
                             "parameters": {"k": 0.5}, "grid": {"t_max": 2, "steps": 201},
                             "tolerances": {"quadrature": 1e-10}})
    assert main(["custom", cfg, "--verify"]) == 0
    assert "8/8" in capsys.readouterr().out
    out = tmp_path / "c.csv"
    assert main(["custom", cfg, "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 202
    cfg = _config(tmp_path, {"mode": "Theta",
                             "expressions": {"Theta": "t/2", "omega_mag": "1", "omega_phase": "0.3*t"},
                             "grid": {"t_max": 1.2, "steps": 101}})
    assert main(["custom", cfg, "--verify"]) == 0


@pytest.mark.parametrize("doc, needle", [
    ("{not json", "malformed"),
    ({"mode": "X"}, "expressions"),
    ({"mode": "X", "expressions": {}, "extra": 1}, "unknown config keys"),
    ({"mode": "Z", "expressions": {}}, "mode"),
    ({"mode": "X", "expressions": {"A": "tanh(w*t", "phi": "t", "Omega": "1"}}, "offset 9"),
    ({"mode": "X", "expressions": {"A": "t", "phi": "t", "Omega": "1"}, "grid": {"steps": 1}}, "steps"),
])
def test_custom_config_errors(tmp_path, capsys, doc, needle):
    assert main(["custom", _config(tmp_path, doc)]) == 2
    assert needle in capsys.readouterr().err


def test_numerical_failure_exit_code(tmp_path, capsys):
    # 2 int |omega| cos Theta reaches pi inside the interval
    cfg = _config(tmp_path, {"mode": "Theta",
                             "expressions": {"Theta": "0*t", "omega_mag": "1", "omega_phase": "0"},
                             "grid": {"t_max": 2, "steps": 101}})
    assert main(["custom", cfg]) == 3
    assert "phase singularity" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["run"], ["verify", "nope"], ["run", "scenario_tanh", "--steps", "1"],
    ["run", "scenario_tanh", "--t-max", "-1"], ["run", "scenario_tanh", "--param", "novalue"],
    ["run", "example1", "--param", "c=0"],
    ["general-integral", "scenario_tanh"], ["run", "scenario_tanh", "--format", "xml"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "su2riccati", "list"], capture_output=True, text=True)
    assert r.returncode == 0 and "theta_sine" in r.stdout
