"""Command-line front end: outputs, exit codes and config handling."""
import json
from pathlib import Path

import numpy as np
import pytest

from nhgyro.cli import EXIT_CHART, EXIT_CONFIG, EXIT_OK, main, parse_init, parse_time, ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_suslov(tmp_path, capsys):
    csv = tmp_path / "s.csv"
    code, out, _ = run(capsys, "simulate", "--system", "suslov", "--t", "0:0.1:0.01", "--out", str(csv))
    assert code == EXIT_OK
    summary = json.loads(out)
    assert summary["steps"] == 10 and summary["terminated"] is None
    assert summary["max_drift"]["Hc"] < 1e-12
    lines = csv.read_text().splitlines()
    assert lines[0] == "t,q1,q2,q3,p1,p2,Hc" and len(lines) == 12


def test_simulate_chaplygin_columns_and_gauge(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "simulate", "--system", "chaplygin-sphere", "--t", "0:0.05:0.01", "--out", str(a))[0] == EXIT_OK
    assert run(capsys, "simulate", "--system", "chaplygin-sphere", "--gauge", "--t", "0:0.05:0.01", "--out", str(b))[0] == 0
    head = a.read_text().splitlines()[0].split(",")
    assert head[-4:] == ["Hc", "F1", "F2", "measure_density"]
    A = np.loadtxt(a, delimiter=",", skiprows=1)
    B = np.loadtxt(b, delimiter=",", skiprows=1)
    np.testing.assert_allclose(A, B, atol=1e-12)


def test_simulate_adaptive(tmp_path, capsys):
    code, out, _ = run(
        capsys, "simulate", "--system", "routh-toy", "--init", "q=0.5,0;p=0,0.2",
        "--t", "0:1:0.1", "--adaptive", "1e-10,1e-10", "--out", str(tmp_path / "r.csv"),
    )
    assert code == EXIT_OK and json.loads(out)["method"] == "rk45"


def test_simulate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(capsys, "simulate", "--system", "suslov", "--set", "I13=0.1", "--t", "0:0.05:0.01", "--out", str(path))
    assert a.read_bytes() == b.read_bytes()


def test_chart_exit_code(tmp_path, capsys):
    code, _, err = run(
        capsys, "simulate", "--system", "suslov", "--init", "q=0,0,0;p=1,0", "--t", "0:0.1:0.01",
        "--out", str(tmp_path / "x.csv"),
    )
    assert code == EXIT_CHART and "chart" in err


def test_config_errors(tmp_path, capsys):
    csv = tmp_path / "never.csv"
    assert run(capsys, "simulate", "--t", "1:0:0.1", "--out", str(csv))[0] == EXIT_CONFIG
    assert not csv.exists()
    assert run(capsys, "simulate", "--set", "I11=-1", "--out", str(csv))[0] == EXIT_CONFIG
    assert run(capsys, "simulate", "--system", "suslov", "--gauge", "--out", str(csv))[0] == EXIT_CONFIG
    assert run(capsys, "simulate", "--scale-conformal", "--out", str(csv))[0] == EXIT_CONFIG
    assert run(capsys, "verify", "--suite", "nonsense")[0] == EXIT_CONFIG
    assert run(capsys, "simulate", "--system", "pendulum")[0] == EXIT_CONFIG
    assert run(capsys, "frobnicate")[0] == EXIT_CONFIG


def test_verify_suite(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, stdout, _ = run(capsys, "verify", "--suite", "casimirs", "--seed", "3", "--out", str(out))
    assert code == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep == json.loads(stdout)
    assert rep["pass"] is True and rep["seed"] == 3


def test_bracket_outputs(capsys):
    code, out, _ = run(capsys, "bracket", "--system", "routh-toy")
    mat = np.array(json.loads(out)["matrix"])
    assert code == EXIT_OK
    np.testing.assert_array_equal(mat[:2, 2:], np.eye(2))
    code, out, _ = run(capsys, "bracket", "--system", "chaplygin-sphere", "--gauge")
    res = json.loads(out)
    labels = res["labels"]
    mat = np.array(res["matrix"])
    assert mat[labels.index("p1"), labels.index("p2")] == pytest.approx(0.0, abs=1e-12)
    assert mat[labels.index("p1"), labels.index("p3")] == pytest.approx(0.0, abs=1e-12)


def test_bracket_reduced(capsys):
    code, out, _ = run(capsys, "bracket", "--system", "suslov", "--reduced", "--init", "Omega=1,0")
    res = json.loads(out)
    assert code == EXIT_OK and res["labels"] == ["Omega1", "Omega2"]
    code, out, _ = run(capsys, "bracket", "--system", "chaplygin-sphere", "--reduced", "--scale-conformal")
    assert code == EXIT_OK and json.loads(out)["conformal_factor"] > 0


def test_jacobi_command(capsys):
    code, out, _ = run(capsys, "jacobi", "--system", "chaplygin-sphere", "--scale-conformal")
    assert code == EXIT_OK and json.loads(out)["max_abs"] < 1e-6
    code, out, _ = run(capsys, "jacobi", "--system", "chaplygin-sphere", "--reduced")
    assert json.loads(out)["max_abs"] > 1e-3
    assert run(capsys, "jacobi", "--system", "suslov", "--reduced")[0] == EXIT_CONFIG


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    csv = tmp_path / "c.csv"
    cfg.write_text(f"[run]\nsystem = suslov\nt = 0:0.02:0.01\nout = {csv}\n\n[params]\nI11 = 2.5\n")
    code, out, _ = run(capsys, "simulate", "--config", str(cfg))
    assert code == EXIT_OK and json.loads(out)["steps"] == 2
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--t", "0:0.05:0.01")
    assert json.loads(out)["steps"] == 5
    bad = tmp_path / "bad.ini"
    bad.write_text("[run]\ncolour = blue\n")
    assert run(capsys, "simulate", "--config", str(bad))[0] == EXIT_CONFIG


def test_parsers():
    assert parse_time("0:1:0.5") == (0.0, 1.0, 0.5)
    np.testing.assert_array_equal(parse_init("K=1,0,0;Gamma=0,1,0")["Gamma"], [0.0, 1.0, 0.0])
    with pytest.raises(ConfigError):
        parse_time("0:1")
    with pytest.raises(ConfigError):
        parse_time("0:1:-1")


DISK = str(Path(__file__).resolve().parents[1] / "scripts" / "user_systems" / "rolling_disk.py")


def test_user_system_file(tmp_path, capsys):
    csv = tmp_path / "disk.csv"
    code, out, _ = run(capsys, "simulate", "--system", DISK, "--t", "0:5:0.01", "--out", str(csv))
    assert code == EXIT_OK
    summary = json.loads(out)
    x, y, phi, psi = summary["final"]["q"]
    # heading turns at p1/J = 2 and the disk rolls at p2/(I + m R^2) = 2/3
    assert phi == pytest.approx(10.0, abs=1e-12)
    assert psi == pytest.approx(10.0 / 3.0, abs=1e-12)
    assert x == pytest.approx(np.sin(10.0) / 3.0, abs=1e-8)
    assert y == pytest.approx((1.0 - np.cos(10.0)) / 3.0, abs=1e-8)
    assert csv.read_text().splitlines()[0] == "t,q1,q2,q3,q4,p1,p2,Hc"


def test_user_system_errors(tmp_path, capsys):
    assert run(capsys, "simulate", "--system", str(tmp_path / "missing.py"))[0] == EXIT_CONFIG
    assert run(capsys, "simulate", "--system", DISK, "--set", "mass=2")[0] == EXIT_CONFIG
    assert run(capsys, "simulate", "--system", DISK, "--gauge")[0] == EXIT_CONFIG
    bare = tmp_path / "bare.py"
    bare.write_text("x = 1\n")
    assert run(capsys, "bracket", "--system", str(bare))[0] == EXIT_CONFIG
