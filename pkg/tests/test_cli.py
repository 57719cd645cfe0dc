import json
import math
import subprocess
import sys

import pytest

from thetafourier.cli import main

TWO_PI = 2 * math.pi

CONFIGS = {
    "poincare": {"command": "poincare", "theta": [-1], "T": TWO_PI},
    "diagnose": {"command": "diagnose", "theta": [1, 1], "T": TWO_PI, "operator": {"c": [0, 1], "q": 0}},
    "analyze": {"command": "analyze", "theta": [2, [0, 1]], "T": 1.0, "N": 32, "cutoff": 10,
                "input": {"expr": [{"kind": "mode", "xi": [1, -2]}]}},
    "ode": {"command": "ode", "theta": [2], "T": 1.0, "N": 32, "lambda": 0,
            "input": {"expr": [{"kind": "exp", "rate": math.log(2)}]}},
    "solve": {"command": "solve", "theta": [2, [0, 1]], "T": 1.0, "N": 32,
              "operator": {"c": {"expr": [{"kind": "const", "coef": [0, 2]},
                                          {"kind": "sin", "coef": [0, 1], "freq": TWO_PI}]}, "q": 0.5},
              "input": {"expr": [{"kind": "mode", "xi": [1, -2]}, {"kind": "mode", "xi": [0, 3], "coef": [0.5, 0.2]}]}},
    "transform": {"command": "transform", "theta": [2], "T": 1.0, "N": 16,
                  "input": {"expr": [{"kind": "exp", "rate": math.log(2)}]}},
    "verify": {"command": "verify", "options": {"trials": 2}},
}


def run(tmp_path, cfg, name="job", out="out", extra=()):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(cfg))
    return main(["run", "--config", str(p), "--out-dir", str(tmp_path / out), *extra])


def report(tmp_path, name, out="out"):
    return json.loads((tmp_path / out / f"{name}_report.json").read_text())


@pytest.mark.parametrize("cmd", sorted(CONFIGS))
def test_success(tmp_path, cmd):
    assert run(tmp_path, CONFIGS[cmd]) == 0
    rep = report(tmp_path, cmd)
    assert rep["status"] == "ok" and rep["command"] == cmd
    assert "tolerances" in rep and rep["config"] == CONFIGS[cmd]


def test_poincare_constant(tmp_path):
    run(tmp_path, CONFIGS["poincare"])
    assert report(tmp_path, "poincare")["result"]["constant"] == pytest.approx(0.5)


def test_diagnose_corollary(tmp_path):
    run(tmp_path, CONFIGS["diagnose"])
    r = report(tmp_path, "diagnose")["result"]["verdict"]
    assert (r["gh"], r["gs"]) == ("yes", "yes") and r["route"].startswith("Corollary")


def test_synthesize_from_analyze(tmp_path):
    run(tmp_path, CONFIGS["analyze"])
    cfg = {"command": "synthesize", "theta": [2, [0, 1]], "T": 1.0, "N": 32,
           "input": {"coeffs_csv": str(tmp_path / "out" / "analyze_coeffs.csv")}}
    assert run(tmp_path, cfg) == 0


def test_unknown_key_is_invalid(tmp_path):
    cfg = dict(CONFIGS["diagnose"], bogus=1)
    assert run(tmp_path, cfg) == 2
    assert not (tmp_path / "out").exists() or not list((tmp_path / "out").iterdir())


@pytest.mark.parametrize("patch", [{"theta": [0, 1]}, {"T": -1}, {"N": 12}, {"command": "launch"},
                                   {"tolerances": {"nope": 1}}])
def test_invalid_values(tmp_path, patch):
    assert run(tmp_path, dict(CONFIGS["analyze"], **patch)) == 2


def test_wrong_theta_for_input(tmp_path):
    cfg = dict(CONFIGS["ode"], theta=[3])
    assert run(tmp_path, cfg) == 2


def test_unsolvable_is_numeric_failure(tmp_path):
    cfg = {"command": "solve", "theta": [1, 1], "T": TWO_PI, "N": 16, "operator": {"c": 0, "q": 0},
           "input": {"expr": [{"kind": "mode", "xi": [0, 1]}]}}
    assert run(tmp_path, cfg, name="unsolv") == 3
    assert report(tmp_path, "solve")["status"] == "failed"


def test_missing_config_is_io_error(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.json"), "--out-dir", str(tmp_path)]) == 4


def test_missing_input_file_is_io_error(tmp_path):
    cfg = dict(CONFIGS["analyze"], input={"csv": "nowhere.csv"})
    assert run(tmp_path, cfg) == 4


def test_tolerance_override_recorded(tmp_path):
    cfg = dict(CONFIGS["poincare"], tolerances={"critical_tol": 1e-6})
    assert run(tmp_path, cfg) == 0
    assert report(tmp_path, "poincare")["tolerances"]["critical_tol"] == 1e-6
    from thetafourier import poincare
    assert poincare.CRITICAL_TOL == 1e-12


def test_deterministic(tmp_path):
    for out in ("a", "b"):
        for cmd in ("solve", "verify", "analyze"):
            run(tmp_path, CONFIGS[cmd], name=cmd, out=out, extra=("--seed", "7"))
    a = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert a == sorted(p.name for p in (tmp_path / "b").iterdir())
    for n in a:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_module_entry_point(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps(CONFIGS["poincare"]))
    r = subprocess.run([sys.executable, "-m", "thetafourier", "run", "--config", str(p), "--out-dir", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
