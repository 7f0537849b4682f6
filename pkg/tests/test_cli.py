import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from distrelax.cli import main
from distrelax.measure import MeasureSpec, validate

HALF = {"atoms": [{"location": 0.5, "weight": 1.0}]}


def run(tmp_path, config, *args):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config))
    out, err = io.StringIO(), io.StringIO()
    code = main([args[0], "--config", str(path), *args[1:]], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_single_atom(tmp_path):
    cfg = {"measure": HALF, "lambda": 1.0,
           "grid": {"kind": "log", "t_min": 1e-2, "t_max": 1e2, "points": 50}}
    code, out, _ = run(tmp_path, cfg, "eval")
    assert code == 0
    data = rows(out)
    assert len(data) == 50
    u = np.array([float(r["u_spectral"]) for r in data])
    assert u[0] < 1 and np.all(np.diff(u) < 0)
    t = np.array([float(r["t"]) for r in data])
    assert np.allclose(u, [math.erfc(math.sqrt(x)) * math.exp(x) for x in t], rtol=1e-10)


def test_eval_with_stepping(tmp_path):
    cfg = {"measure": HALF, "lambda": 1.0, "grid": [0.5, 1.0, 2.0],
           "solver": {"stepping": {"h": 0.005, "T": 2.0}}}
    code, out, _ = run(tmp_path, cfg, "eval")
    assert code == 0
    data = rows(out)
    assert set(data[0]) == {"t", "u_spectral", "err_spectral", "u_stepping", "err_stepping", "abs_diff"}
    assert max(float(r["abs_diff"]) for r in data) < 1e-3


@pytest.mark.parametrize("measure, lam, code_name", [
    ({"atoms": [{"location": 1.0, "weight": 1.0}]}, 1.0, "AtomOutOfRange"),
    (HALF, 0.0, "ConfigError"),
    (HALF, -2.0, "ConfigError"),
    ({"atoms": []}, 1.0, "EmptyMeasure"),
    ({"density": {"kind": "power_law", "a": 1.0, "exponent": -1.5}}, 1.0, None),
])
def test_config_errors_exit_2(tmp_path, measure, lam, code_name):
    code, out, err = run(tmp_path, {"measure": measure, "lambda": lam, "grid": [1.0]}, "eval")
    assert code == 2 and out == ""
    obj = json.loads(err)
    assert set(obj) == {"error", "message"}
    if code_name:
        assert obj["error"] == code_name


def test_bad_grid_exit_2(tmp_path):
    code, _, err = run(tmp_path, {"measure": HALF, "grid": [2.0, 1.0]}, "eval")
    assert code == 2 and json.loads(err)["error"] == "DomainError"


def test_unreadable_config(tmp_path):
    err = io.StringIO()
    assert main(["eval", "--config", str(tmp_path / "missing.json")], stderr=err) == 2
    assert json.loads(err.getvalue())["error"] == "ConfigError"


@pytest.mark.parametrize("exc", ["QuadratureFailure", "NonMonotoneOutput"])
def test_numerical_failure_exit_3(tmp_path, monkeypatch, exc):
    import distrelax.cli as cli
    import distrelax.errors as errors

    def boom(*a, **k):
        raise getattr(errors, exc)("injected")

    monkeypatch.setattr(cli, "solve_spectral", boom)
    code, out, err = run(tmp_path, {"measure": HALF, "grid": [1.0]}, "eval")
    assert code == 3 and out == ""
    assert json.loads(err) == {"error": exc, "message": "injected"}


def test_diagnose_records(tmp_path):
    cfg = {"measure": HALF, "lambda": 1.0,
           "diagnostics": [{"name": "cm-check"}, {"name": "normalization"},
                           {"name": "laplace-consistency"}]}
    code, out, _ = run(tmp_path, cfg, "diagnose")
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert [r["name"] for r in recs] == ["cm-check", "normalization", "laplace-consistency"]
    assert all(r["verdict"] == "pass" for r in recs)
    assert recs[0]["metrics"]["max_violation"] <= recs[0]["metrics"]["tol"]


def test_diagnose_log_power(tmp_path):
    cfg = {"measure": {"density": {"kind": "constant", "c": 1.0}}, "lambda": 1.0,
           "diagnostics": [{"name": "envelope", "envelope": {"family": "log_power", "exponent": 1.0}}]}
    code, out, _ = run(tmp_path, cfg, "diagnose")
    rec = json.loads(out)
    assert code == 0 and rec["verdict"] == "pass" and rec["metrics"]["drift"] < 0.1


def test_diagnose_empty(tmp_path):
    code, out, _ = run(tmp_path, {"measure": HALF, "diagnostics": []}, "diagnose")
    assert code == 0 and out == ""


def test_unknown_diagnostic(tmp_path):
    code, _, err = run(tmp_path, {"measure": HALF, "diagnostics": [{"name": "nope"}]}, "diagnose")
    assert code == 2


def test_kernel_k(tmp_path):
    code, out, _ = run(tmp_path, {"measure": HALF, "kernel": {"what": "k", "points": [0.5, 1.0]}}, "kernel")
    assert code == 0
    assert float(rows(out)[1]["k"]) == pytest.approx(0.5641896, abs=1e-7)


def test_kernel_K_identity(tmp_path):
    cfg = {"measure": {"density": {"kind": "power_exponential", "a": 1.0, "gamma": 0.0, "beta": 1.0}},
           "kernel": {"what": "K", "points": [1e-3, 0.1, 1.0, 10.0, 100.0]}}
    code, out, _ = run(tmp_path, cfg, "kernel")
    assert code == 0
    assert all(float(r["rel_diff"]) <= 1e-10 for r in rows(out))


@pytest.mark.parametrize("what", ["kappa", "spectral-components", "spectral-density"])
def test_kernel_other(tmp_path, what):
    cfg = {"measure": HALF, "lambda": 2.0, "kernel": {"what": what, "points": [0.1, 1.0, 10.0]}}
    code, out, _ = run(tmp_path, cfg, "kernel")
    assert code == 0 and len(rows(out)) == 3
    if what == "spectral-density":
        assert all(float(r["phi"]) >= 0 for r in rows(out))


def test_kernel_what_flag(tmp_path):
    code, out, _ = run(tmp_path, {"measure": HALF, "kernel": {"points": [1.0]}}, "kernel", "--what", "kappa")
    assert code == 0 and out.startswith("x,kappa\n")


def test_print_config_round_trip(tmp_path):
    cfg = {"measure": {"atoms": [{"location": 0.3, "weight": 0.5},
                                 {"kind": "geometric", "base": 0.3, "ratio": 0.5, "weight": 0.5,
                                  "weight_ratio": 0.5, "direction": "toward1", "start": 1}],
                       "density": {"kind": "tabulated", "alpha": [0, 0.5, 1], "values": [1, 2, 1]}},
           "lambda": 1.5, "grid": [1.0]}
    code, out, _ = run(tmp_path, cfg, "eval", "--print-config")
    assert code == 0
    echoed = json.loads(out)
    original = validate(MeasureSpec.from_dict(cfg["measure"]))
    assert validate(MeasureSpec.from_dict(echoed["measure"])) == original
    code2, out2, _ = run(tmp_path, echoed, "eval", "--print-config")
    assert out2 == out


def test_deterministic_bytes(tmp_path):
    cfg = {"measure": {"density": {"kind": "constant", "c": 1.0}}, "lambda": 1.0,
           "grid": {"kind": "linear", "t_min": 0.0, "t_max": 5.0, "points": 11}}
    a = run(tmp_path, cfg, "eval")[1]
    b = run(tmp_path, cfg, "eval")[1]
    assert a == b and "\r" not in a
    first = a.splitlines()[1].split(",")
    assert first[0] == "0" and first[1] == "1"


def test_out_file_and_module_entry(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"measure": HALF, "grid": [1.0]}))
    target = tmp_path / "out.csv"
    proc = subprocess.run([sys.executable, "-m", "distrelax", "eval", "--config", str(path),
                           "--out", str(target)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == ""
    assert float(rows(target.read_text())[0]["u_spectral"]) == pytest.approx(math.e * math.erfc(1), rel=1e-12)
