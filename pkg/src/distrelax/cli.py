"""Command-line front end: ``distrelax {eval,diagnose,kernel} --config run.json``.

Curves go out as CSV, diagnostics as NDJSON.  Exit status is 0 on success,
2 for configuration or validation errors and 3 for numerical failures; in
both error cases a JSON object ``{"error": ..., "message": ...}`` is written
to stderr.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys

import numpy as np

from .asymptotics import check_bound, envelope_from_dict, ratio_drift
from .errors import DistRelaxError, DomainError, NonMonotoneOutput, QuadratureFailure
from .kernel import KernelAccessor
from .measure import MeasureSpec, validate
from .spectral import (SpectralDensity, check_complete_monotonicity, check_grid,
                       numerical_laplace, solve_spectral)
from .stepping import richardson_refine, solve_stepping

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(DistRelaxError):
    code = "ConfigError"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def make_grid(spec):
    """Grid from ``{"kind": "log"|"linear", "t_min", "t_max", "points"}`` or a list."""
    if isinstance(spec, list):
        return check_grid(spec)
    if not isinstance(spec, dict):
        raise ConfigError("grid must be an object or a list of numbers")
    if "values" in spec:
        return check_grid(spec["values"])
    try:
        kind = spec.get("kind", "log")
        lo, hi, n = float(spec["t_min"]), float(spec["t_max"]), int(spec["points"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid specification: {exc}") from None
    if n < 1:
        raise ConfigError("grid needs at least one point")
    if kind == "log":
        if not 0 < lo <= hi:
            raise ConfigError("log grid needs 0 < t_min <= t_max")
        return check_grid(np.logspace(math.log10(lo), math.log10(hi), n))
    if kind == "linear":
        return check_grid(np.linspace(lo, hi, n))
    raise ConfigError(f"unknown grid kind {kind!r}")


class RunConfig:
    """Parsed and validated run configuration."""

    def __init__(self, raw):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        self.raw = raw
        if "measure" not in raw:
            raise ConfigError("config needs a 'measure' object")
        self.measure_spec = MeasureSpec.from_dict(raw["measure"])
        self.measure = validate(self.measure_spec)
        lam = raw.get("lambda", 1.0)
        if isinstance(lam, bool) or not isinstance(lam, (int, float)) or not (lam > 0) or math.isinf(lam):
            raise ConfigError(f"lambda must be a positive number, got {lam!r}")
        self.lam = float(lam)
        self.grid = make_grid(raw["grid"]) if "grid" in raw else None
        self.solver = raw.get("solver", {}) or {}
        self.diagnostics = raw.get("diagnostics", []) or []
        if not isinstance(self.diagnostics, list):
            raise ConfigError("diagnostics must be a list")
        self.kernel = raw.get("kernel", {}) or {}
        threads = raw.get("threads")
        self.threads = int(threads) if threads else (os.cpu_count() or 1)

    def normalized(self):
        out = dict(self.raw)
        out["measure"] = self.measure_spec.to_dict()
        out["lambda"] = self.lam
        return out


def load_config(path):
    try:
        if path == "-":
            raw = json.load(sys.stdin)
        else:
            with open(path) as fh:
                raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return RunConfig(raw)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def fmt(v):
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def write_csv(out, header, columns):
    out.write(",".join(header) + "\n")
    for row in zip(*columns):
        out.write(",".join(fmt(v) for v in row) + "\n")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _stepping_on_grid(cfg, grid):
    opts = cfg.solver.get("stepping")
    if not opts:
        return None, None
    h, T = float(opts.get("h", 0.01)), float(opts.get("T", grid.max()))
    fine = solve_stepping(cfg.measure, cfg.lam, h, T)
    if opts.get("richardson", True):
        coarse = solve_stepping(cfg.measure, cfg.lam, 2 * h, T)
        series = richardson_refine(coarse, fine, order=opts.get("order"))
    else:
        series = fine
    inside = grid <= series.t[-1] * (1 + 1e-12)
    u = np.where(inside, np.interp(grid, series.t, series.u), np.nan)
    err = np.where(inside, np.interp(grid, series.t, series.error), np.nan)
    return u, err


def cmd_eval(cfg, out):
    if cfg.grid is None:
        raise ConfigError("eval needs a 'grid'")
    spec = solve_spectral(cfg.measure, cfg.lam, cfg.grid, threads=cfg.threads)
    header = ["t", "u_spectral", "err_spectral"]
    cols = [spec.t, spec.u, spec.error]
    u_st, err_st = _stepping_on_grid(cfg, cfg.grid)
    if u_st is not None:
        header += ["u_stepping", "err_stepping", "abs_diff"]
        cols += [u_st, err_st, np.abs(u_st - spec.u)]
    write_csv(out, header, cols)


def run_diagnostic(cfg, diag, density):
    name = diag.get("name")
    if name == "cm-check":
        grid = make_grid(diag["grid"]) if "grid" in diag else cfg.grid
        if grid is None:
            grid = make_grid({"kind": "log", "t_min": 1e-2, "t_max": 1e2, "points": 60})
        rep = check_complete_monotonicity(
            lambda g: solve_spectral(cfg.measure, cfg.lam, g, density=density),
            grid, max_order=int(diag.get("max_order", 4)), density=density)
        worst = max(rep.max_violation.values())
        return rep.passed, {"max_violation": worst, "tol": rep.tol, "phi_min": rep.phi_min,
                            "failures": rep.failures}
    if name == "envelope":
        env = envelope_from_dict(diag["envelope"], cfg.measure)
        grid = make_grid(diag.get("grid", {"kind": "log", "t_min": 1e8, "t_max": 1e14,
                                           "points": 25}))
        series = solve_spectral(cfg.measure, cfg.lam, grid, density=density)
        res = ratio_drift(series, env)
        limit = float(diag.get("max_drift", 0.1))
        return res.drift < limit, {"drift": res.drift, "mean_ratio": res.mean_ratio,
                                   "max_drift": limit}
    if name == "bound":
        env = envelope_from_dict(diag["envelope"], cfg.measure)
        grid = make_grid(diag.get("grid", {"kind": "log", "t_min": 1e2, "t_max": 1e60,
                                           "points": 100}))
        series = solve_spectral(cfg.measure, cfg.lam, grid, density=density)
        res = check_bound(series, env)
        return res.bounded, {"sup_ratio": res.sup_ratio, "sub_sups": res.sub_sups}
    if name == "laplace-consistency":
        p = np.asarray(diag.get("p", [0.1, 0.3, 1.0, 3.0, 10.0]), dtype=float)
        rtol = float(diag.get("rtol", 1e-3))
        num = numerical_laplace(lambda t: density.laplace(t)[0], p)
        K = KernelAccessor(cfg.measure).laplace_symbol(p)
        exact = K / (p * K + cfg.lam)
        err = float(np.max(np.abs(num / exact - 1)))
        return err <= rtol, {"max_rel_error": err, "rtol": rtol}
    if name == "normalization":
        tol = float(diag.get("tol", 1e-4))
        dev = abs(density.normalization() - 1.0)
        return dev <= tol, {"deviation": dev, "tol": tol}
    if name == "method-agreement":
        h, T = float(diag.get("h", 0.0025)), float(diag.get("T", 10.0))
        rtol = float(diag.get("rtol", 1e-3))
        t_min = float(diag.get("t_min", 0.05))
        ref = richardson_refine(solve_stepping(cfg.measure, cfg.lam, 2 * h, T),
                                solve_stepping(cfg.measure, cfg.lam, h, T))
        sel = ref.t >= t_min * (1 - 1e-12)
        spec = solve_spectral(cfg.measure, cfg.lam, ref.t[sel], density=density)
        err = float(np.max(np.abs(ref.u[sel] / spec.u - 1)))
        return err <= rtol, {"max_rel_error": err, "rtol": rtol}
    raise ConfigError(f"unknown diagnostic {name!r}")


def cmd_diagnose(cfg, out):
    density = SpectralDensity(cfg.measure, cfg.lam) if cfg.diagnostics else None
    for diag in cfg.diagnostics:
        if not isinstance(diag, dict):
            raise ConfigError("each diagnostic must be an object")
        passed, metrics = run_diagnostic(cfg, diag, density)
        rec = {"name": diag.get("name"), "verdict": "pass" if passed else "fail",
               "metrics": _clean(metrics)}
        out.write(json.dumps(rec, sort_keys=True) + "\n")


KERNEL_WHAT = ("k", "kappa", "K", "spectral-components", "spectral-density")


def cmd_kernel(cfg, out, what=None):
    what = what or cfg.kernel.get("what")
    if what not in KERNEL_WHAT:
        raise ConfigError(f"kernel 'what' must be one of {KERNEL_WHAT}, got {what!r}")
    pts_spec = cfg.kernel.get("points", cfg.raw.get("grid"))
    if pts_spec is None:
        raise ConfigError("kernel needs 'points' (or a top-level 'grid')")
    pts = make_grid(pts_spec)
    acc = KernelAccessor(cfg.measure)
    if what in ("k", "K", "spectral-components", "spectral-density") and np.any(pts <= 0):
        raise ConfigError(f"{what} needs strictly positive points")
    if what == "k":
        write_csv(out, ["s", "k"], [pts, acc.k(pts)])
    elif what == "kappa":
        write_csv(out, ["x", "kappa"], [pts, acc.kappa(pts)])
    elif what == "K":
        direct = acc.laplace_symbol(pts)
        mgf = acc.laplace_symbol_mgf(pts)
        write_csv(out, ["p", "K", "K_mgf", "rel_diff"], [pts, direct, mgf, np.abs(direct / mgf - 1)])
    elif what == "spectral-components":
        a, b = acc.spectral_components(pts)
        write_csv(out, ["r", "A", "B"], [pts, a, b])
    else:
        write_csv(out, ["r", "phi"], [pts, SpectralDensity(cfg.measure, cfg.lam)(pts)])


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="distrelax",
                                     description="Distributed-order relaxation solver")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("eval", "diagnose", "kernel"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration ('-' for stdin)")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--print-config", action="store_true",
                       help="print the normalised configuration and exit")
        if name == "kernel":
            p.add_argument("--what", choices=KERNEL_WHAT)
    return parser


def _fail(code, exc, stderr):
    stderr.write(json.dumps({"error": getattr(exc, "code", type(exc).__name__),
                             "message": str(exc)}) + "\n")
    return code


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (DistRelaxError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (QuadratureFailure, NonMonotoneOutput)):
            return _fail(EXIT_NUMERIC, exc, stderr)
        return _fail(EXIT_CONFIG, exc, stderr)
    if args.print_config:
        stdout.write(json.dumps(cfg.normalized(), indent=2, sort_keys=True) + "\n")
        return 0
    buf = io.StringIO()
    try:
        if args.command == "eval":
            cmd_eval(cfg, buf)
        elif args.command == "diagnose":
            cmd_diagnose(cfg, buf)
        else:
            cmd_kernel(cfg, buf, args.what)
    except (QuadratureFailure, NonMonotoneOutput, FloatingPointError) as exc:
        return _fail(EXIT_NUMERIC, exc, stderr)
    except (DistRelaxError, DomainError, KeyError, TypeError, ValueError) as exc:
        return _fail(EXIT_CONFIG, exc, stderr)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(buf.getvalue())
    else:
        stdout.write(buf.getvalue())
    return 0


def main_entry():
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
