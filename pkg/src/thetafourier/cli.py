"""Batch command line: ``thetafourier run --config job.json --out-dir out``.

Exit codes: 0 success, 2 invalid config or input, 3 numeric failure (no
solution, failed check), 4 I/O error.  Every report embeds the resolved config
and the tolerances in force.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import fourier, odesolve, poincare, regularity, solver
from .core import GridSpec, SampledField, ThetaError, ThetaSpec
from .expressions import evaluate_terms, parse_complex, periodicity_defect, validate_terms
from .fourier import analyze, outer_shell_fraction, plancherel_check, synthesize
from .odesolve import OdeProblem, solve_var
from .poincare import poincare_case, poincare_verify
from .regularity import OperatorSpec, diagnose
from .serialize import (
    atomic_write,
    coeffs_from_csv,
    coeffs_to_csv,
    field_from_bytes,
    field_from_csv,
    field_to_csv,
    write_json,
)
from .sobolev import decay_classify, hs_norm
from .transform import k_constants, lp_norm, omega_forward, omega_inverse, plain_lp_norm
from .verify import run_suite

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("transform", "analyze", "synthesize", "poincare", "diagnose", "solve", "ode", "verify")
TOP_KEYS = {"command", "name", "theta", "T", "log_branch", "N", "cutoff", "input", "operator", "lambda", "options", "tolerances"}
OPTION_KEYS = {
    "diagnose": {"Xi", "k_grid", "C_floor", "depth", "k_max"},
    "analyze": {"sobolev_s"},
    "ode": {"form", "order"},
    "verify": {"trials"},
}
PERIODICITY_TOL = 1e-9

# tolerance name -> (module, attribute) pairs it controls
TOLERANCES = {
    "alias_tol": [(fourier, "ALIAS_TOL")],
    "critical_tol": [(poincare, "CRITICAL_TOL")],
    "symbol_zero": [(regularity, "ZERO_TOL"), (solver, "ZERO_TOL")],
    "imag_c": [(regularity, "IMAG_TOL")],
    "b_zero": [(regularity, "B_TOL")],
    "resonance": [(odesolve, "RESONANCE_TOL")],
    "compat_rtol": [(odesolve, "COMPAT_RTOL")],
    "dead_mode_data": [(solver, "DEAD_MODE_DATA_TOL")],
}


class ConfigError(Exception):
    pass


def current_tolerances() -> dict:
    out = {k: getattr(*pairs[0]) for k, pairs in TOLERANCES.items()}
    out["periodicity"] = PERIODICITY_TOL
    return out


@contextlib.contextmanager
def tolerance_overrides(overrides: dict):
    saved = []
    try:
        for key, val in overrides.items():
            for mod, attr in TOLERANCES[key]:
                saved.append((mod, attr, getattr(mod, attr)))
                setattr(mod, attr, float(val))
        yield
    finally:
        for mod, attr, val in reversed(saved):
            setattr(mod, attr, val)


# -- config -------------------------------------------------------------------------


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def load_config(path: Path) -> dict:
    text = path.read_text(encoding="utf-8")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    validate_config(cfg)
    return cfg


def validate_config(cfg) -> None:
    _require(isinstance(cfg, dict), "config must be a JSON object")
    extra = set(cfg) - TOP_KEYS
    _require(not extra, f"unknown config keys: {sorted(extra)}")
    cmd = cfg.get("command")
    _require(cmd in COMMANDS, f"command must be one of {list(COMMANDS)}, got {cmd!r}")
    if cmd != "verify":
        for key in ("theta", "T"):
            _require(key in cfg, f"'{key}' is required for {cmd}")
        _require(isinstance(cfg["theta"], list) and cfg["theta"], "theta must be a non-empty list")
    if "N" in cfg:
        N = cfg["N"]
        _require(_is_int(N) and N >= 4 and N & (N - 1) == 0, "N must be a power of two >= 4")
    if cfg.get("cutoff") is not None:
        _require(_is_int(cfg["cutoff"]) and cfg["cutoff"] >= 0, "cutoff must be a non-negative integer")
    opts = cfg.get("options", {})
    _require(isinstance(opts, dict), "options must be an object")
    bad = set(opts) - OPTION_KEYS.get(cmd, set())
    _require(not bad, f"unknown options for {cmd}: {sorted(bad)}")
    tols = cfg.get("tolerances", {})
    _require(isinstance(tols, dict), "tolerances must be an object")
    bad = set(tols) - set(TOLERANCES)
    _require(not bad, f"unknown tolerances: {sorted(bad)}; known: {sorted(TOLERANCES)}")
    for k, v in tols.items():
        _require(isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0, f"tolerance {k} must be positive")
    needs_input = {"transform", "analyze", "synthesize", "solve", "ode"}
    if cmd in needs_input:
        _require(isinstance(cfg.get("input"), dict), f"{cmd} needs an 'input' object")
    if cmd in ("diagnose", "solve"):
        _require(isinstance(cfg.get("operator"), dict), f"{cmd} needs an 'operator' object")
        extra = set(cfg["operator"]) - {"c", "q"}
        _require(not extra, f"unknown operator keys: {sorted(extra)}")
    if cmd == "ode":
        _require("lambda" in cfg, "ode needs 'lambda'")


def theta_spec(cfg: dict) -> ThetaSpec:
    return ThetaSpec.from_json({k: cfg[k] for k in ("theta", "T", "log_branch") if k in cfg})


def _resolve(base: Path, p) -> Path:
    _require(isinstance(p, str), "paths must be strings")
    path = Path(p)
    return path if path.is_absolute() else base / path


def load_field(cfg: dict, spec: ThetaSpec, base: Path) -> SampledField:
    inp = cfg["input"]
    keys = set(inp)
    _require(len(keys) == 1 and keys <= {"csv", "binary", "expr"}, "input must have exactly one of csv, binary, expr")
    if "csv" in inp:
        return field_from_csv(_resolve(base, inp["csv"]).read_text(encoding="utf-8"), spec)
    if "binary" in inp:
        f = field_from_bytes(_resolve(base, inp["binary"]).read_bytes())
        _require(f.theta_spec == spec, "binary field header disagrees with the config theta spec")
        return f
    terms = inp["expr"]
    validate_terms(terms, spec.n)
    defect = periodicity_defect(terms, spec)
    _require(defect <= PERIODICITY_TOL, f"input expression is not (theta, T)-periodic (defect {defect:.2e})")
    _require("N" in cfg, "expression input needs N")
    grid = GridSpec(spec.n, cfg["N"])
    return SampledField(grid, evaluate_terms(terms, grid.mesh(spec.T), spec), spec)


def load_coefficient(v, cfg: dict, spec: ThetaSpec, what: str, allow_field: bool = False):
    """A constant, or ``{"expr": terms[, "field": true]}`` sampled on the job grid."""
    if isinstance(v, dict):
        extra = set(v) - {"expr", "field"}
        _require(not extra and "expr" in v, f"{what}: expected {{'expr': [...]}}")
        field = bool(v.get("field", False))
        _require(allow_field or not field, f"{what} cannot depend on both variables")
        _require("N" in cfg, f"{what} given as an expression needs N")
        n = 2 if field else 1
        validate_terms(v["expr"], n)
        per = ThetaSpec.periodic(n, spec.T)
        defect = periodicity_defect(v["expr"], per)
        _require(defect <= PERIODICITY_TOL, f"{what} is not T-periodic (defect {defect:.2e})")
        grid = GridSpec(n, cfg["N"])
        return evaluate_terms(v["expr"], grid.mesh(spec.T), per)
    return parse_complex(v, what)


# -- commands -----------------------------------------------------------------------


def _norms(f: SampledField) -> dict:
    return {
        "weighted_l1": lp_norm(f, 1),
        "weighted_l2": lp_norm(f, 2),
        "weighted_linf": lp_norm(f, math.inf),
        "plain_l1": plain_lp_norm(f, 1),
        "plain_l2": plain_lp_norm(f, 2),
        "plain_linf": plain_lp_norm(f, math.inf),
    }


def cmd_transform(cfg, spec, base, out, name, seed):
    f = load_field(cfg, spec, base)
    g = omega_forward(f)
    back = omega_inverse(g, spec)
    K = k_constants(spec)
    atomic_write(out / f"{name}_omega.csv", field_to_csv(g))
    return {
        "norms": _norms(f),
        "k_min": K.k_min,
        "k_max": K.k_max,
        "round_trip_error": float(np.max(np.abs(back.values - f.values))),
        "outputs": [f"{name}_omega.csv"],
    }, True


def cmd_analyze(cfg, spec, base, out, name, seed):
    f = load_field(cfg, spec, base)
    table = analyze(f, cfg.get("cutoff"), warn=False)
    atomic_write(out / f"{name}_coeffs.csv", coeffs_to_csv(table))
    pl = plancherel_check(f)
    res = {
        "cutoff": table.cutoff,
        "outer_shell_fraction": outer_shell_fraction(table),
        "plancherel": {
            "coeff_l2": pl.coeff_l2,
            "weighted_l2": pl.weighted_l2,
            "plain_l2": pl.plain_l2,
            "identity_error": pl.identity_error,
            "sandwich_holds": pl.sandwich_holds,
        },
        "outputs": [f"{name}_coeffs.csv"],
    }
    s = cfg.get("options", {}).get("sobolev_s")
    if s is not None:
        res["hs_norm"] = hs_norm(table, float(s))
    if table.cutoff >= 8:
        d = decay_classify(table)
        res["decay"] = {"fitted_order": d.fitted_order, "is_rapid": d.is_rapid, "caveat": d.asymptotic_caveat}
    return res, True


def cmd_synthesize(cfg, spec, base, out, name, seed):
    inp = cfg["input"]
    _require(set(inp) == {"coeffs_csv"}, "synthesize input must be {'coeffs_csv': path}")
    _require("N" in cfg, "synthesize needs N")
    table = coeffs_from_csv(_resolve(base, inp["coeffs_csv"]).read_text(encoding="utf-8"), spec)
    f = synthesize(table, GridSpec(spec.n, cfg["N"]))
    atomic_write(out / f"{name}_field.csv", field_to_csv(f))
    return {"cutoff": table.cutoff, "norms": _norms(f), "outputs": [f"{name}_field.csv"]}, True


def cmd_poincare(cfg, spec, base, out, name, seed):
    case = poincare_case(spec)
    res = {
        "constant": case.constant,
        "distance": case.distance,
        "critical_mode": None if case.critical_mode is None else list(case.critical_mode),
        "nearest_mode": list(case.nearest),
        "shift": [complex(z) for z in case.shift],
        "near_critical": case.near_critical,
    }
    ok = True
    if "input" in cfg:
        rep = poincare_verify(load_field(cfg, spec, base), cfg.get("cutoff"))
        res["check"] = rep.to_json()
        ok = rep.holds
    return res, ok


def _operator(cfg, spec) -> OperatorSpec:
    o = cfg["operator"]
    c = load_coefficient(o.get("c", 0.0), cfg, spec, "operator.c")
    q = load_coefficient(o.get("q", 0.0), cfg, spec, "operator.q", allow_field=True)
    return OperatorSpec(spec, c, q)


def cmd_diagnose(cfg, spec, base, out, name, seed):
    _require(spec.n == 2, "diagnose needs a two-component theta")
    op = _operator(cfg, spec)
    opts = cfg.get("options", {})
    kw = {}
    if "Xi" in opts:
        _require(_is_int(opts["Xi"]) and opts["Xi"] >= 2, "Xi must be an integer >= 2")
        kw["Xi"] = opts["Xi"]
    if "k_grid" in opts:
        _require(isinstance(opts["k_grid"], list) and opts["k_grid"], "k_grid must be a non-empty list")
        kw["k_grid"] = [float(k) for k in opts["k_grid"]]
    for key in ("C_floor", "k_max"):
        if key in opts:
            kw[key] = float(opts[key])
    if "depth" in opts:
        _require(_is_int(opts["depth"]) and opts["depth"] >= 5, "depth must be an integer >= 5")
        kw["depth"] = opts["depth"]
    verdict = diagnose(op, **kw)
    return {"verdict": verdict.to_json()}, True


def cmd_solve(cfg, spec, base, out, name, seed):
    _require(spec.n == 2, "solve needs a two-component theta")
    op = _operator(cfg, spec)
    f = load_field(cfg, spec, base)
    rep = solver.solve(op, f, cfg.get("cutoff"))
    atomic_write(out / f"{name}_solution.csv", field_to_csv(rep.u))
    res = rep.to_json()
    res["outputs"] = [f"{name}_solution.csv"]
    return res, rep.ok


def cmd_ode(cfg, spec, base, out, name, seed):
    _require(spec.n == 1, "ode needs a one-component theta")
    f = load_field(cfg, spec, base)
    lam = load_coefficient(cfg["lambda"], cfg, spec, "lambda")
    opts = cfg.get("options", {})
    form = opts.get("form")
    _require(form in (None, "minus", "plus"), "form must be 'minus' or 'plus'")
    order = opts.get("order")
    _require(order is None or (_is_int(order) and order >= 8), "order must be an integer >= 8")
    sol = solve_var(OdeProblem(lam, f), form=form, order=order)
    res = {
        "kind": sol.kind,
        "residual": sol.residual,
        "gap": sol.gap,
        "form": sol.form,
        "compatibility": sol.compatibility,
        "outputs": [],
    }
    if sol.u is not None:
        atomic_write(out / f"{name}_solution.csv", field_to_csv(sol.u))
        res["outputs"].append(f"{name}_solution.csv")
    if sol.homogeneous is not None and sol.kind == "family":
        atomic_write(out / f"{name}_homogeneous.csv", field_to_csv(sol.homogeneous))
        res["outputs"].append(f"{name}_homogeneous.csv")
    return res, sol.kind != "none"


def cmd_verify(cfg, spec, base, out, name, seed):
    trials = cfg.get("options", {}).get("trials", 10)
    _require(_is_int(trials) and trials >= 1, "trials must be a positive integer")
    N = cfg.get("N", 64)
    checks = run_suite(seed, trials, N)
    return {"checks": [c.to_json() for c in checks], "all_passed": all(c.passed for c in checks)}, all(c.passed for c in checks)


HANDLERS = {
    "transform": cmd_transform,
    "analyze": cmd_analyze,
    "synthesize": cmd_synthesize,
    "poincare": cmd_poincare,
    "diagnose": cmd_diagnose,
    "solve": cmd_solve,
    "ode": cmd_ode,
    "verify": cmd_verify,
}


def run(config_path, out_dir, seed: int = 0, threads: int = 1) -> int:
    """Run one job; returns the exit code and writes ``<name>_report.json``."""
    config_path = Path(config_path)
    out = Path(out_dir)
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    name = cfg.get("name", cfg["command"])
    if not isinstance(name, str) or not name or "/" in name or name.startswith("."):
        print("error: name must be a plain file stem", file=sys.stderr)
        return EXIT_INVALID
    base = config_path.resolve().parent
    tols = cfg.get("tolerances", {})
    try:
        with tolerance_overrides(tols):
            spec = theta_spec(cfg) if cfg["command"] != "verify" else None
            resolved_tols = current_tolerances()
            result, ok = HANDLERS[cfg["command"]](cfg, spec, base, out, name, seed)
    except (ConfigError, ThetaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = {
        "command": cfg["command"],
        "config": cfg,
        "run": {"seed": seed, "threads": threads},
        "tolerances": resolved_tols,
        "status": "ok" if ok else "failed",
        "result": result,
    }
    try:
        write_json(out / f"{name}_report.json", report)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    if not ok:
        print(f"error: {cfg['command']} reported a numeric failure; see {name}_report.json", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetafourier", description="Fourier analysis and regularity tools for (theta, T)-periodic functions.")
    sub = p.add_subparsers(dest="action", required=True)
    r = sub.add_parser("run", help="run one job described by a JSON config")
    r.add_argument("--config", required=True, help="path to the JSON job config")
    r.add_argument("--out-dir", default="out", help="directory for reports and tables")
    r.add_argument("--threads", type=int, default=1, help="recorded in the report; computations are single-threaded")
    r.add_argument("--seed", type=int, default=0, help="seed for randomized verify suites")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    return run(args.config, args.out_dir, seed=args.seed, threads=args.threads)


if __name__ == "__main__":
    sys.exit(main())
