"""A seeded invariant suite, run by the ``verify`` command."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CoeffTable, GridSpec, SampledField, ThetaSpec, extend_field, shift_log_branch
from .fourier import analyze, band_limited_table, plancherel_check, synthesize, translate
from .odesolve import OdeProblem, solve_const
from .poincare import poincare_case, poincare_verify, sharp_mode
from .regularity import OperatorSpec, diagnose_constant
from .solver import apply_L, solve
from .transform import lp_norm, omega_forward, omega_inverse


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value, "tolerance": self.tolerance}


def _random_spec(rng: np.random.Generator, n: int) -> ThetaSpec:
    mods = [1 / 3, 1.0, math.e, 2.0]
    theta = tuple(rng.choice(mods) * np.exp(1j * rng.uniform(-math.pi, math.pi)) for _ in range(n))
    return ThetaSpec(theta, float(rng.uniform(0.5, 7.0)))


def run_suite(seed: int = 0, trials: int = 10, N: int = 64) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks: list[Check] = []

    def add(name, value, tol, ok=None):
        checks.append(Check(name, bool(value <= tol) if ok is None else bool(ok), float(value), float(tol)))

    omega_err = iso_err = planch_err = ext_err = trans_err = 0.0
    for i in range(trials):
        n = 1 + i % 2
        spec = _random_spec(rng, n)
        f = synthesize(band_limited_table(rng, spec, N // 4), GridSpec(n, N))
        back = omega_inverse(omega_forward(f), spec)
        scale = float(np.max(np.abs(f.values)))
        omega_err = max(omega_err, float(np.max(np.abs(back.values - f.values))) / scale)
        w = lp_norm(f, 2)
        iso_err = max(iso_err, abs(w - lp_norm(omega_forward(f), 2)) / w)
        planch_err = max(planch_err, plancherel_check(f).identity_error / w)
        x = rng.uniform(-2 * spec.T, 2 * spec.T, size=(5, n))
        shifted = extend_field(f, x + spec.T * np.eye(n)[0])
        ext_err = max(ext_err, float(np.max(np.abs(shifted - spec.theta[0] * extend_field(f, x)))) / scale)
        table = analyze(f, warn=False)
        moved = translate(table, np.eye(n)[0] * spec.T)
        trans_err = max(trans_err, float(np.max(np.abs(moved.values - spec.theta[0] * table.values))) / scale)
    add("omega_round_trip", omega_err, 1e-12)
    add("omega_isometry", iso_err, 1e-12)
    add("plancherel_identity", planch_err, 1e-9)
    add("extension_quasi_periodic", ext_err, 1e-10)
    add("translation_by_period", trans_err, 1e-10)

    worst, violations = 0.0, 0
    for theta in (1.0, -1.0, 1j, 2.0, 2 * np.exp(1j * math.pi / 3)):
        for T in (1.0, 2 * math.pi):
            spec = ThetaSpec((theta,), T)
            xi = sharp_mode(poincare_case(spec))
            table = CoeffTable.from_entries({xi: 1.0}, spec, max(4, abs(xi[0]) + 1))
            worst = max(worst, abs(poincare_verify(table).ratio - 1.0))
            for _ in range(trials):
                violations += not poincare_verify(band_limited_table(rng, spec, 6)).holds
    add("poincare_sharp_mode", worst, 1e-9)
    add("poincare_random_violations", violations, 0)

    spec = ThetaSpec((2.0,), 1.0)
    f = SampledField.from_function(lambda x: 2.0 ** x, spec, N)
    sol = solve_const(OdeProblem(0.0, f))
    add("ode_closed_form", float(np.max(np.abs(sol.u.values - f.values / math.log(2)))), 1e-8)

    s2 = ThetaSpec((1.0, 1.0), 2 * math.pi)
    golden = (1 + math.sqrt(5)) / 2
    agree = 0
    for c, want in ((1j, "yes"), (0.0, "no"), (golden, "yes")):
        v0 = diagnose_constant(OperatorSpec(s2, c, 0.0))
        v1 = diagnose_constant(OperatorSpec(shift_log_branch(s2, 1), c, 0.0), Xi=65)
        agree += v0.gh == want and v0.key() == v1.key()
    add("regularity_verdicts", 3 - agree, 0)

    err = 0.0
    for _ in range(trials):
        spec = ThetaSpec(tuple(_random_spec(rng, 2).theta), float(rng.uniform(0.5, 7.0)))
        op = OperatorSpec(spec, complex(rng.uniform(-1, 1), rng.choice([-1, 1]) * rng.uniform(0.5, 2)), complex(*rng.uniform(-1, 1, 2)))
        u = synthesize(band_limited_table(rng, spec, 6), GridSpec(2, 32))
        rep = solve(op, apply_L(op, u))
        err = max(err, float(np.max(np.abs(rep.u.values - u.values))) / float(np.max(np.abs(u.values))))
    add("manufactured_solution", err, 1e-6)
    return checks
