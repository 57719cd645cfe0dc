"""Spectral solver for ``L u = d1 u + c(x1) d2 u + q u = f`` on (theta, T)-periodic fields in 2D."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import TWO_PI, SampledField, ThetaError, ThetaSpec
from .fourier import analyze, derivative_coeffs, synthesize
from .odesolve import solve_mode_ode
from .regularity import ZERO_TOL, OperatorSpec, symbol_grid, tilde_params
from .transform import omega_forward, omega_inverse

#: Data below this size on a dead mode is treated as zero rather than unsolvable.
DEAD_MODE_DATA_TOL = 1e-12


@dataclass
class SolveReport:
    status: str  # "solved", "partial" or "none"
    u: SampledField
    residual: float
    residual_projected: float
    skipped_modes: list = field(default_factory=list)
    unsolvable_modes: list = field(default_factory=list)
    condition: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "solved"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "residual": self.residual,
            "residual_projected": self.residual_projected,
            "skipped_modes": self.skipped_modes,
            "unsolvable_modes": self.unsolvable_modes,
            "condition": self.condition,
        }


def _d(u: SampledField, j: int) -> np.ndarray:
    return synthesize(derivative_coeffs(analyze(u, warn=False), j), u.grid).values


def _along_axis0(trace, N: int):
    """Broadcast a coefficient over the (x1, x2) grid; traces vary with x1."""
    if np.ndim(trace) == 1:
        if len(trace) != N:
            raise ThetaError(f"coefficient trace has {len(trace)} samples, field has {N}")
        return np.asarray(trace)[:, None]
    return trace


def apply_L(op: OperatorSpec, u: SampledField) -> SampledField:
    """``d1 u + c d2 u + q u`` at the nodes, derivatives taken spectrally."""
    if u.theta_spec != op.theta_spec:
        raise ThetaError("field and operator carry different theta specs")
    c = _along_axis0(op.c, u.N)
    q = _along_axis0(op.q, u.N)
    return u.with_values(_d(u, 0) + c * _d(u, 1) + q * u.values)


def apply_L_tilde(op: OperatorSpec, g: SampledField) -> SampledField:
    """The conjugated operator ``d1 + c d2 + z`` on 2pi-periodic samples."""
    tp = tilde_params(op)
    c = _along_axis0(tp.c_eff, g.N)
    z = _along_axis0(tp.zero_order, g.N)
    return g.with_values(_d(g, 0) + c * _d(g, 1) + z * g.values)


def _finish(op, f, u_vals, skipped, unsolvable, dead_mask_fn, condition) -> SolveReport:
    u = SampledField(f.grid, u_vals, op.theta_spec)
    Lu = apply_L(op, u).values
    resid = float(np.max(np.abs(Lu - f.values)))
    f_proj = dead_mask_fn()
    resid_proj = float(np.max(np.abs(Lu - f_proj)))
    if unsolvable and not np.any(np.abs(u_vals) > 0):
        status = "none"
    elif unsolvable:
        status = "partial"
    else:
        status = "solved"
    return SolveReport(status, u, resid, resid_proj, skipped, unsolvable, condition)


def solve_constant_L(op: OperatorSpec, f: SampledField, Xi: int | None = None) -> SolveReport:
    """Divide coefficients by ``i (2pi/T) sigma(xi)`` on every live mode."""
    if not op.is_constant:
        raise ValueError("solve_constant_L needs constant coefficients")
    if f.theta_spec != op.theta_spec:
        raise ThetaError("field and operator carry different theta specs")
    table = analyze(f, Xi)
    K = table.cutoff
    sigma, x1, x2 = symbol_grid(op.theta_spec, op.c, op.q, K)
    mult = 1j * (TWO_PI / op.T) * sigma
    dead = np.abs(sigma) < ZERO_TOL * (1.0 + np.hypot(x1, x2))
    fh = table.values
    skipped, unsolvable = [], []
    for a, b in zip(*np.nonzero(dead)):
        xi = [int(a) - K, int(b) - K]
        (skipped if abs(fh[a, b]) < DEAD_MODE_DATA_TOL else unsolvable).append(xi)
    uh = np.where(dead, 0, fh / np.where(dead, 1, mult))
    live = np.abs(mult[~dead])
    condition = float(1.0 / live.min()) if live.size else math.inf

    def projected():
        return synthesize(table.with_values(np.where(dead, 0, fh)), f.grid).values

    u_vals = synthesize(table.with_values(uh), f.grid).values
    return _finish(op, f, u_vals, skipped, unsolvable, projected, condition)


def solve_variable_L(op: OperatorSpec, f: SampledField, Xi: int | None = None, order: int | None = None) -> SolveReport:
    """Partial Fourier transform in ``x2`` and one periodic ODE in ``t`` per mode.

    Works on the conjugated problem ``L~ u~ = (T/2pi) Omega f`` where all
    fields are 2pi-periodic; ``u = Omega^{-1} u~``.
    """
    if np.ndim(op.q) == 2:
        raise ThetaError("the variable solver needs q = q(t); q depending on both variables is not supported")
    if f.theta_spec != op.theta_spec:
        raise ThetaError("field and operator carry different theta specs")
    N = f.N
    Xi = f.grid.nyquist_cutoff if Xi is None else Xi
    if not 0 <= Xi <= f.grid.nyquist_cutoff:
        raise ValueError(f"cutoff {Xi} outside [0, {f.grid.nyquist_cutoff}]")
    tp = tilde_params(op)
    c = np.broadcast_to(np.asarray(tp.c_eff, dtype=complex), (N,))
    z = np.broadcast_to(np.asarray(tp.zero_order, dtype=complex), (N,))
    g = (op.T / TWO_PI) * omega_forward(f).values
    G = np.fft.fft(g, axis=1) / N
    U = np.zeros_like(G)
    skipped, unsolvable, worst_gap = [], [], math.inf
    for xi2 in range(-Xi, Xi + 1):
        col = xi2 % N
        sol = solve_mode_ode(xi2, c, z, G[:, col], order=order)
        worst_gap = min(worst_gap, sol.gap)
        if sol.kind == "none":
            unsolvable.append([None, xi2])
            continue
        if sol.kind == "family":
            skipped.append([None, xi2])
        U[:, col] = sol.u.values
    u_vals = omega_inverse(SampledField(f.grid, np.fft.ifft(U, axis=1) * N, ThetaSpec.periodic(2)), op.theta_spec).values
    dead_cols = [m[1] % N for m in unsolvable]

    def projected():
        Gp = G.copy()
        Gp[:, dead_cols] = 0
        gp = SampledField(f.grid, np.fft.ifft(Gp, axis=1) * N * (TWO_PI / op.T), ThetaSpec.periodic(2))
        return omega_inverse(gp, op.theta_spec).values

    return _finish(op, f, u_vals, skipped, unsolvable, projected, 1.0 / worst_gap if worst_gap > 0 else math.inf)


def solve(op: OperatorSpec, f: SampledField, Xi: int | None = None) -> SolveReport:
    return solve_constant_L(op, f, Xi) if op.is_constant else solve_variable_L(op, f, Xi)


