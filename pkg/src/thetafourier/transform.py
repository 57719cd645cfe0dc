"""The conjugation to 2pi-periodic functions, weighted L^p norms and K constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, GridSpec, SampledField, ThetaError, ThetaSpec


@dataclass(frozen=True)
class KConstants:
    k_min: float
    k_max: float


def k_constants(spec: ThetaSpec) -> KConstants:
    """Products of ``|theta_j|`` over components below / above modulus one."""
    mods = [abs(t) for t in spec.theta]
    k_min = math.prod(m for m in mods if m < 1)
    k_max = math.prod(m for m in mods if m > 1)
    return KConstants(float(k_min), float(k_max))


def _log_weight(spec: ThetaSpec, grid: GridSpec) -> np.ndarray:
    # node m of [0,T)^n maps to y = 2 pi m / N; Omega weight is exp(-y.log(theta)/2pi) = exp(-m.log(theta)/N)
    m = np.meshgrid(*([np.arange(grid.N)] * grid.n), indexing="ij")
    return -sum(m[j] * spec.log[j] for j in range(grid.n)) / grid.N


def omega_forward(f: SampledField) -> SampledField:
    """Samples of the 2pi-periodic conjugate ``e^{-y.log(theta)/2pi} f(T y / 2pi)``."""
    w = np.exp(_log_weight(f.theta_spec, f.grid))
    return SampledField(f.grid, f.values * w, ThetaSpec.periodic(f.n))


def omega_inverse(g: SampledField, spec: ThetaSpec) -> SampledField:
    """Inverse conjugation: a 2pi-periodic field back to a (theta, T)-periodic one."""
    if spec.n != g.n:
        raise ThetaError("dimension mismatch between field and theta spec")
    w = np.exp(-_log_weight(spec, g.grid))
    return SampledField(g.grid, g.values * w, spec)


def abs_weight(f: SampledField) -> np.ndarray:
    """``prod_j |theta_j|^{-x_j/T}`` at every node."""
    m = np.meshgrid(*([np.arange(f.N)] * f.n), indexing="ij")
    la = f.theta_spec.log_abs
    return np.exp(-sum(m[j] * la[j] for j in range(f.n)) / f.N)


def _check_p(p: float) -> float:
    p = float(p)
    if not (p >= 1 or math.isinf(p)) or math.isnan(p):
        raise ValueError(f"p must lie in [1, inf], got {p}")
    return p


def _mean_power(a: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(a)) if a.size else 0.0
    scale = float(np.max(a)) if a.size else 0.0
    if scale == 0.0:
        return 0.0
    # numpy sum is pairwise; scaling keeps |f|^p inside range for large p
    return scale * float(np.mean((a / scale) ** p)) ** (1.0 / p)


def lp_norm(f: SampledField, p: float = 2.0) -> float:
    """Weighted ``L^p_{theta,T}`` norm, equal to the normalized L^p norm of the conjugate.

    The trapezoid rule on the uniform grid is used for ``p < inf`` and the
    weighted maximum over nodes for ``p = inf``.
    """
    p = _check_p(p)
    return _mean_power(np.abs(f.values) * abs_weight(f), p)


def _exp_weights(N: int, beta: float) -> np.ndarray:
    """Quadrature weights turning FFT coefficients of P into (1/2pi) int_0^{2pi} P(y) e^{beta y} dy."""
    k = np.fft.fftfreq(N, 1.0 / N)
    if beta == 0.0:
        w = (k == 0).astype(complex)
    else:
        w = np.expm1(TWO_PI * beta) / (TWO_PI * (1j * k + beta))
        nyq = N // 2
        # Nyquist sample represents cos(N/2 y): average the +/- weights
        w[nyq] = 0.5 * (w[nyq] + np.expm1(TWO_PI * beta) / (TWO_PI * (-1j * k[nyq] + beta)))
    return w


def plain_lp_norm(f: SampledField, p: float = 2.0) -> float:
    """Unweighted normalized ``L^p([0,T]^n)`` norm.

    ``|f|^p`` is a periodic factor times ``prod_j |theta_j|^{p x_j / T}``; the
    periodic factor is expanded by FFT and integrated against the exponential in
    closed form, which is exact for band-limited integrands.
    """
    p = _check_p(p)
    if math.isinf(p):
        return _mean_power(np.abs(f.values), p)
    a = np.abs(f.values) * abs_weight(f)
    scale = float(np.max(a)) if a.size else 0.0
    if scale == 0.0:
        return 0.0
    coef = np.fft.fftn((a / scale) ** p) / a.size
    for la in f.theta_spec.log_abs:
        # contracting axis 0 each time walks through the axes in order
        coef = np.tensordot(coef, _exp_weights(f.N, p * la / TWO_PI), axes=([0], [0]))
    total = float(np.real(coef))
    return scale * max(total, 0.0) ** (1.0 / p)


def sample_periodic(func, N: int, n: int = 1) -> SampledField:
    """Convenience: sample a 2pi-periodic function on the standard grid."""
    return SampledField.from_function(func, ThetaSpec.periodic(n, TWO_PI), N)
