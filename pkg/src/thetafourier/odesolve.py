"""(theta, T)-periodic solutions of ``u' + lambda u = f`` with constant or periodic ``lambda``.

Write ``Lam(x) = int_0^x lambda = lambda0 x + P(x)`` with ``P`` periodic.  Away from
resonance (``theta e^{T lambda0} != 1``) the solution is given by either of

    u(x) = (1 - theta^{-1} e^{-T lambda0})^{-1} int_0^T e^{-(Lam(x) - Lam(x-s))} f(x-s) ds
    u(x) = (theta e^{T lambda0} - 1)^{-1}       int_0^T e^{Lam(x+s) - Lam(x)} f(x+s) ds

and at resonance the periodic solutions form a one-parameter family, which
exists only when ``int_0^T e^{Lam} f`` vanishes.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .core import TWO_PI, GridSpec, SampledField, ThetaError, ThetaSpec
from .fourier import analyze, derivative_coeffs, synthesize

RESONANCE_TOL = 1e-10
ILL_CONDITIONED = 1e-6
COMPAT_RTOL = 1e-9
LAMBDA0_TOL = 1e-12

Lambda = Union[complex, np.ndarray]


class IllConditionedWarning(UserWarning):
    """Nearly resonant problem: the closed-form prefactor amplifies errors by 1/gap."""


@dataclass(frozen=True)
class OdeProblem:
    """``u' + lam u = f`` for (theta, T)-periodic ``u``; theta and T come from ``f``.

    ``lam`` is a complex constant or samples of a T-periodic ``lambda(x)`` on
    the same grid as ``f``.
    """

    lam: Lambda
    f: SampledField
    lambda0: complex | None = None

    def __post_init__(self) -> None:
        if self.f.n != 1:
            raise ThetaError("the ODE solver works in one variable")
        if np.ndim(self.lam):
            lam = np.asarray(self.lam, dtype=complex)
            if lam.shape != (self.f.N,):
                raise ThetaError(f"lambda trace must have {self.f.N} samples")
            mean = complex(np.mean(lam))
            if self.lambda0 is not None and abs(complex(self.lambda0) - mean) > LAMBDA0_TOL * (1 + abs(mean)):
                raise ThetaError(f"stored lambda0 {self.lambda0} disagrees with trace mean {mean}")
            object.__setattr__(self, "lam", lam)
            object.__setattr__(self, "lambda0", mean)
        else:
            lam = complex(self.lam)
            object.__setattr__(self, "lam", lam)
            object.__setattr__(self, "lambda0", lam)

    @property
    def theta(self) -> complex:
        return self.f.theta_spec.theta[0]

    @property
    def T(self) -> float:
        return self.f.T

    @property
    def variable(self) -> bool:
        return np.ndim(self.lam) == 1


@dataclass(frozen=True)
class OdeSolution:
    kind: str  # "unique", "family" or "none"
    u: SampledField | None
    residual: float
    compatibility: complex | None = None
    homogeneous: SampledField | None = None
    gap: float = 0.0
    form: str = ""

    def member(self, c: complex) -> SampledField:
        """The family member ``u_0 + c e^{-Lam}`` (or ``u`` itself when unique)."""
        if self.kind != "family":
            if self.u is None:
                raise ValueError("problem has no periodic solution")
            return self.u
        return self.u.with_values(self.u.values + c * self.homogeneous.values)


@dataclass(frozen=True)
class Resonance:
    gap: float
    resonant: bool


def resonance_test(lam0: complex, theta: complex, T: float) -> Resonance:
    """``gap = |1 - theta^{-1} e^{-T lambda0}|``; resonant when below ``RESONANCE_TOL``."""
    gap = abs(1 - cmath.exp(-T * complex(lam0)) / complex(theta))
    return Resonance(gap, gap < RESONANCE_TOL)


def _spectral_antiderivative(trace: np.ndarray, period: float) -> np.ndarray:
    """Periodic antiderivative (zero at x=0) of a zero-mean periodic trace."""
    N = trace.shape[0]
    coef = np.fft.fft(trace) / N
    k = np.fft.fftfreq(N, 1.0 / N)
    anti = np.zeros_like(coef)
    nz = k != 0
    anti[nz] = coef[nz] / (1j * k[nz] * (TWO_PI / period))
    anti[N // 2] = 0
    out = np.fft.ifft(anti) * N
    return out - out[0]


def _shifted(values: np.ndarray, shifts: np.ndarray, period: float) -> np.ndarray:
    """Trig interpolant of periodic samples at ``x_j - s_m``; result has shape (M, N)."""
    N = values.shape[0]
    coef = np.fft.fft(values) / N
    k = np.fft.fftfreq(N, 1.0 / N)
    arg = np.outer(shifts, k) * (TWO_PI / period)
    phase = np.exp(-1j * arg)
    # Nyquist mode is cos(N y / 2); at grid nodes its shift keeps only the cosine part
    phase[:, N // 2] = np.cos(arg[:, N // 2])
    return np.fft.ifft(coef[None, :] * phase, axis=1) * N


@lru_cache(maxsize=32)
def _gauss(M: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(M)


class _Prepared:
    """Shared pieces: ``Lam = lambda0 x + P``, the periodic part of ``f`` and the grid."""

    def __init__(self, p: OdeProblem):
        spec = p.f.theta_spec
        self.T = p.T
        self.N = p.f.N
        self.x = p.f.grid.nodes(p.T)
        self.lam0 = p.lambda0
        self.beta = spec.log[0] / p.T
        # f(x) = e^{beta x} F(x) with F periodic
        self.F = p.f.values * np.exp(-self.beta * self.x)
        if p.variable:
            self.P = _spectral_antiderivative(p.lam - p.lambda0, p.T)
        else:
            self.P = np.zeros(self.N, dtype=complex)
        self.Lam = self.lam0 * self.x + self.P


def _convolution(prep: _Prepared, form: str, M: int) -> np.ndarray:
    t, w = _gauss(M)
    s = 0.5 * prep.T * (t + 1.0)
    w = 0.5 * prep.T * w
    sign = 1.0 if form == "minus" else -1.0
    # values at x - sign*s
    F = _shifted(prep.F, sign * s, prep.T)
    P = _shifted(prep.P, sign * s, prep.T)
    xs = prep.x[None, :] - sign * s[:, None]
    if form == "minus":
        expo = -(prep.lam0 * s[:, None] + prep.P[None, :] - P) + prep.beta * xs
    else:
        expo = (prep.lam0 * s[:, None] + P - prep.P[None, :]) + prep.beta * xs
    return np.einsum("m,mn->n", w, np.exp(expo) * F)


def residual(u: SampledField, lam: Lambda, f: SampledField) -> float:
    """``max |u' + lam u - f|`` at the nodes, with ``u'`` by spectral differentiation."""
    du = synthesize(derivative_coeffs(analyze(u, warn=False)), u.grid).values
    return float(np.max(np.abs(du + np.asarray(lam) * u.values - f.values)))


def default_order(N: int) -> int:
    return N + 32


def _solve(p: OdeProblem, form: str | None, M: int | None) -> OdeSolution:
    spec = p.f.theta_spec
    prep = _Prepared(p)
    res = resonance_test(p.lambda0, p.theta, p.T)
    if res.resonant:
        return _solve_resonant(p, prep, res.gap)
    if res.gap < ILL_CONDITIONED:
        warnings.warn(f"nearly resonant problem, gap {res.gap:.3e}", IllConditionedWarning, stacklevel=3)
    if form is None:
        form = "minus" if p.lambda0.real >= 0 else "plus"
    if form not in ("minus", "plus"):
        raise ValueError(f"form must be 'minus' or 'plus', got {form!r}")
    e = cmath.exp(p.T * p.lambda0) * p.theta
    pref = 1.0 / (1.0 - 1.0 / e) if form == "minus" else 1.0 / (e - 1.0)
    vals = pref * _convolution(prep, form, M or default_order(p.f.N))
    u = SampledField(p.f.grid, vals, spec)
    return OdeSolution("unique", u, residual(u, p.lam, p.f), gap=res.gap, form=form)


def _solve_resonant(p: OdeProblem, prep: _Prepared, gap: float) -> OdeSolution:
    # at resonance e^{Lam} f = e^{(lambda0 + beta) x} e^{P} F is periodic
    # up to the lattice frequency m: lambda0 + beta = 2 pi i m / T
    m = round(((prep.lam0 + prep.beta) * p.T / (2j * math.pi)).real)
    osc = np.exp(2j * math.pi * m * prep.x / p.T)
    g = np.exp(prep.P) * prep.F * osc
    compat = complex(p.T * np.mean(g))
    scale = float(np.max(np.abs(g)))
    homog = SampledField(p.f.grid, np.exp(-prep.Lam), p.f.theta_spec)
    if abs(compat) > COMPAT_RTOL * p.T * max(scale, 1e-300):
        return OdeSolution("none", None, math.inf, compat, homog, gap, "resonant")
    G = _spectral_antiderivative(g - np.mean(g), p.T)
    u0 = SampledField(p.f.grid, np.exp(-prep.Lam) * G, p.f.theta_spec)
    return OdeSolution("family", u0, residual(u0, p.lam, p.f), compat, homog, gap, "resonant")


def solve_const(p: OdeProblem, form: str | None = None, order: int | None = None) -> OdeSolution:
    """Closed-form solution for constant ``lambda``.

    ``form`` picks the minus- or plus-form formula (default: the one whose
    kernel decays); ``order`` is the number of Gauss-Legendre nodes in ``s``.
    """
    if p.variable:
        raise ValueError("solve_const needs a constant lambda")
    return _solve(p, form, order)


def solve_var(p: OdeProblem, form: str | None = None, order: int | None = None) -> OdeSolution:
    """Closed-form solution for a periodic trace ``lambda(x)`` (constants also accepted)."""
    return _solve(p, form, order)


def solve_spectral(p: OdeProblem) -> OdeSolution:
    """Independent route: divide Fourier coefficients after removing the ``e^{Lam}`` factor.

    With ``u = e^{-Lam} v`` the equation becomes ``v' = e^{Lam} f``; writing
    ``v = e^{(lambda0+beta) x} w`` with ``w`` periodic gives a diagonal system
    for the coefficients of ``w``.  Nonresonant problems only.
    """
    prep = _Prepared(p)
    res = resonance_test(p.lambda0, p.theta, p.T)
    if res.resonant:
        raise ValueError("solve_spectral handles nonresonant problems only")
    h = np.exp(prep.P) * prep.F
    N = p.f.N
    coef = np.fft.fft(h) / N
    k = np.fft.fftfreq(N, 1.0 / N)
    w = coef / (1j * k * TWO_PI / p.T + prep.lam0 + prep.beta)
    wv = np.fft.ifft(w) * N
    u = SampledField(p.f.grid, np.exp(-prep.P + prep.beta * prep.x) * wv, p.f.theta_spec)
    return OdeSolution("unique", u, residual(u, p.lam, p.f), gap=res.gap, form="spectral")


def solve_mode_ode(
    xi: int,
    c_trace: Lambda,
    zero_order: Lambda,
    f_mode: np.ndarray,
    theta: complex = 1.0,
    T: float = TWO_PI,
    order: int | None = None,
) -> OdeSolution:
    """One partial-Fourier mode ``u' + (i xi c(t) + z(t)) u = f`` on the standard torus.

    The kernel is chosen to contract: minus form when ``Re lambda0 >= 0``.
    """
    f_mode = np.asarray(f_mode, dtype=complex)
    lam = 1j * xi * np.asarray(c_trace) + np.asarray(zero_order)
    if np.ndim(lam) == 0:
        lam = complex(lam)
    elif lam.shape != f_mode.shape:
        lam = np.broadcast_to(lam, f_mode.shape).copy()
    f = SampledField(GridSpec(1, f_mode.shape[0]), f_mode, ThetaSpec((theta,), T))
    return solve_var(OdeProblem(lam, f), order=order)


def mode_bound_constant(q0: complex) -> float:
    """``2 * 2pi * max_{s in [0, 2pi]} e^{-s Re q0}``: the per-mode a priori bound."""
    return 2.0 * TWO_PI * max(1.0, math.exp(-TWO_PI * complex(q0).real))
