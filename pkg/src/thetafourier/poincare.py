"""Poincare constant for (theta, T)-periodic functions and its numerical check."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, CoeffTable, GridSpec, SampledField, ThetaSpec
from .fourier import analyze, coeff_l2, derivative_coeffs
from .transform import abs_weight

CRITICAL_TOL = 1e-12


@dataclass(frozen=True)
class PoincareCase:
    """Lattice geometry of ``v = i log(theta) / 2pi``.

    ``nearest`` is the lattice point closest to ``v``; it is the critical mode
    when ``v`` itself is (numerically) a lattice point.
    """

    critical_mode: tuple[int, ...] | None
    constant: float
    distance: float
    shift: tuple[complex, ...]
    nearest: tuple[int, ...]
    near_critical: bool = False


def poincare_case(spec: ThetaSpec) -> PoincareCase:
    v = spec.shift
    nearest = np.rint(v.real).astype(int)
    gaps = np.abs(v - nearest)
    dist = float(np.sqrt(np.sum(gaps ** 2)))
    scale = TWO_PI / spec.T
    shift = tuple(complex(z) for z in v)
    if np.all(gaps <= CRITICAL_TOL):
        near = dist > 0
        if near:
            warnings.warn(f"theta is within {dist:.2e} of a critical value; treated as critical", stacklevel=2)
        return PoincareCase(tuple(int(k) for k in nearest), scale, dist, shift, tuple(int(k) for k in nearest), near)
    return PoincareCase(None, scale * dist, dist, shift, tuple(int(k) for k in nearest))


def project_admissible(coeffs: CoeffTable, case: PoincareCase) -> CoeffTable:
    """Zero the critical coefficient, if there is one inside the table."""
    if case.critical_mode is None or any(abs(k) > coeffs.cutoff for k in case.critical_mode):
        return coeffs
    vals = np.array(coeffs.values)
    vals[tuple(k + coeffs.cutoff for k in case.critical_mode)] = 0
    return coeffs.with_values(vals)


@dataclass(frozen=True)
class PoincareReport:
    grad_norm: float
    f_norm: float
    constant: float
    ratio: float
    holds: bool
    projected: bool

    def to_json(self) -> dict:
        return {
            "grad_norm": self.grad_norm,
            "f_norm": self.f_norm,
            "constant": self.constant,
            "ratio": self.ratio,
            "holds": self.holds,
            "projected": self.projected,
        }


def gradient_norm(coeffs: CoeffTable) -> float:
    """Weighted L2 norm of the gradient, from derivative multipliers and Plancherel."""
    total = sum(coeff_l2(derivative_coeffs(coeffs, j)) ** 2 for j in range(coeffs.n))
    return math.sqrt(total)


def poincare_verify(f: SampledField | CoeffTable, cutoff: int | None = None) -> PoincareReport:
    """Project onto the admissible subspace and test ``|grad f| >= C |f|``.

    ``ratio`` is ``grad_norm / (constant * f_norm)``; it is 1 exactly when the
    inequality is sharp for ``f``.
    """
    coeffs = f if isinstance(f, CoeffTable) else analyze(f, cutoff, warn=False)
    case = poincare_case(coeffs.theta_spec)
    proj = project_admissible(coeffs, case)
    projected = bool(np.any(proj.values != coeffs.values))
    g = gradient_norm(proj)
    fn = coeff_l2(proj)
    if fn == 0.0:
        return PoincareReport(g, 0.0, case.constant, float("inf"), True, projected)
    ratio = g / (case.constant * fn)
    return PoincareReport(g, fn, case.constant, ratio, ratio >= 1 - 1e-12, projected)


def sharp_mode(case: PoincareCase) -> tuple[int, ...]:
    """A lattice mode at which the inequality is an equality."""
    xi = list(case.nearest)
    if case.critical_mode is not None:
        xi[0] += 1
    return tuple(xi)


def basis_gram(spec: ThetaSpec, modes: list[tuple[int, ...]], N: int) -> np.ndarray:
    """Gram matrix of shifted exponentials under the weighted inner product, by quadrature."""
    grid = GridSpec(spec.n, N)
    mesh = grid.mesh(spec.T)
    funcs = []
    for xi in modes:
        arg = sum((TWO_PI / spec.T) * mesh[j] * (xi[j] - 1j * spec.log[j] / TWO_PI) for j in range(spec.n))
        funcs.append(np.exp(1j * arg))
    w2 = abs_weight(SampledField(grid, funcs[0], spec)) ** 2
    G = np.empty((len(modes), len(modes)), dtype=complex)
    for a, fa in enumerate(funcs):
        for b, fb in enumerate(funcs):
            G[a, b] = np.mean(fa * np.conj(fb) * w2)
    return G
