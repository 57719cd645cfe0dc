"""Fourier analysis and synthesis in the shifted exponential basis.

The basis function attached to ``xi`` in Z^n is
``exp(i (2pi/T) x . (xi - i log(theta) / 2pi))``; its coefficients are the
classical Fourier coefficients of the conjugated field.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, CoeffTable, GridSpec, SampledField, ThetaError, ThetaSpec
from .transform import k_constants, lp_norm, omega_forward, omega_inverse, plain_lp_norm

#: Fraction of total energy the outermost shell may carry before an aliasing warning.
ALIAS_TOL = 1e-10


class AliasingWarning(UserWarning):
    """The coefficient table is not resolved: energy reaches the edge of the box."""


def _fft_to_box(spectrum: np.ndarray, cutoff: int) -> np.ndarray:
    N = spectrum.shape[0]
    idx = np.arange(-cutoff, cutoff + 1) % N
    return spectrum[np.ix_(*([idx] * spectrum.ndim))]


def _box_to_fft(values: np.ndarray, N: int) -> np.ndarray:
    cutoff = values.shape[0] // 2
    out = np.zeros((N,) * values.ndim, dtype=complex)
    idx = np.arange(-cutoff, cutoff + 1) % N
    out[np.ix_(*([idx] * values.ndim))] = values
    return out


def outer_shell_fraction(coeffs: CoeffTable) -> float:
    """Share of ``sum |c|^2`` carried by entries with ``max_j |xi_j| = cutoff``."""
    energy = np.abs(coeffs.values) ** 2
    total = float(energy.sum())
    if total == 0.0 or coeffs.cutoff == 0:
        return 0.0
    inner = tuple(slice(1, -1) for _ in range(coeffs.n))
    return float((total - energy[inner].sum()) / total)


def analyze(f: SampledField, cutoff: int | None = None, warn: bool = True) -> CoeffTable:
    """Fourier coefficients of ``f`` for ``|xi_j| <= cutoff`` via FFT of the conjugate."""
    nyq = f.grid.nyquist_cutoff
    if cutoff is None:
        cutoff = nyq
    if cutoff < 0 or cutoff > nyq:
        raise ValueError(f"cutoff {cutoff} outside [0, {nyq}] for N={f.N}")
    g = omega_forward(f)
    spectrum = np.fft.fftn(g.values) / g.values.size
    table = CoeffTable(_fft_to_box(spectrum, cutoff), f.theta_spec)
    if warn:
        frac = outer_shell_fraction(table)
        if frac > ALIAS_TOL:
            warnings.warn(f"outer shell carries {frac:.3e} of coefficient energy", AliasingWarning, stacklevel=2)
    return table


def analyze_direct(f: SampledField, cutoff: int) -> CoeffTable:
    """Slow reference: quadrature of ``f`` against each shifted exponential.

    Uses the weighted samples of ``f`` directly (no conjugation, no FFT); intended
    as an independent check of :func:`analyze`.
    """
    spec = f.theta_spec
    x = f.grid.nodes(spec.T)
    out = np.zeros((2 * cutoff + 1,) * f.n, dtype=complex)
    ks = np.arange(-cutoff, cutoff + 1)
    # per-axis matrices exp(-i (2pi/T) x (xi - i log/2pi)), entry [xi, node]
    mats = [
        np.exp(-1j * (TWO_PI / spec.T) * np.outer(ks - 1j * spec.log[j] / TWO_PI, x)) for j in range(f.n)
    ]
    if f.n == 1:
        out = mats[0] @ f.values
    else:
        out = mats[0] @ f.values @ mats[1].T
    return CoeffTable(out / f.values.size, spec)


def synthesize(coeffs: CoeffTable, grid: GridSpec) -> SampledField:
    """Sum the table against the shifted exponentials at the grid nodes."""
    if grid.n != coeffs.n:
        raise ThetaError("grid dimension does not match coefficient table")
    if coeffs.cutoff > grid.nyquist_cutoff:
        raise ValueError(f"cutoff {coeffs.cutoff} exceeds Nyquist limit {grid.nyquist_cutoff} for N={grid.N}")
    spectrum = _box_to_fft(coeffs.values, grid.N)
    g = np.fft.ifftn(spectrum) * spectrum.size
    return omega_inverse(SampledField(grid, g, ThetaSpec.periodic(grid.n)), coeffs.theta_spec)


def evaluate(coeffs: CoeffTable, x) -> np.ndarray:
    """Evaluate the series at arbitrary points ``x`` of shape ``(..., n)``."""
    spec = coeffs.theta_spec
    pts = np.asarray(x, dtype=float).reshape(-1, coeffs.n)
    ks = np.arange(-coeffs.cutoff, coeffs.cutoff + 1)
    mats = [
        np.exp(1j * (TWO_PI / spec.T) * np.outer(pts[:, j], ks - 1j * spec.log[j] / TWO_PI))
        for j in range(coeffs.n)
    ]
    if coeffs.n == 1:
        return mats[0] @ coeffs.values
    return np.einsum("pa,ab,pb->p", mats[0], coeffs.values, mats[1], optimize=True)


def frequency_multiplier(spec: ThetaSpec, cutoff: int, j: int) -> np.ndarray:
    """``(2pi/T) i (xi_j - i log(theta_j)/2pi)`` broadcast over the table box."""
    ks = np.arange(-cutoff, cutoff + 1)
    mult = (TWO_PI / spec.T) * 1j * (ks - 1j * spec.log[j] / TWO_PI)
    shape = [1] * spec.n
    shape[j] = -1
    return np.broadcast_to(mult.reshape(shape), (2 * cutoff + 1,) * spec.n)


def derivative_coeffs(coeffs: CoeffTable, j: int = 0) -> CoeffTable:
    """Coefficients of ``d f / d x_j``."""
    if not 0 <= j < coeffs.n:
        raise ValueError(f"axis {j} out of range for n={coeffs.n}")
    return coeffs.with_values(coeffs.values * frequency_multiplier(coeffs.theta_spec, coeffs.cutoff, j))


def modulate(coeffs: CoeffTable, xi0) -> CoeffTable:
    """Coefficients of ``e^{i (2pi/T) x . xi0} f``: entries move from ``xi - xi0`` to ``xi``."""
    xi0 = np.broadcast_to(np.asarray(xi0, dtype=int), (coeffs.n,))
    K = coeffs.cutoff
    out = np.zeros_like(coeffs.values)
    src, dst = [], []
    for s in xi0:
        s = int(s)
        lo, hi = max(-K, -K + s), min(K, K + s)
        if lo > hi:
            src.append(slice(0, 0))
            dst.append(slice(0, 0))
            continue
        dst.append(slice(lo + K, hi + K + 1))
        src.append(slice(lo - s + K, hi - s + K + 1))
    out[tuple(dst)] = coeffs.values[tuple(src)]
    kept = np.zeros(coeffs.values.shape, dtype=bool)
    kept[tuple(src)] = True
    dropped = bool(np.any(coeffs.values[~kept] != 0))
    return coeffs.with_values(out, truncated=coeffs.truncated or dropped)


def translate(coeffs: CoeffTable, a) -> CoeffTable:
    """Coefficients of ``x -> f(x + a)``."""
    spec = coeffs.theta_spec
    a = np.broadcast_to(np.asarray(a, dtype=float), (coeffs.n,))
    phase = np.zeros(coeffs.values.shape, dtype=complex)
    for j in range(coeffs.n):
        phase = phase + frequency_multiplier(spec, coeffs.cutoff, j) * a[j]
    return coeffs.with_values(coeffs.values * np.exp(phase))


def dilate(coeffs: CoeffTable, k: int) -> CoeffTable:
    """Coefficients of ``x -> f(k x)``, tagged with ``theta^sign(k)`` and period ``T/|k|``.

    The logarithm branch of the new spec is chosen so that
    ``log(theta^sign(k)) = sign(k) log(theta)``.
    """
    k = int(k)
    if k == 0:
        raise ValueError("dilation factor must be nonzero")
    spec = coeffs.theta_spec
    if k > 0:
        new_spec = ThetaSpec(spec.theta, spec.T / k, spec.log_branch)
        return CoeffTable(coeffs.values, new_spec, coeffs.truncated)
    inv = tuple(1.0 / t for t in spec.theta)
    principal = ThetaSpec(inv, spec.T / abs(k))
    branch = tuple(int(round(((-lg) - pl).imag / TWO_PI)) for lg, pl in zip(spec.log, principal.log))
    new_spec = ThetaSpec(inv, spec.T / abs(k), branch)
    flipped = coeffs.values[tuple(slice(None, None, -1) for _ in range(coeffs.n))]
    return CoeffTable(flipped, new_spec, coeffs.truncated)


def apply_symmetry(coeffs: CoeffTable, kind: str, param) -> CoeffTable:
    """Dispatch to :func:`modulate`, :func:`translate` or :func:`dilate` by name."""
    ops = {"modulate": modulate, "translate": translate, "dilate": dilate}
    if kind not in ops:
        raise ValueError(f"unknown symmetry {kind!r}; expected one of {sorted(ops)}")
    return ops[kind](coeffs, param)


def coeff_l2(coeffs: CoeffTable) -> float:
    return float(np.sqrt(np.sum(np.abs(coeffs.values) ** 2)))


@dataclass(frozen=True)
class L1BoundReport:
    lhs_max: float
    l1_norm: float
    weighted_bound: float
    coeff_le_norm: bool
    norm_le_bound: bool

    @property
    def holds(self) -> bool:
        return self.coeff_le_norm and self.norm_le_bound


def l1_bound_check(f: SampledField, rtol: float = 1e-12) -> L1BoundReport:
    """Check ``max |f^(xi)| <= ||f||_{L^1_theta} <= K_min^{-1} ||f||_{L^1([0,T]^n)}``."""
    table = analyze(f, warn=False)
    lhs = float(np.max(np.abs(table.values)))
    l1 = lp_norm(f, 1)
    bound = plain_lp_norm(f, 1) / k_constants(f.theta_spec).k_min
    slack = rtol * max(l1, bound, 1e-300)
    return L1BoundReport(lhs, l1, bound, lhs <= l1 + slack, l1 <= bound + slack)


@dataclass(frozen=True)
class PlancherelReport:
    coeff_l2: float
    weighted_l2: float
    plain_l2: float
    k_min: float
    k_max: float
    identity_error: float
    identity_holds: bool
    sandwich_holds: bool
    tail_fraction: float

    @property
    def holds(self) -> bool:
        return self.identity_holds and self.sandwich_holds


def plancherel_check(f: SampledField, atol: float = 1e-9) -> PlancherelReport:
    """Compare coefficient l2, weighted L2 and plain L2 norms of ``f``."""
    table = analyze(f, warn=False)
    tail = outer_shell_fraction(table)
    if tail > ALIAS_TOL:
        warnings.warn(f"field not band-limited: outer shell fraction {tail:.3e}", AliasingWarning, stacklevel=2)
    c = coeff_l2(table)
    w = lp_norm(f, 2)
    plain = plain_lp_norm(f, 2)
    K = k_constants(f.theta_spec)
    err = abs(c - w)
    slack = 1e-12 * max(plain, 1e-300)
    sandwich = K.k_min * c <= plain + slack and plain <= K.k_max * c + slack
    return PlancherelReport(c, w, plain, K.k_min, K.k_max, err, err <= atol * max(1.0, w), sandwich, tail)


def band_limited_table(rng: np.random.Generator, spec: ThetaSpec, cutoff: int, modes: int | None = None) -> CoeffTable:
    """Random table with ``modes`` nonzero entries (all entries if None) inside the box."""
    shape = (2 * cutoff + 1,) * spec.n
    vals = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if modes is not None:
        keep = np.zeros(vals.size, dtype=bool)
        keep[rng.choice(vals.size, size=min(modes, vals.size), replace=False)] = True
        vals = np.where(keep.reshape(shape), vals, 0)
    return CoeffTable(vals, spec)
