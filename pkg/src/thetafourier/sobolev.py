"""Sobolev norms, coefficient decay classification and the embedding bound."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CoeffTable, SampledField
from .fourier import analyze

RAPID_ORDER = 10.0
RAPID_FLOOR = 1e-13


def japanese_bracket(coeffs_or_cutoff, n: int | None = None) -> np.ndarray:
    """``(1 + |xi|^2)^{1/2}`` over the table box."""
    if isinstance(coeffs_or_cutoff, CoeffTable):
        grids = coeffs_or_cutoff.index_grids()
    else:
        k = np.arange(-coeffs_or_cutoff, coeffs_or_cutoff + 1)
        grids = np.meshgrid(*([k] * n), indexing="ij")
    return np.sqrt(1.0 + sum(g.astype(float) ** 2 for g in grids))


def hs_norm(coeffs: CoeffTable, s: float) -> float:
    """``(sum <xi>^{2s} |c(xi)|^2)^{1/2}``."""
    br = japanese_bracket(coeffs)
    return float(np.sqrt(np.sum(br ** (2.0 * s) * np.abs(coeffs.values) ** 2)))


@dataclass(frozen=True)
class DecayReport:
    fitted_order: float
    is_rapid: bool
    per_shell_max: list[tuple[int, float]]
    floor_reached: bool
    # rapid decay is an asymptotic property; finite tables only give evidence
    asymptotic_caveat: str = field(
        default="finite table: rapid decay is inferred from a fit, not proven"
    )


def shell_maxima(coeffs: CoeffTable) -> list[tuple[int, float]]:
    """Max ``|c(xi)|`` on each shell ``max_j |xi_j| = r``, for r = 0..cutoff."""
    radius = np.max(np.abs(np.stack(coeffs.index_grids())), axis=0)
    mags = np.abs(coeffs.values)
    return [(r, float(mags[radius == r].max())) for r in range(coeffs.cutoff + 1)]


def decay_classify(coeffs: CoeffTable, order_threshold: float = RAPID_ORDER, floor: float = RAPID_FLOOR) -> DecayReport:
    """Fit ``log max_shell |c|`` against ``log <r>`` and classify the decay.

    The slope of the least-squares line (sign flipped) estimates the order N in
    ``|c(xi)| <= C <xi>^{-N}``.  Decay counts as rapid when the order exceeds
    ``order_threshold`` or every shell beyond half the cutoff sits below
    ``floor`` relative to the largest coefficient.
    """
    if coeffs.cutoff < 8:
        raise ValueError("decay classification needs cutoff >= 8")
    shells = shell_maxima(coeffs)
    top = max(v for _, v in shells)
    if top == 0.0:
        return DecayReport(float("inf"), True, shells, True)
    r = np.array([s for s, _ in shells[1:]], dtype=float)
    v = np.array([m for _, m in shells[1:]])
    # shells lost in roundoff carry no slope information
    ok = v > floor * top
    if ok.sum() >= 2:
        slope = np.polyfit(0.5 * np.log1p(r[ok] ** 2), np.log(v[ok]), 1)[0]
        order = float(-slope)
    else:
        order = float("inf")
    outer = [m for s, m in shells if s > coeffs.cutoff / 2]
    floor_reached = all(m < floor * top for m in outer)
    return DecayReport(order, order > order_threshold or floor_reached, shells, floor_reached)


@dataclass(frozen=True)
class EmbeddingReport:
    max_ratio: float
    bound_constant: float
    hs_norm: float
    holds: bool


def embedding_constant(cutoff: int, n: int, s: float) -> float:
    """``(sum_{|xi_j| <= cutoff} <xi>^{-2s})^{1/2}``."""
    return float(np.sqrt(np.sum(japanese_bracket(cutoff, n) ** (-2.0 * s))))


def embedding_check(f: SampledField, s: float, cutoff: int | None = None) -> EmbeddingReport:
    """Check ``|f(x)| <= C ||f||_{H^s} prod_j |theta_j|^{x_j/T}`` at every node."""
    if s <= f.n / 2:
        raise ValueError(f"embedding needs s > n/2 = {f.n / 2}, got {s}")
    table = analyze(f, cutoff, warn=False)
    norm = hs_norm(table, s)
    C = embedding_constant(table.cutoff, f.n, s)
    if norm == 0.0:
        return EmbeddingReport(0.0, C, 0.0, bool(np.all(f.values == 0)))
    m = np.meshgrid(*([np.arange(f.N)] * f.n), indexing="ij")
    growth = np.exp(sum(m[j] * f.theta_spec.log_abs[j] for j in range(f.n)) / f.N)
    ratio = float(np.max(np.abs(f.values) / (norm * growth)))
    return EmbeddingReport(ratio, C, norm, ratio <= C * (1 + 1e-12))
