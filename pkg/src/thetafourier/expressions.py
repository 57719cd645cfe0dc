"""The small built-in function language used by job configs.

A function is a list of terms that are summed.  Every term carries a complex
``coef`` (a number or ``[re, im]``, default 1) and one ``kind``:

``const``   the constant ``coef``
``exp``     ``coef * exp(rate * x_axis)``
``cos``     ``coef * cos(freq * x_axis)``
``sin``     ``coef * sin(freq * x_axis)``
``poly``    ``coef * sum_k powers[k] * x_axis^k``
``mode``    ``coef * exp(i (2pi/T) x . (xi - i log(theta)/2pi))``, the basis function at ``xi``
``product`` ``coef * prod(factors)`` where ``factors`` is itself a term list, multiplied termwise

``axis`` is zero-based and defaults to 0; ``rate`` may be complex.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .core import TWO_PI, ThetaError, ThetaSpec

TERM_KEYS = {
    "const": {"coef"},
    "exp": {"coef", "axis", "rate"},
    "cos": {"coef", "axis", "freq"},
    "sin": {"coef", "axis", "freq"},
    "poly": {"coef", "axis", "powers"},
    "mode": {"coef", "xi"},
    "product": {"coef", "factors"},
}


def parse_complex(v: Any, what: str = "value") -> complex:
    if isinstance(v, bool):
        raise ThetaError(f"{what}: expected a number, got a boolean")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in v):
        return complex(v[0], v[1])
    raise ThetaError(f"{what}: expected a number or [re, im], got {v!r}")


def validate_terms(terms: Any, n: int) -> None:
    if not isinstance(terms, list) or not terms:
        raise ThetaError("an expression is a non-empty list of terms")
    for t in terms:
        if not isinstance(t, dict) or "kind" not in t:
            raise ThetaError(f"term {t!r} needs a 'kind'")
        kind = t["kind"]
        if kind not in TERM_KEYS:
            raise ThetaError(f"unknown term kind {kind!r}; expected one of {sorted(TERM_KEYS)}")
        extra = set(t) - TERM_KEYS[kind] - {"kind"}
        if extra:
            raise ThetaError(f"unknown keys {sorted(extra)} in {kind} term")
        parse_complex(t.get("coef", 1.0), f"{kind}.coef")
        axis = t.get("axis", 0)
        if not isinstance(axis, int) or isinstance(axis, bool) or not 0 <= axis < n:
            raise ThetaError(f"{kind}.axis must be an integer in [0, {n})")
        if kind == "exp":
            parse_complex(t.get("rate", 0.0), "exp.rate")
        if kind in ("cos", "sin"):
            parse_complex(t.get("freq", 1.0), f"{kind}.freq")
        if kind == "poly":
            p = t.get("powers")
            if not isinstance(p, list) or not p:
                raise ThetaError("poly.powers must be a non-empty list of coefficients")
            for a in p:
                parse_complex(a, "poly.powers")
        if kind == "mode":
            xi = t.get("xi")
            if not isinstance(xi, list) or len(xi) != n or not all(isinstance(k, int) and not isinstance(k, bool) for k in xi):
                raise ThetaError(f"mode.xi must be a list of {n} integers")
        if kind == "product":
            validate_terms(t.get("factors"), n)


def evaluate_terms(terms: list, mesh: tuple[np.ndarray, ...], spec: ThetaSpec | None = None) -> np.ndarray:
    """Evaluate a validated term list on meshgrid arrays."""
    out = np.zeros(mesh[0].shape, dtype=complex)
    for t in terms:
        out = out + _term(t, mesh, spec)
    return out


def _term(t: dict, mesh, spec) -> np.ndarray:
    kind = t["kind"]
    coef = parse_complex(t.get("coef", 1.0))
    x = mesh[t.get("axis", 0)]
    if kind == "const":
        val = np.ones(x.shape, dtype=complex)
    elif kind == "exp":
        val = np.exp(parse_complex(t.get("rate", 0.0)) * x)
    elif kind == "cos":
        val = np.cos(parse_complex(t.get("freq", 1.0)) * x)
    elif kind == "sin":
        val = np.sin(parse_complex(t.get("freq", 1.0)) * x)
    elif kind == "poly":
        val = np.zeros(x.shape, dtype=complex)
        for a in reversed(t["powers"]):
            val = val * x + parse_complex(a)
    elif kind == "mode":
        if spec is None:
            raise ThetaError("mode terms need a theta spec")
        arg = sum((TWO_PI / spec.T) * mesh[j] * (t["xi"][j] - 1j * spec.log[j] / TWO_PI) for j in range(spec.n))
        val = np.exp(1j * arg)
    else:
        val = np.ones(x.shape, dtype=complex)
        for f in t["factors"]:
            val = val * _term(f, mesh, spec)
    return coef * val


def periodicity_defect(terms: list, spec: ThetaSpec, probes: int = 7) -> float:
    """``max_j max_x |f(x + T e_j) - theta_j f(x)|`` relative to ``max |f|`` on probe points."""
    n = spec.n
    g = np.linspace(0.0, spec.T, probes, endpoint=False) + 0.123 * spec.T / probes
    mesh = np.meshgrid(*([g] * n), indexing="ij")
    base = evaluate_terms(terms, tuple(mesh), spec)
    scale = max(float(np.max(np.abs(base))), 1e-300)
    worst = 0.0
    for j in range(n):
        shifted = tuple(m + spec.T if i == j else m for i, m in enumerate(mesh))
        moved = evaluate_terms(terms, shifted, spec)
        worst = max(worst, float(np.max(np.abs(moved - spec.theta[j] * base))) / scale)
    return worst
