"""Continued fractions and a finite-data Diophantine classification of reals.

Expansion runs in exact rational arithmetic on the value handed in.  A float
is its binary rational, so its expansion always terminates; only the
convergents coarser than the float's own resolution say anything about the
real number it stands for, and the rest are discarded.  ``Fraction`` and
decimal-string inputs are exact and only terminate when the number really is
rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Union

import mpmath

RealLike = Union[int, float, Fraction, Decimal, str, "mpmath.mpf"]

RATIONAL = "rational"
QUADRATIC = "quadratic-irrational-evidence"
NON_LIOUVILLE = "non-liouville-evidence"
LIOUVILLE = "liouville-suspect"


@dataclass(frozen=True)
class DiophantineClass:
    kind: str
    partial_quotients: list[int]
    convergents: list[tuple[int, int]]
    best_exponent: float
    exponents: list[float] = field(default_factory=list)
    record_exponents: list[float] = field(default_factory=list)
    period: int | None = None

    @property
    def rational(self) -> tuple[int, int] | None:
        return self.convergents[-1] if self.kind == RATIONAL else None

    @property
    def is_irrational_non_liouville(self) -> bool:
        return self.kind in (QUADRATIC, NON_LIOUVILLE)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "partial_quotients": [str(a) if abs(a) > 2**53 else a for a in self.partial_quotients],
            "convergents": [[str(p), str(q)] for p, q in self.convergents],
            "best_exponent": self.best_exponent,
            "record_exponents": self.record_exponents,
            "period": self.period,
        }


def _exact(alpha: RealLike) -> tuple[Fraction, float]:
    """Exact rational value of ``alpha`` and the absolute resolution of the input."""
    if isinstance(alpha, Fraction):
        return alpha, 0.0
    if isinstance(alpha, int):
        return Fraction(alpha), 0.0
    if isinstance(alpha, (str, Decimal)):
        return Fraction(Decimal(alpha)), 0.0
    if isinstance(alpha, mpmath.mpf):
        man, exp = mpmath.mpf(alpha).man_exp
        val = Fraction(int(man)) * (Fraction(2) ** int(exp))
        return val, float(abs(alpha) * mpmath.mpf(2) ** (-mpmath.mp.prec)) or 2.0 ** (-mpmath.mp.prec)
    x = float(alpha)
    if not math.isfinite(x):
        raise ValueError(f"cannot classify non-finite value {alpha!r}")
    return Fraction(x), max(abs(x), 1.0) * 2.0 ** -52


def continued_fraction(alpha: RealLike, depth: int) -> tuple[list[int], bool]:
    """Partial quotients of the exact value of ``alpha`` (at most ``depth``) and whether it terminated."""
    x, _ = _exact(alpha)
    quotients: list[int] = []
    for _ in range(depth):
        a = math.floor(x)
        quotients.append(a)
        rem = x - a
        if rem == 0:
            return quotients, True
        x = 1 / rem
    return quotients, False


#: Largest denominator a float input may be recognised as a rational with.
MAX_FLOAT_DENOMINATOR = 10**6


def convergents(quotients: list[int]) -> list[tuple[int, int]]:
    """``p_m = a_m p_{m-1} + p_{m-2}``, ``q_m = a_m q_{m-1} + q_{m-2}`` in integers."""
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    for a in quotients:
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        out.append((p1, q1))
    return out


def _log10_fraction(x: Fraction) -> float:
    return math.log10(x.numerator) - math.log10(x.denominator)


def _detect_period(quotients: list[int], max_period: int = 8, repeats: int = 3) -> int | None:
    tail = quotients[1:]
    for per in range(1, max_period + 1):
        need = per * repeats
        if len(tail) < need + 2:
            continue
        # allow a preperiod; the last `need` terms must repeat with this period
        seg = tail[-need:]
        if all(seg[i] == seg[i + per] for i in range(need - per)):
            return per
    return None


def _growing(records: list[float], steps: int = 3, jump: float = 0.5, reach: float = 4.5) -> bool:
    """Record exponents that keep climbing: the finite-depth footprint of a Liouville number."""
    if len(records) < steps + 1 or records[-1] < reach:
        return False
    tail = records[-(steps + 1):]
    return all(b - a >= jump for a, b in zip(tail, tail[1:]))


def classify_real(alpha: RealLike, depth: int = 40, k_max: float = 10.0, tol: float = 1e-14) -> DiophantineClass:
    """Classify ``alpha`` from its first ``depth`` partial quotients.

    Exact inputs (int, Fraction, decimal string) are rational only when the
    expansion terminates.  An inexact input counts as rational when a
    convergent with denominator at most ``MAX_FLOAT_DENOMINATOR`` matches it
    within ``tol`` (relative); otherwise only the convergents it resolves are
    kept.

    ``best_exponent`` is the largest ``mu`` with ``|alpha - p/q| = q^{-mu}`` over
    the later half of those convergents (``q > 1``).  The number is flagged Liouville-suspect when
    that exponent exceeds ``k_max`` or when successive record exponents keep
    growing with depth; eventually periodic quotients are reported as
    quadratic-irrational evidence.
    """
    if depth < 5:
        raise ValueError("depth must be at least 5")
    exact, resolution = _exact(alpha)
    quotients, terminated = continued_fraction(alpha, depth)
    convs = convergents(quotients)
    errors = [abs(exact - Fraction(p, q)) for p, q in convs]
    if resolution > 0:
        match = max(tol * max(1.0, abs(float(exact))), 4 * resolution)
        for m, ((p, q), err) in enumerate(zip(convs, errors)):
            if q <= MAX_FLOAT_DENOMINATOR and err <= match:
                return DiophantineClass(RATIONAL, quotients[: m + 1], convs[: m + 1], float("inf"))
        # beyond the input's resolution the quotients describe rounding, not alpha
        usable = [m for m, err in enumerate(errors) if err > 100 * resolution]
        keep = usable[-1] + 1 if usable else 1
        quotients, convs, errors = quotients[:keep], convs[:keep], errors[:keep]
    elif terminated:
        return DiophantineClass(RATIONAL, quotients, convs, float("inf"))
    exponents: list[float] = []
    records: list[float] = []
    for (p, q), err in zip(convs, errors):
        if q <= 1 or err == 0:
            continue
        mu = -_log10_fraction(err) / math.log10(q)
        exponents.append(mu)
        if not records or mu > records[-1]:
            records.append(mu)
    # small denominators say little about asymptotics: take the max over the later half
    best = max(exponents[len(exponents) // 2:]) if exponents else float("nan")
    period = _detect_period(quotients)
    if exponents and (best > k_max or _growing(records)):
        kind = LIOUVILLE
    elif period is not None:
        kind = QUADRATIC
    else:
        kind = NON_LIOUVILLE
    return DiophantineClass(kind, quotients, convs, best, exponents, records, period)
