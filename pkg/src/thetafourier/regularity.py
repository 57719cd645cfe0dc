"""Global hypoellipticity / solvability diagnosis for ``L = d1 + c(x1) d2 + q``.

Everything is phrased through the symbol

    sigma(xi) = xi_1 + c xi_2 - i [ (log theta_1 + c log theta_2)/2pi + q T/2pi ]

of the conjugated operator on the standard torus.  Verdicts produced by a
finite lattice scan are labelled ``evidence``; only the clauses that follow
from a closed-form criterion are labelled ``analytic``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .core import TWO_PI, ThetaError, ThetaSpec
from .diophantine import LIOUVILLE, RATIONAL, DiophantineClass, classify_real

Coefficient = Union[complex, np.ndarray]

IMAG_TOL = 1e-12
ZERO_TOL = 1e-10
B_TOL = 1e-10
SIGN_TOL = 1e-12
TRACE_TAIL_TOL = 1e-8
AVERAGE_TOL = 1e-12
STABILITY = 0.5

DEFAULT_XI = 64
DEFAULT_K_GRID = (1.0, 2.0, 3.0, 4.0, 6.0, 8.0)
DEFAULT_C_FLOOR = 1e-3


def check_trace_periodic(trace: np.ndarray, name: str = "trace") -> None:
    """Reject traces whose trigonometric interpolant is not smooth across the period.

    A jump between the last and first node shows up as slowly decaying Fourier
    coefficients; the upper quarter of the spectrum must hold less than
    ``TRACE_TAIL_TOL`` of the largest coefficient.
    """
    trace = np.asarray(trace)
    N = trace.shape[0]
    if N < 8:
        raise ThetaError(f"{name} needs at least 8 samples")
    spec = np.abs(np.fft.fft(trace, axis=0)) / N
    k = np.abs(np.fft.fftfreq(N, 1.0 / N))
    top = float(spec.max())
    if top == 0.0:
        return
    tail = float(spec[k >= N // 4].max())
    if tail > TRACE_TAIL_TOL * top:
        raise ThetaError(f"{name} is not smoothly periodic (spectral tail {tail / top:.2e} of max)")


@dataclass(frozen=True)
class OperatorSpec:
    """Coefficients of ``L`` on (theta, T)-periodic functions of two variables.

    ``c`` is a complex constant or samples of ``c(t)`` on the uniform grid of
    ``[0, T)``; ``q`` is a constant, a trace ``q(t)`` or a field ``q(t, x)`` of
    shape ``(N, N)`` on the same grid.
    """

    theta_spec: ThetaSpec
    c: Coefficient = 0.0
    q: Coefficient = 0.0

    def __post_init__(self) -> None:
        if self.theta_spec.n != 2:
            raise ThetaError("the operator acts on functions of two variables")
        c = self.c if np.ndim(self.c) == 0 else np.asarray(self.c, dtype=complex)
        q = self.q if np.ndim(self.q) == 0 else np.asarray(self.q, dtype=complex)
        if np.ndim(c) > 1:
            raise ThetaError("c must be a constant or a one-dimensional trace")
        if np.ndim(q) > 2:
            raise ThetaError("q must be a constant, a trace or a two-dimensional field")
        Ns = {np.shape(a)[0] for a in (c, q) if np.ndim(a)}
        if len(Ns) > 1 or (np.ndim(q) == 2 and q.shape[0] != q.shape[1]):
            raise ThetaError("sampled coefficients must share one grid")
        if np.ndim(c):
            check_trace_periodic(c, "c")
        if np.ndim(q):
            check_trace_periodic(q, "q")
            if np.ndim(q) == 2:
                check_trace_periodic(q.T, "q")
        object.__setattr__(self, "c", complex(c) if np.ndim(c) == 0 else c)
        object.__setattr__(self, "q", complex(q) if np.ndim(q) == 0 else q)

    @property
    def T(self) -> float:
        return self.theta_spec.T

    @property
    def is_constant(self) -> bool:
        return np.ndim(self.c) == 0 and np.ndim(self.q) == 0

    @property
    def N(self) -> int | None:
        for a in (self.c, self.q):
            if np.ndim(a):
                return int(np.shape(a)[0])
        return None

    def with_theta(self, spec: ThetaSpec) -> "OperatorSpec":
        return OperatorSpec(spec, self.c, self.q)


@dataclass(frozen=True)
class TildeParams:
    """Coefficients of the conjugated operator ``d1 + c_eff d2 + zero_order`` on the torus.

    Traces are the same arrays as in the operator, read on the 2pi grid
    (``t -> T t / 2pi``).  ``c0`` is the mean of ``c``, ``a0`` its real part and
    ``q0`` the mean of ``q``.
    """

    c_eff: Coefficient
    zero_order: Coefficient
    a0: float
    c0: complex
    q0: complex
    T: float

    def symbol(self, xi1, xi2) -> np.ndarray:
        """``(2pi/T) (xi_1 + c xi_2 - i z)`` for constant coefficients."""
        if np.ndim(self.c_eff) or np.ndim(self.zero_order):
            raise ValueError("symbol is defined for constant coefficients only")
        return (TWO_PI / self.T) * (xi1 + self.c_eff * xi2 - 1j * self.zero_order)


def tilde_params(op: OperatorSpec) -> TildeParams:
    lg = op.theta_spec.log
    z = (lg[0] + op.c * lg[1]) / TWO_PI + (op.T / TWO_PI) * op.q
    # the uniform-grid trapezoid rule for a periodic trace is the sample mean
    c0 = complex(np.mean(op.c))
    q0 = complex(np.mean(op.q))
    return TildeParams(op.c, z, c0.real, c0, q0, op.T)


def constant_symbol(op: OperatorSpec, xi) -> complex:
    """``xi_1 + c xi_2 - i [(log theta_1 + c log theta_2)/2pi + q T/2pi]``."""
    if not op.is_constant:
        raise ValueError("constant_symbol needs constant c and q")
    z = _zero_order(op.theta_spec, op.c, op.q)
    return complex(xi[0] + op.c * xi[1] - 1j * z)


def _zero_order(spec: ThetaSpec, c: complex, q: complex) -> complex:
    lg = spec.log
    return complex((lg[0] + c * lg[1]) / TWO_PI + q * spec.T / TWO_PI)


def symbol_grid(spec: ThetaSpec, c: complex, q: complex, Xi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symbol over the box ``|xi_j| <= Xi`` with index grids (axis 0 is xi_1)."""
    ks = np.arange(-Xi, Xi + 1)
    x1, x2 = np.meshgrid(ks, ks, indexing="ij")
    z = _zero_order(spec, c, q)
    return x1 + c * x2 - 1j * z, x1, x2


@dataclass
class RegularityVerdict:
    gh: str
    gs: str
    route: str
    gh_basis: str = "evidence"
    gs_basis: str = "evidence"
    witnesses: dict = field(default_factory=dict)
    diophantine: DiophantineClass | None = None
    constants: tuple[float, float] | None = None
    tolerances: dict = field(default_factory=dict)
    explanation: str = ""

    def key(self) -> tuple[str, str, str]:
        """The parts of a verdict that must not depend on the logarithm branch."""
        return (self.gh, self.gs, self.route)

    def to_json(self) -> dict:
        return {
            "gh": self.gh,
            "gs": self.gs,
            "route": self.route,
            "gh_basis": self.gh_basis,
            "gs_basis": self.gs_basis,
            "witnesses": self.witnesses,
            "diophantine": self.diophantine.to_json() if self.diophantine else None,
            "constants": None if self.constants is None else {"C": self.constants[0], "k": self.constants[1]},
            "tolerances": self.tolerances,
            "explanation": self.explanation,
        }


def _zero_line(zeros: list[tuple[int, int]], c: float, dio: DiophantineClass) -> dict:
    """Describe the zeros of a rational-slope symbol as a lattice line."""
    p, q = dio.rational
    g = math.gcd(p, q) or 1
    direction = (-p // g, q // g)
    x0 = zeros[0]
    line = {"point": list(x0), "direction": list(direction)}
    if direction[0] == 0:
        line["equation"] = f"xi_1 = {x0[0]}"
    elif direction[1] == 0:
        line["equation"] = f"xi_2 = {x0[1]}"
    else:
        line["equation"] = f"{q // g}*xi_1 + {p // g}*xi_2 = {(q // g) * x0[0] + (p // g) * x0[1]}"
    return line


def _scan_bound(mag: np.ndarray, norm2: np.ndarray, inner: np.ndarray, k_grid: Sequence[float], C_floor: float):
    """Smallest k whose constant ``min |sigma| (1+|xi|^2)^k`` clears the floor and is stable.

    Stability means the constant on the full box is at least ``STABILITY``
    times the constant on the half box, so the bound is not still shrinking.
    Returns ``(C, k, table)`` with ``C = k = None`` when no k qualifies.
    """
    table = []
    for k in sorted(k_grid):
        scaled = mag * (1.0 + norm2) ** k
        full = float(scaled.min()) if scaled.size else math.inf
        half = float(scaled[inner].min()) if inner.any() else math.inf
        table.append({"k": k, "C": full, "C_half_box": half})
        if full >= C_floor and full >= STABILITY * half:
            return full, k, table
    return None, None, table


def diagnose_constant(
    op: OperatorSpec,
    Xi: int = DEFAULT_XI,
    k_grid: Sequence[float] = DEFAULT_K_GRID,
    C_floor: float = DEFAULT_C_FLOOR,
    depth: int = 40,
    k_max: float = 10.0,
) -> RegularityVerdict:
    """Decide GH / GS for constant ``c`` and ``q``.

    Complex ``c`` is settled analytically.  For real ``c`` the box
    ``|xi_j| <= Xi`` is searched for symbol zeros, which is the same as
    searching for ``q`` in the exceptional lattice coset; if any are found the
    arithmetic of ``c`` decides, otherwise the symbol lower bound is scanned.
    """
    if not op.is_constant:
        raise ValueError("diagnose_constant needs constant c and q")
    if Xi < 2:
        raise ValueError("Xi must be at least 2")
    tol = {"imag_c": IMAG_TOL, "symbol_zero": ZERO_TOL, "Xi": Xi, "k_grid": list(k_grid),
           "C_floor": C_floor, "depth": depth, "k_max": k_max, "stability": STABILITY}
    c, q = op.c, op.q
    if abs(c.imag) > IMAG_TOL:
        return RegularityVerdict("yes", "yes", "Corollary: Im(c) != 0", "analytic", "analytic", tolerances=tol,
                                 explanation="a non-real coefficient keeps the symbol away from zero")
    c = c.real
    sigma, x1, x2 = symbol_grid(op.theta_spec, c, q, Xi)
    norm2 = (x1 ** 2 + x2 ** 2).astype(float)
    mag = np.abs(sigma)
    zero = mag < ZERO_TOL * (1.0 + np.sqrt(norm2))
    inner = (np.abs(x1) <= Xi // 2) & (np.abs(x2) <= Xi // 2)
    zeros = [(int(a), int(b)) for a, b in zip(x1[zero], x2[zero])]
    zeros.sort(key=lambda z: (abs(z[0]) + abs(z[1]), z))

    if zeros:
        dio = classify_real(c, depth=depth, k_max=k_max)
        wit = {"zeros_found": len(zeros), "zeros": [list(z) for z in zeros[:8]]}
        route = "Corollary: q in exceptional set"
        if dio.kind == RATIONAL:
            wit["line"] = _zero_line(zeros, c, dio)
            return RegularityVerdict("no", "yes", route + ", c rational", "analytic", "analytic", wit, dio,
                                     tolerances=tol, explanation="the symbol vanishes along a full lattice line")
        if dio.kind == LIOUVILLE:
            return RegularityVerdict("no", "no", route + ", c Liouville-suspect", "evidence", "evidence", wit, dio,
                                     tolerances=tol, explanation="c is approximated by rationals faster than any fixed power")
        keep = ~zero
        C, k, table = _scan_bound(mag[keep], norm2[keep], inner[keep], k_grid, C_floor)
        wit["bound_scan"] = table
        return RegularityVerdict("yes", "yes", route + ", c irrational non-Liouville", "evidence", "evidence", wit,
                                 dio, None if C is None else (C, k), tol,
                                 "classification of c from finitely many partial quotients")

    z = _zero_order(op.theta_spec, c, q)
    not_detected = {"exceptional_set": f"not detected within search box |xi_j| <= {Xi}"}
    if abs(z.real) > IMAG_TOL:
        # for real c, Im sigma = -Re z at every lattice point
        return RegularityVerdict("yes", "yes", "Prop item (2): |sigma| >= |Re z| > 0", "analytic", "analytic",
                                 not_detected, constants=(abs(z.real), 0.0), tolerances=tol,
                                 explanation="the symbol has constant nonzero imaginary part")
    C, k, table = _scan_bound(mag, norm2, inner, k_grid, C_floor)
    wit = dict(not_detected, bound_scan=table)
    if C is None:
        return RegularityVerdict("undecided", "undecided", "Prop item (2): no stable bound on the box",
                                 witnesses=wit, tolerances=tol,
                                 explanation="no (C, k) on the grid clears the floor with a stable constant")
    return RegularityVerdict("yes", "yes", "Prop item (2): lattice scan", "evidence", "evidence", wit,
                             constants=(C, k), tolerances=tol,
                             explanation="lower bound found on a finite box only")


def psi_phase(a_trace, q_trace=None, a0: complex | None = None, q0: complex | None = None):
    """Periodic phases ``A(t) = int_0^t a - a0 t`` and ``Q(t) = int_0^t q - q0 t`` on the 2pi grid.

    The antiderivatives are taken spectrally, which is exact for band-limited
    traces.  Supplying averages that disagree with the trace means raises,
    since the result would then drift and fail to be periodic.
    """

    def phase(trace, mean):
        trace = np.asarray(trace, dtype=complex)
        N = trace.shape[0]
        m = complex(np.mean(trace))
        if mean is not None and abs(complex(mean) - m) > AVERAGE_TOL * (1 + abs(m)):
            raise ValueError(f"supplied average {mean} differs from trace mean {m}; the phase would drift")
        coef = np.fft.fft(trace) / N
        k = np.fft.fftfreq(N, 1.0 / N)
        anti = np.zeros_like(coef)
        nz = k != 0
        anti[nz] = coef[nz] / (1j * k[nz])
        # the Nyquist sample is cos(N t / 2), whose antiderivative is not representable
        anti[N // 2] = 0
        out = np.fft.ifft(anti) * N
        return out - out[0]

    A = phase(a_trace, a0)
    Q = None if q_trace is None else phase(np.broadcast_to(q_trace, np.shape(a_trace)), q0)
    return A, Q


def diagnose_variable(
    op: OperatorSpec,
    Xi: int = DEFAULT_XI,
    k_grid: Sequence[float] = DEFAULT_K_GRID,
    C_floor: float = DEFAULT_C_FLOOR,
    depth: int = 40,
    k_max: float = 10.0,
) -> RegularityVerdict:
    """Decide GH / GS when ``c = a + ib`` (and possibly ``q``) vary with ``t``."""
    tol = {"b_zero": B_TOL, "sign": SIGN_TOL}
    c = np.atleast_1d(np.asarray(op.c, dtype=complex))
    b = c.imag
    q = op.q
    q_field = np.ndim(q) == 2 and float(np.max(np.abs(q - np.mean(q, axis=1, keepdims=True)))) > 0
    bmax, bmin = float(b.max()), float(b.min())
    if max(abs(bmax), abs(bmin)) > B_TOL:
        if bmin >= -SIGN_TOL or bmax <= SIGN_TOL:
            return RegularityVerdict("yes", "yes", "Prop: b one-signed; GH=>GS", "analytic", "analytic",
                                     {"b_min": bmin, "b_max": bmax}, tolerances=tol,
                                     explanation="b does not change sign, so GH holds and implies GS")
        return RegularityVerdict("undecided", "undecided", "no clause: b changes sign",
                                 witnesses={"b_min": bmin, "b_max": bmax}, tolerances=tol,
                                 explanation="no criterion covers a sign-changing imaginary part")
    tp = tilde_params(op)
    dio = classify_real(tp.a0, depth=depth, k_max=k_max)
    if q_field and not dio.is_irrational_non_liouville:
        return RegularityVerdict("undecided", "undecided", "no clause: q depends on both variables",
                                 diophantine=dio, tolerances=tol,
                                 explanation="reduction needs q = q(t) or a0 irrational non-Liouville")
    reduced = OperatorSpec(op.theta_spec, complex(tp.a0), tp.q0)
    verdict = diagnose_constant(reduced, Xi, k_grid, C_floor, depth, k_max)
    clause = "a0 non-Liouville" if q_field else "q depends on t only"
    verdict.route = f"reduction to averages ({clause}); " + verdict.route
    verdict.tolerances.update(tol)
    verdict.witnesses["averages"] = {"a0": tp.a0, "q0": [tp.q0.real, tp.q0.imag]}
    return verdict


def diagnose(op: OperatorSpec, **kw) -> RegularityVerdict:
    return diagnose_constant(op, **kw) if op.is_constant else diagnose_variable(op, **kw)
