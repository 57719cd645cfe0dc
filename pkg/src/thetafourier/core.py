"""Foundational types for (theta, T)-periodic calculus.

A function ``f`` on R^n is (theta, T)-periodic when ``f(x + T e_j) = theta_j f(x)``
for every axis ``j``.  Such a function is fully determined by its samples on the
left-closed box ``[0, T)^n`` together with ``theta``; everything else follows by
extension.

Grids are uniform with ``N`` nodes per axis, ``x_m = m T / N``.  Arrays of
samples are stored with shape ``(N,) * n`` and axis ``j`` of the array is
coordinate ``x_j``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

#: Smallest admissible modulus for a theta component.
THETA_FLOOR = 1e-300


class ThetaError(ValueError):
    """Invalid (theta, T) structure, grid or field."""


def _clean_complex(z: complex) -> complex:
    z = complex(z)
    # -0.0 imaginary parts would flip the principal Arg of negative reals to -pi
    re = z.real + 0.0
    im = z.imag + 0.0
    return complex(re, im)


@dataclass(frozen=True)
class ThetaSpec:
    """The pair (theta, T) together with a fixed branch of the logarithm.

    ``log(theta_j) = Log(theta_j) + 2*pi*i*log_branch[j]`` where ``Log`` is the
    principal logarithm with ``Arg`` in ``(-pi, pi]``.
    """

    theta: tuple[complex, ...]
    T: float
    log_branch: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        theta = tuple(_clean_complex(t) for t in np.atleast_1d(np.asarray(self.theta, dtype=complex)))
        if len(theta) not in (1, 2):
            raise ThetaError(f"dimension must be 1 or 2, got {len(theta)}")
        for t in theta:
            if not (cmath.isfinite(t) and abs(t) > THETA_FLOOR):
                raise ThetaError(f"theta components must be finite and nonzero, got {t!r}")
        T = float(self.T)
        if not (math.isfinite(T) and T > 0):
            raise ThetaError(f"period T must be positive, got {self.T!r}")
        branch = tuple(int(k) for k in self.log_branch) if len(self.log_branch) else (0,) * len(theta)
        if len(branch) != len(theta):
            raise ThetaError("log_branch length must match theta")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "log_branch", branch)
        for t, lg in zip(theta, self.log):
            if abs(cmath.exp(lg) - t) > 1e-12 * abs(t):
                raise ThetaError(f"log branch inconsistent for theta={t!r}")

    @classmethod
    def periodic(cls, n: int = 1, T: float = TWO_PI) -> "ThetaSpec":
        return cls((1.0,) * n, T)

    @property
    def n(self) -> int:
        return len(self.theta)

    @property
    def log(self) -> np.ndarray:
        """Branch-adjusted logarithms of theta, one per axis."""
        return np.array(
            [cmath.log(t) + 2j * math.pi * k for t, k in zip(self.theta, self.log_branch)],
            dtype=complex,
        )

    @property
    def log_abs(self) -> np.ndarray:
        return np.array([math.log(abs(t)) for t in self.theta])

    @property
    def shift(self) -> np.ndarray:
        """The vector ``i log(theta) / 2 pi`` that offsets the frequency lattice."""
        return 1j * self.log / TWO_PI

    def is_periodic(self) -> bool:
        return all(t == 1 for t in self.theta) and not any(self.log_branch)

    def to_json(self) -> dict:
        return {
            "theta": [[t.real, t.imag] for t in self.theta],
            "T": self.T,
            "log_branch": list(self.log_branch),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ThetaSpec":
        extra = set(obj) - {"theta", "T", "log_branch"}
        if extra:
            raise ThetaError(f"unknown keys in theta spec: {sorted(extra)}")
        theta = []
        for item in obj["theta"]:
            if isinstance(item, (int, float)):
                theta.append(complex(item))
            else:
                re, im = item
                theta.append(complex(re, im))
        return cls(tuple(theta), obj["T"], tuple(obj.get("log_branch", ())))


def shift_log_branch(spec: ThetaSpec, k: Sequence[int] | int) -> ThetaSpec:
    """Return ``spec`` with its logarithm branch moved by ``k`` turns per axis."""
    k = np.broadcast_to(np.asarray(k, dtype=int), (spec.n,))
    branch = tuple(int(a + b) for a, b in zip(spec.log_branch, k))
    return ThetaSpec(spec.theta, spec.T, branch)


@dataclass(frozen=True)
class GridSpec:
    """Uniform left-closed grid with ``N`` nodes per axis on ``[0, T)^n``."""

    n: int
    N: int

    def __post_init__(self) -> None:
        if self.n not in (1, 2):
            raise ThetaError(f"grid dimension must be 1 or 2, got {self.n}")
        if self.N < 4 or self.N & (self.N - 1):
            raise ThetaError(f"N must be a power of two >= 4, got {self.N}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    def nodes(self, T: float) -> np.ndarray:
        return np.arange(self.N) * (T / self.N)

    def mesh(self, T: float) -> tuple[np.ndarray, ...]:
        x = self.nodes(T)
        return tuple(np.meshgrid(*([x] * self.n), indexing="ij"))

    @property
    def nyquist_cutoff(self) -> int:
        return self.N // 2 - 1


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SampledField:
    """Samples of a (theta, T)-periodic function on the grid of ``[0, T)^n``."""

    grid: GridSpec
    values: np.ndarray
    theta_spec: ThetaSpec

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.size != self.grid.N ** self.grid.n:
            raise ThetaError(f"expected {self.grid.N ** self.grid.n} samples, got {values.size}")
        if self.theta_spec.n != self.grid.n:
            raise ThetaError("theta dimension does not match grid dimension")
        object.__setattr__(self, "values", _frozen(values.reshape(self.grid.shape)))

    @classmethod
    def from_function(cls, func, spec: ThetaSpec, N: int) -> "SampledField":
        """Sample ``func(*coords)`` on the grid; ``func`` must broadcast over arrays."""
        grid = GridSpec(spec.n, N)
        return cls(grid, np.asarray(func(*grid.mesh(spec.T)), dtype=complex) * np.ones(grid.shape), spec)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def N(self) -> int:
        return self.grid.N

    @property
    def T(self) -> float:
        return self.theta_spec.T

    def with_values(self, values: np.ndarray) -> "SampledField":
        return SampledField(self.grid, values, self.theta_spec)

    def retag(self, spec: ThetaSpec) -> "SampledField":
        return SampledField(self.grid, self.values, spec)

    def __add__(self, other: "SampledField") -> "SampledField":
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "SampledField") -> "SampledField":
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: complex) -> "SampledField":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class CoeffTable:
    """Fourier coefficients on the box ``|xi_j| <= cutoff``.

    ``values[xi + cutoff]`` holds the coefficient at lattice point ``xi``.
    ``truncated`` records that an index shift pushed nonzero entries out of the box.
    """

    values: np.ndarray
    theta_spec: ThetaSpec
    truncated: bool = False
    cutoff: int = field(init=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        n = self.theta_spec.n
        if values.ndim != n or len(set(values.shape)) != 1 or values.shape[0] % 2 == 0:
            raise ThetaError(f"coefficient array must be a centred odd cube of dimension {n}")
        if not np.all(np.isfinite(values)):
            raise ThetaError("coefficient table contains NaN or Inf")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "cutoff", values.shape[0] // 2)

    @classmethod
    def zeros(cls, spec: ThetaSpec, cutoff: int) -> "CoeffTable":
        return cls(np.zeros((2 * cutoff + 1,) * spec.n, dtype=complex), spec)

    @classmethod
    def from_entries(cls, entries: dict, spec: ThetaSpec, cutoff: int) -> "CoeffTable":
        """Build from a ``{xi: value}`` mapping; ``xi`` is an int (n=1) or tuple."""
        arr = np.zeros((2 * cutoff + 1,) * spec.n, dtype=complex)
        for xi, v in entries.items():
            xi = np.atleast_1d(xi)
            if np.any(np.abs(xi) > cutoff):
                raise ThetaError(f"mode {tuple(xi)} lies outside the cutoff box {cutoff}")
            arr[tuple(xi + cutoff)] = v
        return cls(arr, spec)

    @property
    def n(self) -> int:
        return self.theta_spec.n

    def index_grids(self) -> tuple[np.ndarray, ...]:
        """Lattice coordinates of every entry, each broadcast to the table shape."""
        k = np.arange(-self.cutoff, self.cutoff + 1)
        return tuple(np.meshgrid(*([k] * self.n), indexing="ij"))

    def __getitem__(self, xi) -> complex:
        xi = np.atleast_1d(xi)
        if np.any(np.abs(xi) > self.cutoff):
            return 0j
        return complex(self.values[tuple(xi + self.cutoff)])

    def items(self) -> Iterator[tuple[tuple[int, ...], complex]]:
        grids = self.index_grids()
        for idx in np.ndindex(self.values.shape):
            yield tuple(int(g[idx]) for g in grids), complex(self.values[idx])

    def with_values(self, values: np.ndarray, truncated: bool | None = None) -> "CoeffTable":
        return CoeffTable(values, self.theta_spec, self.truncated if truncated is None else truncated)

    def resized(self, cutoff: int) -> "CoeffTable":
        """Zero-pad or crop to a new cutoff (cropping must only drop zeros)."""
        out = np.zeros((2 * cutoff + 1,) * self.n, dtype=complex)
        m = min(cutoff, self.cutoff)
        src = tuple(slice(self.cutoff - m, self.cutoff + m + 1) for _ in range(self.n))
        dst = tuple(slice(cutoff - m, cutoff + m + 1) for _ in range(self.n))
        out[dst] = self.values[src]
        return CoeffTable(out, self.theta_spec, self.truncated)

    def __add__(self, other: "CoeffTable") -> "CoeffTable":
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "CoeffTable") -> "CoeffTable":
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: complex) -> "CoeffTable":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


def trig_interpolate(values: np.ndarray, points: np.ndarray, axis_period: float = TWO_PI) -> np.ndarray:
    """Evaluate the trigonometric interpolant of periodic samples at arbitrary points.

    ``values`` has shape ``(N,) * n``; ``points`` has shape ``(..., n)`` in units
    where the period is ``axis_period``.  The Nyquist mode is split symmetrically
    so that real data interpolate to real values.
    """
    values = np.asarray(values, dtype=complex)
    n = values.ndim
    N = values.shape[0]
    pts = np.asarray(points, dtype=float).reshape(-1, n) * (TWO_PI / axis_period)
    coef = np.fft.fftn(values) / values.size
    k = np.fft.fftfreq(N, 1.0 / N)
    nyq = N // 2
    # basis matrices per axis: e^{i k y}, Nyquist column replaced by cos
    mats = []
    for j in range(n):
        E = np.exp(1j * np.outer(pts[:, j], k))
        E[:, nyq] = np.cos(nyq * pts[:, j])
        mats.append(E)
    if n == 1:
        out = mats[0] @ coef
    else:
        out = np.einsum("pa,ab,pb->p", mats[0], coef, mats[1], optimize=True)
    return out.reshape(np.asarray(points).shape[:-1]) if np.ndim(points) > 1 else out


def weight_exponent(spec: ThetaSpec, x: np.ndarray) -> np.ndarray:
    """``x . log(theta) / T`` for points ``x`` of shape ``(..., n)``."""
    return np.asarray(x, dtype=float) @ spec.log / spec.T


def extend_field(f: SampledField, x) -> complex | np.ndarray:
    """Evaluate the (theta, T)-periodic extension of ``f`` at ``x``.

    ``x`` is a point of R^n (scalar allowed when n=1) or an array of points with
    trailing dimension n.  The conjugated periodic part is interpolated
    trigonometrically, the exponential weight restored, and the integer period
    offsets folded back in as powers of theta.
    """
    spec = f.theta_spec
    pts = np.asarray(x, dtype=float)
    scalar = pts.ndim == 0 or (pts.ndim == 1 and f.n > 1 and pts.shape[0] == f.n)
    pts = pts.reshape(-1, f.n)
    m = np.floor(pts / spec.T)
    y = pts - m * spec.T
    # samples of the conjugated field on the 2pi grid
    mesh = f.grid.mesh(spec.T)
    w = np.exp(-sum(mesh[j] * spec.log[j] for j in range(f.n)) / spec.T)
    periodic = trig_interpolate(f.values * w, y, axis_period=spec.T)
    out = periodic * np.exp(weight_exponent(spec, y) + m @ spec.log)
    if scalar:
        return complex(out[0])
    return out.reshape(np.asarray(x).shape[:-1] if f.n > 1 else np.asarray(x).shape)
