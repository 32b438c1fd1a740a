"""Mellin-transform numerics on uniform frequency grids.

Conventions: the Mellin transform developed at ``c`` is
``M_c[h](t) = int_0^inf x^(c-1+it) h(x) dx`` and its inverse is
``(2 pi)^-1 int x^(-c-it) H(t) dt``. Frequency integrals over ``[-k, k]`` use
the trapezoid rule on a symmetric grid; x-space oracle integrals use the
trapezoid rule in ``u = log x``, split at the integrand's breakpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError

# relative threshold for the imaginary residual of a Hermitian inversion
IMAG_TOL = 1e-8


@dataclass(frozen=True)
class TGrid:
    """Symmetric uniform grid ``t_j = -k + j*step`` on ``[-k, k]``."""

    half_width: float
    step: float

    def __post_init__(self):
        if not (self.half_width > 0 and self.step > 0):
            raise DomainError("grid half-width and step must be positive")
        ratio = self.half_width / self.step
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise DomainError(
                f"half-width {self.half_width!r} is not a multiple of step {self.step!r}"
            )

    @classmethod
    def for_cutoff(cls, k: float, step: float) -> "TGrid":
        """Grid on ``[-k, k]`` with the largest step not exceeding ``step`` that hits ``k``."""
        if not (k > 0 and step > 0):
            raise DomainError("cut-off and step must be positive")
        m = math.ceil(k / step - 1e-9)
        return cls(k, k / m)

    @property
    def half_count(self) -> int:
        """Number of intervals on ``[0, k]``."""
        return int(round(self.half_width / self.step))

    @property
    def size(self) -> int:
        return 2 * self.half_count + 1

    @property
    def nodes(self) -> np.ndarray:
        m = self.half_count
        return self.step * np.arange(-m, m + 1, dtype=np.float64)

    @property
    def half_nodes(self) -> np.ndarray:
        """Non-negative nodes ``0, step, ..., k``."""
        return self.step * np.arange(self.half_count + 1, dtype=np.float64)

    def weights(self) -> np.ndarray:
        """Trapezoid weights for ``int_{-k}^{k}`` on :attr:`nodes`."""
        w = np.full(self.size, self.step)
        w[0] = w[-1] = 0.5 * self.step
        return w


@dataclass(frozen=True)
class MellinSeries:
    """Values of a Mellin-domain function on a :class:`TGrid`."""

    grid: TGrid
    values: np.ndarray
    c: float = 0.5

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (self.grid.size,):
            raise DomainError(
                f"series has {values.size} values for a grid of {self.grid.size} nodes"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func, grid: TGrid, c: float = 0.5) -> "MellinSeries":
        return cls(grid, np.asarray(func(grid.nodes), dtype=np.complex128), c)

    @classmethod
    def from_half(cls, grid: TGrid, half_values, c: float = 0.5) -> "MellinSeries":
        """Build a Hermitian series from its values on ``t >= 0``."""
        half = np.asarray(half_values, dtype=np.complex128)
        full = np.concatenate([np.conj(half[:0:-1]), half])
        return cls(grid, full, c)

    def hermitian_defect(self) -> float:
        """max |H(-t) - conj(H(t))|."""
        v = self.values
        return float(np.max(np.abs(v[::-1] - np.conj(v)))) if v.size else 0.0


@dataclass(frozen=True)
class QuadratureConfig:
    """x-space trapezoid settings for oracle integrals.

    Nodes are uniform in ``log x`` on ``[x_min, x_max]``, split at
    ``breakpoints`` (integrand discontinuities), with about ``n_x`` nodes total.
    """

    x_min: float = 1e-8
    x_max: float = 100.0
    n_x: int = 200_001
    rule: str = "trapezoid"
    breakpoints: tuple = field(default=())

    def __post_init__(self):
        if not (0 < self.x_min < self.x_max):
            raise DomainError("need 0 < x_min < x_max")
        if self.n_x < 2:
            raise DomainError("need n_x >= 2")
        if self.rule != "trapezoid":
            raise DomainError(f"unknown quadrature rule {self.rule!r}")

    def with_breakpoints(self, extra) -> "QuadratureConfig":
        return QuadratureConfig(
            self.x_min, self.x_max, self.n_x, self.rule, tuple(self.breakpoints) + tuple(extra)
        )

    def segments(self):
        """Yield ``(x, w)`` per smooth segment with ``sum(w * F(x)) ~ int F dx``.

        Segment end nodes sit a relative 1e-13 inside the segment so that
        discontinuous integrands are sampled by their one-sided limits.
        """
        lo, hi = math.log(self.x_min), math.log(self.x_max)
        cuts = sorted({math.log(b) for b in self.breakpoints if self.x_min < b < self.x_max})
        edges = [lo, *cuts, hi]
        total = hi - lo
        for a, b in zip(edges[:-1], edges[1:]):
            m = max(2, int(round(self.n_x * (b - a) / total)))
            u = np.linspace(a, b, m)
            du = u[1] - u[0]
            x = np.exp(u)
            x[0] *= 1.0 + 1e-13
            x[-1] *= 1.0 - 1e-13
            w = np.full(m, du)
            w[0] = w[-1] = 0.5 * du
            yield x, w * x

    def nodes(self):
        xs, ws = zip(*self.segments())
        return np.concatenate(xs), np.concatenate(ws)


def mellin_numeric(h, c: float, t, q: QuadratureConfig):
    """Quadrature approximation of ``M_c[h](t)``; ``t`` may be an array.

    Only meant as a test oracle for closed forms: accuracy is controlled by
    ``q`` (support coverage, breakpoints, node count).
    """
    x, w = q.nodes()
    base = w * np.power(x, c - 1.0) * np.asarray(h(x), dtype=np.float64)
    logx = np.log(x)
    t_arr = np.asarray(t, dtype=np.float64).ravel()
    out = np.empty(t_arr.size, dtype=np.complex128)
    rows = max(1, (1 << 22) // x.size)
    for s in range(0, t_arr.size, rows):
        tt = t_arr[s:s + rows]
        out[s:s + rows] = np.exp(1j * np.multiply.outer(tt, logx)) @ base
    return out[0] if np.ndim(t) == 0 else out.reshape(np.shape(t))


def mellin_inverse(series: MellinSeries, x) -> np.ndarray:
    """Real part of the truncated inverse transform at each ``x`` (array).

    Under ``__debug__`` the imaginary residual is checked against
    :data:`IMAG_TOL` relative to the absolute integral of the integrand.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(~(x > 0)):
        raise DomainError("inverse Mellin transform needs x > 0")
    grid = series.grid
    wv = grid.weights() * series.values
    ell = np.log(x)
    poly = kernels.poly_eval(np.ascontiguousarray(wv), ell, grid.step)
    scale = np.power(x, -series.c) / (2.0 * np.pi)
    val = scale * np.exp(1j * grid.half_width * ell) * poly
    if __debug__:
        mag = scale * float(np.sum(np.abs(wv)))
        bad = np.abs(val.imag) > IMAG_TOL * np.maximum(mag, np.finfo(float).tiny)
        assert not np.any(bad), (
            f"inverse Mellin transform has imaginary residual {np.max(np.abs(val.imag)):.3e}; "
            "series is not Hermitian"
        )
    return val.real


def mellin_inverse_at(series: MellinSeries, x: float) -> float:
    """``(2 pi)^-1 int_{-k}^{k} x^(-c-it) H(t) dt`` by the trapezoid rule on the series grid."""
    if not x > 0:
        raise DomainError("inverse Mellin transform needs x > 0")
    return float(mellin_inverse(series, np.array([x]))[0])


def plancherel_norm2(series: MellinSeries) -> float:
    """``(2 pi)^-1 int_{-k}^{k} |H(t)|^2 dt``: squared weighted L2 norm of the band-limited inverse."""
    grid = series.grid
    return float(np.dot(grid.weights(), np.abs(series.values) ** 2) / (2.0 * np.pi))


def mult_convolve_numeric(h1, h2, y, q: QuadratureConfig, h1_breakpoints=()):
    """``(h1 * h2)(y) = int_0^inf h1(y/x) h2(x) x^-1 dx`` by quadrature; ``y`` may be an array.

    ``q.breakpoints`` should list the discontinuities of ``h2``; those of ``h1``
    are given separately since they move with ``y`` (``x = y / b``).
    """
    y_arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if np.any(~(y_arr > 0)):
        raise DomainError("multiplicative convolution is evaluated at y > 0")
    out = np.empty(y_arr.size)
    for i, yy in enumerate(y_arr):
        qy = q.with_breakpoints([yy / b for b in h1_breakpoints if b > 0])
        x, w = qy.nodes()
        out[i] = np.dot(w / x, np.asarray(h1(yy / x)) * np.asarray(h2(x)))
    return float(out[0]) if np.ndim(y) == 0 else out.reshape(np.shape(y))
