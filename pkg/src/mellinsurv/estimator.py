"""Spectral cut-off survival estimators built on the empirical Mellin transform.

With observations ``Y_j = X_j U_j`` and known noise density ``g``, the raw
estimator is

    S_k(x) = (2 pi)^-1 int_{-k}^{k} x^(-1/2-it) Mhat(t) / ((1/2+it) M_{3/2}[g](t)) dt,

``Mhat(t) = n^-1 sum_j Y_j^(1/2+it)``. The integrand is Hermitian, so all
frequency sums run over ``t >= 0`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateEstimate, DomainError, G0Violation
from .mellin import MellinSeries, TGrid

DEFAULT_T_STEP = 1.0 / 128.0
G0_FLOOR = 1e-14
VARIANTS = ("raw", "clipped", "heuristic")


@dataclass(frozen=True)
class EstimatorConfig:
    """Discretization settings.

    ``x_max=None`` defers to the caller (the target's ``x_max_eff`` in
    simulations, twice the sample maximum for user data); ``k_max=None``
    caps the cut-off at the sample size.
    """

    t_step: float = DEFAULT_T_STEP
    x_min: float = 1e-3
    x_max: float | None = None
    n_x: int = 2000
    k_max: float | None = None

    def __post_init__(self):
        if not self.t_step > 0:
            raise DomainError("t_step must be positive")
        if not self.x_min > 0:
            raise DomainError("x_min must be positive")
        if self.n_x < 2:
            raise DomainError("n_x must be at least 2")
        if self.x_max is not None and not self.x_max > self.x_min:
            raise DomainError("x_max must exceed x_min")

    def x_grid(self, x_max: float | None = None) -> np.ndarray:
        top = self.x_max if self.x_max is not None else x_max
        if top is None:
            raise DomainError("no x_max configured")
        if not top > self.x_min:
            raise DomainError("x_max must exceed x_min")
        return np.linspace(self.x_min, top, self.n_x)

    def cap(self, n: int) -> float:
        return float(n) if self.k_max is None else float(self.k_max)


@dataclass(frozen=True)
class SurvivalEstimate:
    """An estimator evaluated on an x-grid.

    ``coeffs`` always holds the raw Mellin-domain coefficients
    ``Mhat(t) / ((1/2+it) M_{3/2}[g](t))`` on ``[-k, k]`` at ``c = 1/2``.
    """

    k: float
    coeffs: MellinSeries
    x: np.ndarray
    values: np.ndarray
    variant: str = "raw"


def _check_sample(sample) -> np.ndarray:
    y = np.asarray(sample, dtype=np.float64).ravel()
    if y.size == 0:
        raise DomainError("empty sample")
    bad = np.flatnonzero(~(y > 0) | ~np.isfinite(y))
    if bad.size:
        raise DomainError(f"sample entry {bad[0]} is not a positive finite number: {y[bad[0]]!r}")
    return y


def empirical_mellin(sample, t):
    """``n^-1 sum_j Y_j^(1/2+it)`` at scalar or array ``t``."""
    y = _check_sample(sample)
    root, logy = np.sqrt(y), np.log(y)
    t_arr = np.asarray(t, dtype=np.float64)
    out = np.exp(1j * np.multiply.outer(t_arr, logy)) @ root / y.size
    return complex(out) if t_arr.ndim == 0 else out


def empirical_mellin_grid(sample, step: float, count: int) -> np.ndarray:
    """``Mhat`` at ``t = 0, step, ..., (count-1)*step`` via the compiled kernel."""
    y = _check_sample(sample)
    return kernels.exp_sum_grid(np.sqrt(y) / y.size, np.log(y), float(step), int(count))


def _error_factor(error, t: np.ndarray) -> np.ndarray:
    """``(1/2+it) M_{3/2}[g](t)`` on nodes ``t``, with the [G0] check."""
    mg = np.asarray(error.mellin_g_32(t), dtype=np.complex128)
    mod = np.abs(mg)
    low = np.flatnonzero(~(mod >= G0_FLOOR))
    if low.size:
        raise G0Violation(t[low[0]], mod[low[0]])
    return (0.5 + 1j * t) * mg


def _half_trapezoid(values: np.ndarray, step: float) -> np.ndarray:
    """Cumulative ``int_0^{t_j}`` of samples on ``0, step, ...`` (trapezoid)."""
    out = np.empty(values.size)
    out[0] = 0.0
    if values.size > 1:
        out[1:] = step * (np.cumsum(values)[1:] - 0.5 * values[0] - 0.5 * values[1:])
    return out


def delta_g(k: float, error, h_t: float = DEFAULT_T_STEP) -> float:
    """``(2 pi)^-1 int_{-k}^{k} |(1/2+it) M_{3/2}[g](t)|^-2 dt`` on the trapezoid grid."""
    if k <= 0:
        return 0.0
    grid = TGrid.for_cutoff(k, h_t)
    t = grid.half_nodes
    w = np.abs(_error_factor(error, t)) ** -2
    return float(_half_trapezoid(w, grid.step)[-1] / math.pi)


def delta_g_path(k_max: int, error, h_t: float = DEFAULT_T_STEP) -> np.ndarray:
    """``delta_g(k)`` for ``k = 0, 1, ..., k_max`` from one nested grid (``1/h_t`` integral)."""
    per = int(round(1.0 / h_t))
    if abs(per * h_t - 1.0) > 1e-12:
        raise DomainError("nested cut-off grids need 1/h_t to be an integer")
    t = h_t * np.arange(k_max * per + 1, dtype=np.float64)
    cum = _half_trapezoid(np.abs(_error_factor(error, t)) ** -2, h_t) / math.pi
    return cum[::per]


class SpectralPath:
    """Empirical Mellin transform of one sample on a half-grid ``[0, k_max]``.

    Every cut-off ``k`` on the grid (a multiple of the step) reuses the same
    coefficients, so norms and penalties for a whole family of cut-offs cost
    one kernel evaluation.
    """

    def __init__(self, sample, error, grid: TGrid):
        self.sample = _check_sample(sample)
        self.error = error
        self.grid = grid
        self.t = grid.half_nodes
        self.mhat = empirical_mellin_grid(self.sample, grid.step, self.t.size)
        self.factor = _error_factor(error, self.t)
        self.coeffs = self.mhat / self.factor
        self._norm_cum = _half_trapezoid(np.abs(self.coeffs) ** 2, grid.step) / math.pi
        self._delta_cum = _half_trapezoid(np.abs(self.factor) ** -2, grid.step) / math.pi

    @property
    def n(self) -> int:
        return self.sample.size

    def index(self, k) -> np.ndarray:
        j = np.asarray(k, dtype=np.float64) / self.grid.step
        idx = np.rint(j).astype(np.int64)
        if np.any(np.abs(j - idx) > 1e-9 * np.maximum(1.0, j)) or np.any(idx > self.t.size - 1):
            raise DomainError("cut-off is not a node of this path's grid")
        return idx

    def norm2(self, k):
        """``||S_k||^2`` via Plancherel on the nested grid."""
        return self._norm_cum[self.index(k)]

    def delta(self, k):
        return self._delta_cum[self.index(k)]

    def series(self, k: float) -> MellinSeries:
        j = int(self.index(k))
        return MellinSeries.from_half(TGrid(k, self.grid.step), self.coeffs[: j + 1], 0.5)

    def _invert_half(self, half: np.ndarray, x: np.ndarray) -> np.ndarray:
        w = np.ones(half.size)
        w[0] = w[-1] = 0.5
        step = self.grid.step
        poly = kernels.poly_eval(np.ascontiguousarray(w * half), np.log(x), step)
        return (step / math.pi) * np.power(x, -0.5) * poly.real

    def values(self, k: float, x) -> np.ndarray:
        """Raw ``S_k`` at positive ``x``."""
        x = np.asarray(x, dtype=np.float64)
        if np.any(~(x > 0)):
            raise DomainError("estimates are evaluated at x > 0")
        j = int(self.index(k))
        return self._invert_half(self.coeffs[: j + 1], x)

    def density_part(self, k: float, x) -> np.ndarray:
        """``p_k(x) = (2 pi)^-1 int x^(-1/2-it) Mhat(t) / M_{3/2}[g](t) dt``."""
        x = np.asarray(x, dtype=np.float64)
        j = int(self.index(k))
        return self._invert_half(self.coeffs[: j + 1] * (0.5 + 1j * self.t[: j + 1]), x)

    def estimate(self, k: float, x) -> SurvivalEstimate:
        x = np.asarray(x, dtype=np.float64)
        return SurvivalEstimate(float(k), self.series(k), x, self.values(k, x), "raw")


def _path_for(sample, error, k: float, cfg: EstimatorConfig) -> SpectralPath:
    y = _check_sample(sample)
    if not k > 0:
        raise DomainError("cut-off k must be positive")
    cap = cfg.cap(y.size)
    if k > cap * (1 + 1e-12):
        raise DomainError(f"cut-off {k} exceeds k_max {cap}")
    return SpectralPath(y, error, TGrid.for_cutoff(k, cfg.t_step))


def spectral_cutoff(sample, error, k: float, cfg: EstimatorConfig, x=None) -> SurvivalEstimate:
    """Raw spectral cut-off estimate on ``x`` (default: ``cfg.x_grid()``)."""
    path = _path_for(sample, error, k, cfg)
    xs = cfg.x_grid() if x is None else np.asarray(x, dtype=np.float64)
    return path.estimate(path.grid.half_width, xs)


def estimate_norm2(est: SurvivalEstimate) -> float:
    """``||S_k||^2`` computed in the Mellin domain from the coefficients."""
    if est.variant != "raw":
        raise DomainError("the Plancherel norm is defined for the raw estimate only")
    grid = est.coeffs.grid
    half = est.coeffs.values[grid.half_count:]
    return float(_half_trapezoid(np.abs(half) ** 2, grid.step)[-1] / math.pi)


def clip(est: SurvivalEstimate) -> SurvivalEstimate:
    """Clamp values to ``[0, 1]``."""
    if est.variant == "heuristic":
        raise DomainError("clip applies to raw or clipped estimates")
    return SurvivalEstimate(est.k, est.coeffs, est.x, np.clip(est.values, 0.0, 1.0), "clipped")


def heuristic_from_path(path: SpectralPath, k: float, x) -> SurvivalEstimate:
    """Monotone estimate ``S~(x) / S~(x_min)`` with ``S~(x) = int_x^{x_max} (p_k(y))_+ y^-1 dy``.

    The tail integral stops at the last grid point. It is evaluated in
    ``u = log y`` (where ``dy / y = du``) on a log-uniform auxiliary grid fine
    enough to resolve oscillations at frequency ``k``, then interpolated onto ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    lo, hi = math.log(x[0]), math.log(x[-1])
    n_u = max(4 * x.size, int(math.ceil((hi - lo) * k * 16 / (2 * math.pi))) + 1)
    u = np.linspace(lo, hi, n_u)
    p = np.maximum(path.density_part(k, np.exp(u)), 0.0)
    du = u[1] - u[0]
    seg = 0.5 * du * (p[1:] + p[:-1])
    tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    if not tail[0] > 0:
        raise DegenerateEstimate("positive part of the density estimate vanishes on the grid")
    values = np.interp(np.log(x), u, tail / tail[0])
    values[0] = 1.0
    return SurvivalEstimate(float(k), path.series(k), x, values, "heuristic")


def heuristic_survival(sample, error, k: float, cfg: EstimatorConfig, x=None) -> SurvivalEstimate:
    """Heuristic survival-function estimate; non-increasing and equal to 1 at ``x_min``."""
    path = _path_for(sample, error, k, cfg)
    xs = cfg.x_grid() if x is None else np.asarray(x, dtype=np.float64)
    return heuristic_from_path(path, path.grid.half_width, xs)


def empirical_survival(sample, x):
    """Fraction of observations strictly greater than ``x``."""
    s = np.sort(np.asarray(sample, dtype=np.float64))
    x_arr = np.asarray(x, dtype=np.float64)
    out = (s.size - np.searchsorted(s, x_arr, side="right")) / s.size
    return float(out) if x_arr.ndim == 0 else out
