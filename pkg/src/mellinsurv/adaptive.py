"""Data-driven choice of the spectral cut-off by penalized contrast minimization.

The selected cut-off minimizes

    -||S_k||^2 + 2 chi sigma_Y Delta_g(k) / n,   sigma_Y = mean(Y),

over the admissible integer grid ``K_n``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .estimator import (
    DEFAULT_T_STEP,
    EstimatorConfig,
    SpectralPath,
    SurvivalEstimate,
    _check_sample,
    clip,
    delta_g_path,
    heuristic_from_path,
)
from .mellin import TGrid

THEORETICAL_CHI = 96.0
KN_RULES = ("delta_le_n", "delta_le_inv_n")


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty constant; ``use_theoretical`` replaces ``chi`` by 96.

    ``kn_rule`` picks the admissibility condition of the grid: ``delta_le_n``
    keeps ``k`` with ``Delta_g(k) <= n``; ``delta_le_inv_n`` uses ``<= 1/n``,
    which admits no ``k`` for the catalog errors and falls back to ``[1]``.
    """

    chi: float = 2.0
    use_theoretical: bool = False
    kn_rule: str = "delta_le_n"

    def __post_init__(self):
        if not self.chi > 0:
            raise DomainError("chi must be positive")
        if self.kn_rule not in KN_RULES:
            raise DomainError(f"unknown K_n rule {self.kn_rule!r}")

    @property
    def effective_chi(self) -> float:
        return THEORETICAL_CHI if self.use_theoretical else float(self.chi)


@dataclass(frozen=True)
class SelectionResult:
    k_hat: int
    ks: np.ndarray
    neg_norm2: np.ndarray
    penalty: np.ndarray
    total: np.ndarray
    sigma_y_hat: float
    chi: float

    def contrast(self, k: int):
        i = int(np.searchsorted(self.ks, k))
        if i >= self.ks.size or self.ks[i] != k:
            raise DomainError(f"k = {k} is not in the grid")
        return self.neg_norm2[i], self.penalty[i], self.total[i]


def _admissible(deltas: np.ndarray, n: int, rule: str) -> np.ndarray:
    bound = n if rule == "delta_le_n" else 1.0 / n
    ks = np.flatnonzero(deltas[1:] <= bound) + 1
    if ks.size == 0:
        return np.array([1], dtype=np.int64)
    # Delta_g is non-decreasing, so the admissible set is a prefix
    return np.arange(1, ks.max() + 1, dtype=np.int64)


def k_grid(n: int, error, h_t: float = DEFAULT_T_STEP, rule: str = "delta_le_n",
           k_cap: int | None = None) -> list[int]:
    """Admissible integer cut-offs ``{k <= n : Delta_g(k) <= n}``, or ``[1]`` if none."""
    if n < 1:
        raise DomainError("need n >= 1")
    if rule not in KN_RULES:
        raise DomainError(f"unknown K_n rule {rule!r}")
    top = n if k_cap is None else max(1, min(n, int(k_cap)))
    deltas = _delta_prefix(top, error, h_t, n, rule)
    return _admissible(deltas, n, rule).tolist()


def _delta_prefix(top: int, error, h_t: float, n: int, rule: str) -> np.ndarray:
    """``Delta_g(0..K)`` with ``K <= top`` large enough to decide admissibility.

    Grows the evaluated range geometrically so that severely ill-posed errors
    at large ``n`` do not evaluate the weight on the whole ``[0, n]``.
    """
    bound = n if rule == "delta_le_n" else 1.0 / n
    span = min(top, 64)
    while True:
        deltas = delta_g_path(span, error, h_t)
        if deltas[-1] > bound or span == top:
            return deltas
        span = min(top, 4 * span)


def sigma_y_hat(sample) -> float:
    """Sample mean of the observations."""
    return float(np.mean(_check_sample(sample)))


def _select(y: np.ndarray, error, pcfg: PenaltyConfig, ecfg: EstimatorConfig, path=None):
    n = y.size
    cap = ecfg.cap(n)
    deltas = _delta_prefix(max(1, min(n, int(cap))), error, ecfg.t_step, n, pcfg.kn_rule)
    ks = _admissible(deltas, n, pcfg.kn_rule)
    if path is None or path.grid.half_width < ks[-1]:
        path = SpectralPath(y, error, TGrid(float(ks[-1]), ecfg.t_step))
    chi = pcfg.effective_chi
    sig = float(np.mean(y))
    kf = ks.astype(np.float64)
    neg = -path.norm2(kf)
    pen = 2.0 * chi * sig * path.delta(kf) / n
    total = neg + pen
    best = int(np.argmin(total))  # first minimum: smallest k among ties
    return SelectionResult(int(ks[best]), ks, neg, pen, total, sig, chi), path


def select_k(sample, error, pcfg: PenaltyConfig | None = None, ecfg: EstimatorConfig | None = None,
             path: SpectralPath | None = None) -> SelectionResult:
    """Minimize the penalized contrast over the admissible grid.

    Ties go to the smallest ``k``. A precomputed ``path`` covering the grid
    may be passed to avoid recomputing the empirical Mellin transform.
    """
    return _select(_check_sample(sample), error, pcfg or PenaltyConfig(),
                   ecfg or EstimatorConfig(), path)[0]


def adaptive_estimate(sample, error, pcfg: PenaltyConfig | None = None,
                      ecfg: EstimatorConfig | None = None, x=None, variant: str = "clipped"):
    """Select ``k`` and return ``(estimate, selection)`` for the requested variant."""
    ecfg = ecfg or EstimatorConfig()
    sel, path = _select(_check_sample(sample), error, pcfg or PenaltyConfig(), ecfg)
    xs = ecfg.x_grid() if x is None else np.asarray(x, dtype=np.float64)
    return estimate_from_path(path, sel.k_hat, xs, variant), sel


def estimate_from_path(path: SpectralPath, k: float, x, variant: str) -> SurvivalEstimate:
    if variant == "raw":
        return path.estimate(k, x)
    if variant == "clipped":
        return clip(path.estimate(k, x))
    if variant == "heuristic":
        return heuristic_from_path(path, k, x)
    raise DomainError(f"unknown variant {variant!r}")
