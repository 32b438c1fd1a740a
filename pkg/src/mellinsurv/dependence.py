"""AR(1) process with Gamma marginals and its dependence diagnostics.

The process is ``X_n = rho X_{n-1} + eps_n`` where ``eps_n | B_n ~ Gamma(B_n, lam)``
and ``B_n ~ Binomial(m, 1 - rho)``; its stationary marginal is ``Gamma(m, lam)``.
Written as a Bernoulli shift ``X_n = sum_j rho^j eps_{n-j}``, replacing the
innovation ``k`` steps back by an independent copy moves ``X_n`` by at most
``rho^k |eps - eps*|``, so the functional dependence measure obeys

    delta_p(k) <= 2 rho^k ||eps_1||_p.

Beta-mixing coefficients are not computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import DomainError, UnsupportedConfiguration


@dataclass(frozen=True)
class Ar1GammaConfig:
    m: int
    lam: float
    rho: float

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError("m must be an integer >= 1")
        if not self.lam > 0:
            raise DomainError("lam must be positive")
        if not abs(self.rho) < 1:
            raise DomainError("need |rho| < 1")

    @property
    def marginal_mean(self) -> float:
        return self.m / self.lam


def sample_ar1_gamma(n: int, cfg: Ar1GammaConfig, rng) -> np.ndarray:
    """A stationary path ``X_1..X_n`` started from ``X_0 ~ Gamma(m, lam)``."""
    if n < 1:
        raise DomainError("need n >= 1")
    if cfg.rho < 0:
        raise UnsupportedConfiguration("the binomial thinning construction needs rho >= 0")
    scale = 1.0 / cfg.lam
    x0 = rng.gamma(cfg.m, scale)
    b = rng.binomial(cfg.m, 1.0 - cfg.rho, size=n)
    # Gamma(0, lam) is the point mass at zero; numpy returns 0 for shape 0
    eps = rng.gamma(b.astype(np.float64), scale)
    path, _ = lfilter([1.0], [1.0, -cfg.rho], eps, zi=[cfg.rho * x0])
    return path


def innovation_moments(cfg: Ar1GammaConfig) -> tuple[float, float]:
    """``(E eps, E eps^2)`` of the compound Binomial-Gamma innovation."""
    p = 1.0 - cfg.rho
    mean_b = cfg.m * p
    second_b = cfg.m * p * (1.0 - p) + mean_b ** 2
    # E[eps^2 | B] = B (B + 1) / lam^2
    return mean_b / cfg.lam, (second_b + mean_b) / cfg.lam ** 2


def innovation_norm(cfg: Ar1GammaConfig, p: int) -> float:
    """``||eps_1||_p`` for ``p`` in {1, 2}."""
    first, second = innovation_moments(cfg)
    if p == 1:
        return first  # eps >= 0
    if p == 2:
        return math.sqrt(second)
    raise DomainError("p must be 1 or 2")


def fdm_bound(k: int, cfg: Ar1GammaConfig, p: int) -> float:
    """Upper bound ``2 |rho|^k ||eps_1||_p`` on ``delta_p(k)``."""
    if k < 0:
        raise DomainError("need k >= 0")
    return 2.0 * abs(cfg.rho) ** k * innovation_norm(cfg, p)


@dataclass(frozen=True)
class FdmSums:
    """Sums over ``k >= 0`` of the dependence bounds.

    ``sum_delta2`` and ``sum_delta1_sqrt`` carry the constants of
    :func:`fdm_bound`; the ``geometric_*`` fields are the bare series
    ``sum |rho|^k`` and ``sum |rho|^(k/2)``.
    """

    sum_delta2: float
    sum_delta1_sqrt: float
    geometric_delta2: float
    geometric_delta1_sqrt: float


def fdm_sums(cfg: Ar1GammaConfig) -> FdmSums:
    r = abs(cfg.rho)
    geo2 = 1.0 / (1.0 - r)
    geo1 = 1.0 / (1.0 - math.sqrt(r))
    return FdmSums(
        sum_delta2=2.0 * innovation_norm(cfg, 2) * geo2,
        sum_delta1_sqrt=math.sqrt(2.0 * innovation_norm(cfg, 1)) * geo1,
        geometric_delta2=geo2,
        geometric_delta1_sqrt=geo1,
    )


def holder_constant(t) -> float:
    """``L(t) = 1 + 4 sqrt(|t|)``: ``|x^(1/2+it) - y^(1/2+it)| <= L(t) |x - y|^(1/2)``."""
    return 1.0 + 4.0 * np.sqrt(np.abs(t))


@dataclass(frozen=True)
class DependenceDiagnostics:
    cfg: Ar1GammaConfig

    def delta1_bound(self, k: int) -> float:
        return fdm_bound(k, self.cfg, 1)

    def delta2_bound(self, k: int) -> float:
        return fdm_bound(k, self.cfg, 2)

    @property
    def sums(self) -> FdmSums:
        return fdm_sums(self.cfg)

    @property
    def sum_delta1_sqrt(self) -> float:
        return self.sums.sum_delta1_sqrt

    @property
    def sum_delta2(self) -> float:
        return self.sums.sum_delta2

    @staticmethod
    def holder_L(t) -> float:
        return holder_constant(t)
