"""Catalog of target and error distributions with closed-form Mellin transforms.

Each model exposes its Mellin transform at an arbitrary development point
``c`` through ``mellin(t, c)``; the transforms used by the estimator are
``M_{3/2}[f]``, ``M_{1/2}[S] = M_{3/2}[f] / (1/2 + it)`` and ``M_{3/2}[g]``.

Catalog keys
------------
=================  =========================================  ==============
key                distribution                               x_max_eff
=================  =========================================  ==============
gamma_4_05         Gamma(shape 4, rate 0.5)                   ~ 31.8
weibull_2          Weibull(shape 2, scale 1)                  ~ 3.03
beta_4_5_scaled    2 * Beta(4, 5) on (0, 2)                   ~ 1.85
loggamma_0_4_3     exp(Gamma(shape 4, rate 3))                ~ 201
unif_0_1           Uniform(0, 1)                      gamma = 1
unif_half_3half    Uniform(1/2, 3/2)                  gamma = 1
beta_1_2           density 2(1 - u) on (0, 1)         gamma = 2
=================  =========================================  ==============

``x_max_eff`` is the 1 - 1e-4 quantile of the target, so ``S(x_max_eff) <= 1e-4``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special, stats

from .errors import DomainError
from .mellin import QuadratureConfig
from .special import complex_log_gamma

TAIL_PROB = 1e-4


def _s(t, c):
    return (c - 1.0) + 1j * np.asarray(t, dtype=np.float64)


@dataclass(frozen=True)
class TargetModel:
    """Ground-truth law of the latent variable X."""

    name: str
    density: Callable
    survival: Callable
    mellin: Callable  # (t, c) -> M_c[f](t)
    sampler: Callable  # (rng, n) -> array
    x_max_eff: float
    mean: float
    quad: QuadratureConfig
    params: dict = field(default_factory=dict)

    def cdf(self, x):
        return 1.0 - self.survival(x)

    def mellin_f_32(self, t):
        return self.mellin(t, 1.5)

    def mellin_S_12(self, t):
        return self.mellin(t, 1.5) / (0.5 + 1j * np.asarray(t, dtype=np.float64))

    def sample(self, rng, n):
        return sample_target(self, n, rng)


@dataclass(frozen=True)
class ErrorModel:
    """Known law of the multiplicative noise U.

    ``g1_lower`` and ``g1_upper`` bracket ``|M_{3/2}[g](t)| (1 + t^2)^(gamma/2)``
    on the whole real line.
    """

    name: str
    density: Callable | None
    cdf: Callable
    mellin: Callable
    gamma_exponent: float
    sampler: Callable
    sigma_U: float
    xg_sup: float
    g1_lower: float
    g1_upper: float
    quad: QuadratureConfig | None = None
    params: dict = field(default_factory=dict)

    def mellin_g_32(self, t):
        return self.mellin(t, 1.5)

    def sample(self, rng, n):
        return sample_error(self, n, rng)


# ---------------------------------------------------------------------------
# target families

def _quantile_cap(ppf, survival):
    x = float(ppf(1.0 - TAIL_PROB))
    while survival(x) > TAIL_PROB:
        x = math.nextafter(x, math.inf) * (1.0 + 1e-12)
    return x


def gamma_target(shape: float, rate: float, name: str | None = None) -> TargetModel:
    """Gamma(shape, rate): ``M_c[f](t) = Gamma(shape+c-1+it) rate^-(c-1+it) / Gamma(shape)``."""
    if not (shape > 0 and rate > 0):
        raise DomainError("gamma target needs shape > 0 and rate > 0")
    dist = stats.gamma(shape, scale=1.0 / rate)

    def mellin(t, c):
        if c <= 1.0 - shape:
            raise DomainError(f"Mellin transform undefined at c={c} for shape {shape}")
        s = _s(t, c)
        return np.exp(complex_log_gamma(shape + s) - special.gammaln(shape) - s * math.log(rate))

    def sampler(rng, n):
        return rng.gamma(shape, 1.0 / rate, size=n)

    x_eff = _quantile_cap(dist.ppf, dist.sf)
    return TargetModel(
        name=name or f"gamma(shape={shape:g},rate={rate:g})",
        density=dist.pdf,
        survival=dist.sf,
        mellin=mellin,
        sampler=sampler,
        x_max_eff=x_eff,
        mean=shape / rate,
        quad=QuadratureConfig(1e-8, float(dist.isf(1e-18)) * 1.5),
        params={"shape": shape, "rate": rate},
    )


def weibull_target(m: float, name: str | None = None) -> TargetModel:
    """Weibull with shape ``m`` and unit scale: ``M_c[f](t) = Gamma(1 + (c-1+it)/m)``."""
    if not m > 0:
        raise DomainError("weibull target needs m > 0")
    dist = stats.weibull_min(m)

    def mellin(t, c):
        if c <= 1.0 - m:
            raise DomainError(f"Mellin transform undefined at c={c} for shape {m}")
        # ((c-1+it)/m) Gamma((c-1+it)/m) written without the removable pole
        return np.exp(complex_log_gamma(1.0 + _s(t, c) / m))

    def sampler(rng, n):
        return rng.weibull(m, size=n)

    return TargetModel(
        name=name or f"weibull(m={m:g})",
        density=dist.pdf,
        survival=dist.sf,
        mellin=mellin,
        sampler=sampler,
        x_max_eff=_quantile_cap(dist.ppf, dist.sf),
        mean=math.gamma(1.0 + 1.0 / m),
        quad=QuadratureConfig(1e-8, float(dist.isf(1e-18)) * 1.5),
        params={"m": m},
    )


def scaled_beta_target(p: float, q: float, scale: float = 1.0, name: str | None = None) -> TargetModel:
    """``scale * Beta(p, q)``: ``M_c[f](t) = scale^s B(p+s, q) / B(p, q)`` with ``s = c-1+it``.

    ``scaled_beta_target(1, b)`` is the Beta(1, b) family; ``(4, 5, 2)`` is the
    normalized version of the catalog's Beta target (density constant 140).
    """
    if not (p > 0 and q > 0 and scale > 0):
        raise DomainError("beta target needs p, q, scale > 0")
    dist = stats.beta(p, q, scale=scale)
    lg_pq = special.gammaln(p + q) - special.gammaln(p)

    def mellin(t, c):
        if c <= 1.0 - p:
            raise DomainError(f"Mellin transform undefined at c={c} for p={p}")
        s = _s(t, c)
        return np.exp(
            s * math.log(scale) + complex_log_gamma(p + s) - complex_log_gamma(p + q + s) + lg_pq
        )

    def sampler(rng, n):
        return scale * rng.beta(p, q, size=n)

    return TargetModel(
        name=name or f"beta(p={p:g},q={q:g},scale={scale:g})",
        density=dist.pdf,
        survival=dist.sf,
        mellin=mellin,
        sampler=sampler,
        x_max_eff=_quantile_cap(dist.ppf, dist.sf),
        mean=scale * p / (p + q),
        quad=QuadratureConfig(1e-8, scale, breakpoints=(scale,)),
        params={"p": p, "q": q, "scale": scale},
    )


def loggamma_target(mu: float, a: float, lam: float, name: str | None = None) -> TargetModel:
    """``X = exp(mu + G)`` with ``G ~ Gamma(a, rate lam)``.

    Density ``lam^a e^(lam mu) / Gamma(a) * x^(-lam-1) (log x - mu)^(a-1)`` on
    ``x > e^mu`` and ``M_c[f](t) = lam^a e^(mu s) (lam - s)^-a``, ``s = c-1+it``,
    for ``c < lam + 1``. ``a = 1`` gives the Pareto law.
    """
    if not (a > 0 and lam > 0):
        raise DomainError("log-gamma target needs a > 0 and lam > 0")
    inner = stats.gamma(a, scale=1.0 / lam)
    lognorm_const = a * math.log(lam) + lam * mu - special.gammaln(a)

    def density(x):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        ok = x > math.exp(mu)
        lx = np.log(x[ok])
        out[ok] = np.exp(lognorm_const - (lam + 1.0) * lx + (a - 1.0) * np.log(lx - mu))
        return out

    def survival(x):
        x = np.asarray(x, dtype=np.float64)
        z = np.log(np.maximum(x, math.exp(mu))) - mu
        return special.gammaincc(a, lam * z)

    def mellin(t, c):
        if c - 1.0 >= lam:
            raise DomainError(f"Mellin transform undefined at c={c} for lam={lam}")
        s = _s(t, c)
        return np.exp(a * math.log(lam) + mu * s - a * np.log(lam - s))

    def sampler(rng, n):
        return np.exp(mu + rng.gamma(a, 1.0 / lam, size=n))

    x_eff = _quantile_cap(lambda p: math.exp(mu + inner.ppf(p)), survival)
    mean = math.exp(mu) * (lam / (lam - 1.0)) ** a if lam > 1 else math.inf
    upper = math.exp(mu + float(inner.isf(1e-12)))
    return TargetModel(
        name=name or f"loggamma(mu={mu:g},a={a:g},lam={lam:g})",
        density=density,
        survival=survival,
        mellin=mellin,
        sampler=sampler,
        x_max_eff=x_eff,
        mean=mean,
        quad=QuadratureConfig(1e-8, max(upper, 1e6), breakpoints=(math.exp(mu),)),
        params={"mu": mu, "a": a, "lam": lam},
    )


def lognormal_target(mu: float, lam: float, name: str | None = None) -> TargetModel:
    """``log X ~ N(mu, lam^2)``: ``M_c[f](t) = exp(mu s + lam^2 s^2 / 2)``."""
    if not lam > 0:
        raise DomainError("log-normal target needs lam > 0")
    dist = stats.lognorm(lam, scale=math.exp(mu))

    def mellin(t, c):
        s = _s(t, c)
        return np.exp(mu * s + 0.5 * lam * lam * s * s)

    def sampler(rng, n):
        return rng.lognormal(mu, lam, size=n)

    return TargetModel(
        name=name or f"lognormal(mu={mu:g},lam={lam:g})",
        density=dist.pdf,
        survival=dist.sf,
        mellin=mellin,
        sampler=sampler,
        x_max_eff=_quantile_cap(dist.ppf, dist.sf),
        mean=math.exp(mu + 0.5 * lam * lam),
        quad=QuadratureConfig(float(dist.ppf(1e-16)), float(dist.isf(1e-18))),
        params={"mu": mu, "lam": lam},
    )


# ---------------------------------------------------------------------------
# error families

def uniform_error(lo: float, hi: float, name: str | None = None) -> ErrorModel:
    """Uniform(lo, hi): ``M_c[g](t) = (hi^(c+it) - lo^(c+it)) / ((c+it)(hi-lo))``; gamma = 1."""
    if not (0 <= lo < hi):
        raise DomainError("uniform error needs 0 <= lo < hi")
    width = hi - lo

    def density(u):
        u = np.asarray(u, dtype=np.float64)
        return np.where((u >= lo) & (u <= hi), 1.0 / width, 0.0)

    def cdf(u):
        return np.clip((np.asarray(u, dtype=np.float64) - lo) / width, 0.0, 1.0)

    def mellin(t, c):
        z = c + 1j * np.asarray(t, dtype=np.float64)
        top = np.exp(z * math.log(hi)) - (np.exp(z * math.log(lo)) if lo > 0 else 0.0)
        return top / (z * width)

    def sampler(rng, n):
        return rng.uniform(lo, hi, size=n)

    # |hi^z - lo^z| in [hi^1.5 - lo^1.5, hi^1.5 + lo^1.5]; sqrt(1+t^2)/|1.5+it| in [2/3, 1]
    a, b = hi ** 1.5, lo ** 1.5
    return ErrorModel(
        name=name or f"uniform({lo:g},{hi:g})",
        density=density,
        cdf=cdf,
        mellin=mellin,
        gamma_exponent=1.0,
        sampler=sampler,
        sigma_U=0.5 * (lo + hi),
        xg_sup=hi / width,
        g1_lower=(a - b) * (2.0 / 3.0) / width,
        g1_upper=(a + b) / width,
        quad=QuadratureConfig(1e-8, hi, breakpoints=tuple(v for v in (lo, hi) if v > 0)),
        params={"lo": lo, "hi": hi},
    )


def beta_error(b: int, name: str | None = None) -> ErrorModel:
    """Beta(1, b), density ``b (1-u)^(b-1)`` on (0, 1): ``M_c[g](t) = prod_j j / (c-1+j+it)``; gamma = b."""
    if int(b) != b or b < 1:
        raise DomainError("beta error needs an integer b >= 1")
    b = int(b)

    def density(u):
        u = np.asarray(u, dtype=np.float64)
        return np.where((u > 0) & (u < 1), b * np.power(np.clip(1.0 - u, 0.0, None), b - 1), 0.0)

    def cdf(u):
        u = np.clip(np.asarray(u, dtype=np.float64), 0.0, 1.0)
        return 1.0 - (1.0 - u) ** b

    def mellin(t, c):
        t = np.asarray(t, dtype=np.float64)
        out = np.ones(t.shape, dtype=np.complex128)
        for j in range(1, b + 1):
            out = out * (j / (c - 1.0 + j + 1j * t))
        return out

    def sampler(rng, n):
        return rng.beta(1.0, b, size=n)

    # each factor j*sqrt(1+t^2)/|j+1/2+it| rises monotonically from j/(j+1/2) to j
    lower = math.prod(j / (j + 0.5) for j in range(1, b + 1))
    return ErrorModel(
        name=name or f"beta(1,{b})",
        density=density,
        cdf=cdf,
        mellin=mellin,
        gamma_exponent=float(b),
        sampler=sampler,
        sigma_U=1.0 / (b + 1),
        xg_sup=(1.0 - 1.0 / b) ** (b - 1) if b > 1 else 1.0,
        g1_lower=lower,
        g1_upper=float(math.factorial(b)),
        quad=QuadratureConfig(1e-8, 1.0, breakpoints=(1.0,)),
        params={"b": b},
    )


def noiseless_error() -> ErrorModel:
    """Point mass at 1 (direct observation): ``M_c[g] = 1``."""

    def mellin(t, c):
        return np.ones(np.shape(t), dtype=np.complex128)

    def sampler(rng, n):
        return np.ones(n)

    return ErrorModel(
        name="none",
        density=None,
        cdf=lambda u: (np.asarray(u, dtype=np.float64) >= 1.0).astype(float),
        mellin=mellin,
        gamma_exponent=0.0,
        sampler=sampler,
        sigma_U=1.0,
        xg_sup=math.inf,
        g1_lower=1.0,
        g1_upper=1.0,
    )


# ---------------------------------------------------------------------------
# catalog

_TARGET_FACTORIES = {
    "gamma_4_05": lambda: gamma_target(4.0, 0.5, name="gamma_4_05"),
    "weibull_2": lambda: weibull_target(2.0, name="weibull_2"),
    "beta_4_5_scaled": lambda: scaled_beta_target(4.0, 5.0, 2.0, name="beta_4_5_scaled"),
    "loggamma_0_4_3": lambda: loggamma_target(0.0, 4.0, 3.0, name="loggamma_0_4_3"),
}
_ERROR_FACTORIES = {
    "unif_0_1": lambda: uniform_error(0.0, 1.0, name="unif_0_1"),
    "unif_half_3half": lambda: uniform_error(0.5, 1.5, name="unif_half_3half"),
    "beta_1_2": lambda: beta_error(2, name="beta_1_2"),
}
_cache: dict = {}

TARGET_KEYS = tuple(_TARGET_FACTORIES)
ERROR_KEYS = tuple(_ERROR_FACTORIES)


def get_target(key: str) -> TargetModel:
    if key not in _TARGET_FACTORIES:
        raise KeyError(f"unknown target {key!r}; choose from {', '.join(TARGET_KEYS)}")
    if ("t", key) not in _cache:
        _cache["t", key] = _TARGET_FACTORIES[key]()
    return _cache["t", key]


def get_error(key: str) -> ErrorModel:
    """Catalog error by key; ``"none"`` gives the noiseless model."""
    if key == "none":
        return noiseless_error()
    if key not in _ERROR_FACTORIES:
        raise KeyError(f"unknown error {key!r}; choose from {', '.join(ERROR_KEYS)}")
    if ("e", key) not in _cache:
        _cache["e", key] = _ERROR_FACTORIES[key]()
    return _cache["e", key]


def catalog_targets() -> list[TargetModel]:
    return [get_target(k) for k in TARGET_KEYS]


def catalog_errors() -> list[ErrorModel]:
    return [get_error(k) for k in ERROR_KEYS]


# ---------------------------------------------------------------------------
# sampling

def sample_target(model: TargetModel, n: int, rng) -> np.ndarray:
    """``n`` i.i.d. draws from the target law (empty for ``n == 0``)."""
    if n < 0:
        raise DomainError("sample size must be non-negative")
    if n == 0:
        return np.empty(0)
    return np.asarray(model.sampler(rng, n), dtype=np.float64)


def sample_error(model: ErrorModel, n: int, rng) -> np.ndarray:
    if n < 0:
        raise DomainError("sample size must be non-negative")
    if n == 0:
        return np.empty(0)
    return np.asarray(model.sampler(rng, n), dtype=np.float64)


def sample_contaminated(target: TargetModel | None, error: ErrorModel, n: int, rng, latent=None) -> np.ndarray:
    """Observations ``Y_j = X_j * U_j``.

    ``X`` is drawn from ``target`` unless ``latent`` (e.g. a dependent path) is
    given; the noise is drawn after ``X`` from the same generator.
    """
    if latent is None:
        x = sample_target(target, n, rng)
    else:
        x = np.asarray(latent, dtype=np.float64)
        if x.size != n:
            raise DomainError(f"latent path has {x.size} values, expected {n}")
    return x * sample_error(error, n, rng)
