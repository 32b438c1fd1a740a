"""Integrated squared error, Monte Carlo MISE experiments and rate fitting.

Replication ``r`` of an experiment draws from its own generator seeded by
``SeedSequence(entropy=seed, spawn_key=(r,))``. Replications are therefore
independent of each other and of the execution schedule; results are
reduced in replication order.
"""
from __future__ import annotations

import math
import os
import sys
import time
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy import integrate

from .adaptive import PenaltyConfig, _select, estimate_from_path
from .dependence import Ar1GammaConfig, sample_ar1_gamma
from .errors import DegenerateEstimate, DomainError, ExperimentFailure, G0Violation
from .estimator import (
    DEFAULT_T_STEP,
    EstimatorConfig,
    SpectralPath,
    SurvivalEstimate,
    _half_trapezoid,
)
from .mellin import TGrid
from .models import TargetModel, gamma_target, get_error, get_target, sample_contaminated

MAX_EXCLUDED_FRACTION = 0.05
_marginal = lru_cache(maxsize=32)(gamma_target)
_NORM_CACHE: dict = {}


# ---------------------------------------------------------------------------
# integrated squared error

def ise(est: SurvivalEstimate, truth: TargetModel) -> float:
    """``int (S_hat - S)^2 dx`` over ``[x_min, x_max_eff]`` by the trapezoid rule on the estimate's grid.

    The estimate's grid must reach ``x_max_eff``; nodes beyond it are dropped
    and the last partial interval is closed by linear interpolation.
    """
    x, v = est.x, est.values
    top = truth.x_max_eff
    if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
        raise DomainError("estimate grid must be increasing with at least two nodes")
    if x[-1] < top * (1.0 - 1e-9) or x[0] >= top:
        raise DomainError(
            f"estimate grid [{x[0]!r}, {x[-1]!r}] does not cover x_max_eff = {top!r}"
        )
    keep = x < top
    xs = np.append(x[keep], top)
    vs = np.append(v[keep], np.interp(top, x, v))
    return float(np.trapezoid((vs - truth.survival(xs)) ** 2, xs))


def survival_norm2(truth: TargetModel) -> float:
    """``int_0^inf S(x)^2 dx`` by adaptive quadrature (cached per model name)."""
    key = (truth.name, truth.x_max_eff)
    if key not in _NORM_CACHE:
        def sq(x):
            return float(truth.survival(np.array([x]))[0]) ** 2

        top = truth.x_max_eff
        pts = [b for b in truth.quad.breakpoints if 0 < b < top]
        head = integrate.quad(sq, 0.0, top, points=pts or None, limit=500, epsabs=1e-13, epsrel=1e-12)[0]
        tail = integrate.quad(sq, top, math.inf, limit=500, epsabs=1e-14)[0]
        _NORM_CACHE[key] = head + tail
    return _NORM_CACHE[key]


def ise_mellin_path(path: SpectralPath, truth: TargetModel) -> np.ndarray:
    """ISE over ``(0, inf)`` of the raw ``S_k`` for every node ``k`` of the path.

    By Plancherel at ``c = 1/2``,
    ``||S_k - S||^2 = (2 pi)^-1 [int_{|t|<=k} |C - M[S]|^2 + int_{|t|>k} |M[S]|^2]``,
    and the tail equals ``||S||^2`` minus the inner integral of ``|M[S]|^2``.
    """
    ms = truth.mellin_S_12(path.t)
    step = path.grid.step
    inner = _half_trapezoid(np.abs(path.coeffs - ms) ** 2, step) / math.pi
    head = _half_trapezoid(np.abs(ms) ** 2, step) / math.pi
    return inner + np.maximum(survival_norm2(truth) - head, 0.0)


def ise_mellin(est: SurvivalEstimate, truth: TargetModel) -> float:
    """Mellin-side ISE over ``(0, inf)`` of a raw estimate."""
    if est.variant != "raw":
        raise DomainError("the Mellin-side ISE applies to raw estimates only")
    grid = est.coeffs.grid
    t = grid.half_nodes
    c = est.coeffs.values[grid.half_count:]
    ms = truth.mellin_S_12(t)
    inner = _half_trapezoid(np.abs(c - ms) ** 2, grid.step)[-1] / math.pi
    head = _half_trapezoid(np.abs(ms) ** 2, grid.step)[-1] / math.pi
    return float(inner + max(survival_norm2(truth) - head, 0.0))


# ---------------------------------------------------------------------------
# experiments

@dataclass(frozen=True)
class ExperimentSpec:
    """One Monte Carlo configuration.

    For ``dependence = "ar1_gamma"`` the latent path comes from the AR(1)-Gamma
    process with parameters ``(m, lam, rho)`` and the truth is its
    ``Gamma(m, lam)`` marginal; ``target`` is then ignored. ``k_mode`` is
    ``adaptive``, ``fixed`` (uses ``k``) or ``oracle`` (the grid cut-off with
    the smallest mean ISE, on the Mellin side). ``risk`` selects the x-space
    ISE on ``[x_min, x_max_eff]`` (``x``) or the Mellin-side ISE over
    ``(0, inf)`` (``mellin``, raw estimates only).
    """

    target: str = "gamma_4_05"
    error: str = "unif_0_1"
    dependence: str = "iid"
    m: int = 1
    lam: float = 1.0
    rho: float = 0.0
    n: int = 500
    reps: int = 200
    seed: int = 0
    chi: float = 2.0
    use_theoretical_chi: bool = False
    kn_rule: str = "delta_le_n"
    variant: str = "clipped"
    k_mode: str = "adaptive"
    k: float = 0.0
    t_step: float = DEFAULT_T_STEP
    x_min: float = 1e-3
    x_max: float = 0.0
    n_x: int = 2000
    risk: str = "x"

    def __post_init__(self):
        if self.reps < 1 or self.n < 1:
            raise DomainError("reps and n must be at least 1")
        if self.dependence not in ("iid", "ar1_gamma"):
            raise DomainError(f"unknown dependence {self.dependence!r}")
        if self.variant not in ("raw", "clipped", "heuristic"):
            raise DomainError(f"unknown variant {self.variant!r}")
        if self.k_mode not in ("adaptive", "fixed", "oracle"):
            raise DomainError(f"unknown k_mode {self.k_mode!r}")
        if self.k_mode == "fixed" and not self.k > 0:
            raise DomainError("fixed k_mode needs k > 0")
        if self.risk not in ("x", "mellin"):
            raise DomainError(f"unknown risk {self.risk!r}")
        if (self.risk == "mellin" or self.k_mode == "oracle") and self.variant != "raw":
            raise DomainError("Mellin-side risk and oracle mode need the raw variant")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")
        get_error(self.error)
        if self.dependence == "iid":
            get_target(self.target)
        else:
            self.ar1_config()
        self.penalty_config()

    def ar1_config(self) -> Ar1GammaConfig:
        return Ar1GammaConfig(int(self.m), float(self.lam), float(self.rho))

    def truth(self) -> TargetModel:
        if self.dependence == "iid":
            return get_target(self.target)
        return _marginal(float(self.m), float(self.lam))

    def truth_label(self) -> str:
        return self.target if self.dependence == "iid" else self.truth().name

    def error_model(self):
        return get_error(self.error)

    def penalty_config(self) -> PenaltyConfig:
        return PenaltyConfig(self.chi, self.use_theoretical_chi, self.kn_rule)

    def estimator_config(self) -> EstimatorConfig:
        x_max = self.x_max if self.x_max > 0 else self.truth().x_max_eff
        return EstimatorConfig(self.t_step, self.x_min, x_max, self.n_x)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class MiseResult:
    mean: float
    se: float
    ises: tuple
    mean_k_hat: float
    excluded: int
    spec: ExperimentSpec
    failures: tuple = ()
    runtime: float = field(default=0.0, compare=False)

    @property
    def reps(self) -> int:
        return len(self.ises) + self.excluded


@dataclass(frozen=True)
class OracleComparison:
    """Adaptive versus best fixed cut-off, both scored by the Mellin-side ISE."""

    adaptive: MiseResult
    ks: np.ndarray
    grid_mise: np.ndarray
    best_k: int
    best_mise: float
    oracle: MiseResult


def replication_rng(seed: int, r: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(r,)))


def draw_sample(spec: ExperimentSpec, rng) -> np.ndarray:
    err = spec.error_model()
    if spec.dependence == "iid":
        return sample_contaminated(spec.truth(), err, spec.n, rng)
    latent = sample_ar1_gamma(spec.n, spec.ar1_config(), rng)
    return sample_contaminated(None, err, spec.n, rng, latent=latent)


@dataclass(frozen=True)
class _Outcome:
    ise: float = math.nan
    k: float = math.nan
    grid_ise: np.ndarray | None = None
    failure: str | None = None


def _replicate(spec: ExperimentSpec, r: int, with_grid: bool) -> _Outcome:
    rng = replication_rng(spec.seed, r)
    y = draw_sample(spec, rng)
    err = spec.error_model()
    truth = spec.truth()
    ecfg = spec.estimator_config()
    try:
        if spec.k_mode == "fixed":
            path = SpectralPath(y, err, TGrid.for_cutoff(spec.k, spec.t_step))
            k = path.grid.half_width
            grid_ise = None
        else:
            sel, path = _select(y, err, spec.penalty_config(), ecfg)
            k = sel.k_hat
            grid_ise = ise_mellin_path(path, truth)[path.index(sel.ks.astype(np.float64))] if with_grid else None
        if spec.k_mode == "oracle":
            return _Outcome(math.nan, math.nan, grid_ise)
        if spec.risk == "mellin":
            value = float(ise_mellin_path(path, truth)[path.index(k)])
        else:
            est = estimate_from_path(path, k, ecfg.x_grid(), spec.variant)
            value = ise(est, truth)
        return _Outcome(value, float(k), grid_ise)
    except (G0Violation, DegenerateEstimate) as exc:
        return _Outcome(failure=f"replication {r}: {type(exc).__name__}: {exc}")


def _run(spec: ExperimentSpec, with_grid: bool, threads: int | None, progress) -> list:
    threads = threads or os.cpu_count() or 1
    outcomes = []

    def one(r):
        return _replicate(spec, r, with_grid)

    if threads == 1:
        iterator = map(one, range(spec.reps))
        for i, out in enumerate(iterator):
            outcomes.append(out)
            if progress:
                progress(i + 1, spec.reps)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, out in enumerate(pool.map(one, range(spec.reps))):
                outcomes.append(out)
                if progress:
                    progress(i + 1, spec.reps)
    return outcomes


def _summarize(spec: ExperimentSpec, outcomes: list, started: float) -> MiseResult:
    failures = tuple(o.failure for o in outcomes if o.failure)
    if len(failures) > MAX_EXCLUDED_FRACTION * spec.reps:
        raise ExperimentFailure(
            f"{len(failures)} of {spec.reps} replications failed; first: {failures[0]}"
        )
    good = [o for o in outcomes if not o.failure]
    values = np.array([o.ise for o in good])
    ks = np.array([o.k for o in good])
    mean = float(np.mean(values)) if values.size else math.nan
    se = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.nan
    return MiseResult(
        mean=mean,
        se=se,
        ises=tuple(float(v) for v in values),
        mean_k_hat=float(np.mean(ks)) if ks.size else math.nan,
        excluded=len(failures),
        spec=spec,
        failures=failures,
        runtime=time.perf_counter() - started,
    )


def stderr_progress(done: int, total: int) -> None:
    sys.stderr.write(f"\r{done}/{total}")
    if done == total:
        sys.stderr.write("\n")
    sys.stderr.flush()


def run_experiment(spec: ExperimentSpec, threads: int | None = None, progress=None) -> MiseResult:
    """Monte Carlo MISE of one configuration; deterministic given ``spec``."""
    if spec.k_mode == "oracle":
        return oracle_comparison(spec, threads, progress).oracle
    started = time.perf_counter()
    return _summarize(spec, _run(spec, False, threads, progress), started)


def oracle_comparison(spec: ExperimentSpec, threads: int | None = None, progress=None):
    """Mellin-side MISE of the adaptive cut-off and of every fixed grid cut-off.

    Both use the same replications; the grid is the admissible ``K_n``, which
    depends only on ``n`` and the error law.
    """
    if spec.variant != "raw":
        raise DomainError("oracle comparison scores the raw estimator")
    started = time.perf_counter()
    adaptive_spec = _replace(spec, k_mode="adaptive", risk="mellin")
    outcomes = _run(adaptive_spec, True, threads, progress)
    adaptive = _summarize(adaptive_spec, outcomes, started)
    good = [o.grid_ise for o in outcomes if not o.failure]
    width = min(g.size for g in good)
    grid = np.mean(np.stack([g[:width] for g in good]), axis=0)
    best = int(np.argmin(grid))
    ks = np.arange(1, width + 1)
    oracle_ises = tuple(float(g[best]) for g in good)
    oracle = MiseResult(
        mean=float(grid[best]),
        se=float(np.std(oracle_ises, ddof=1) / math.sqrt(len(oracle_ises))) if len(oracle_ises) > 1 else math.nan,
        ises=oracle_ises,
        mean_k_hat=float(ks[best]),
        excluded=adaptive.excluded,
        spec=spec,
        failures=adaptive.failures,
        runtime=adaptive.runtime,
    )
    return OracleComparison(adaptive, ks, grid, int(ks[best]), float(grid[best]), oracle)


def _replace(spec: ExperimentSpec, **changes) -> ExperimentSpec:
    d = spec.as_dict()
    d.update(changes)
    return ExperimentSpec(**d)


# ---------------------------------------------------------------------------
# rates

@dataclass(frozen=True)
class RateFit:
    ns: np.ndarray
    mise: np.ndarray
    slope: float
    intercept: float
    reference: float


def reference_rate(s: float, gamma: float) -> float:
    """Exponent ``-2s / (2s + 2 gamma - 1)``; ``s = inf`` gives the parametric ``-1``."""
    if math.isinf(s):
        return -1.0
    return -2.0 * s / (2.0 * s + 2.0 * gamma - 1.0)


def rate_fit(results, s: float, gamma: float) -> RateFit:
    """Least-squares slope of ``log MISE`` on ``log n``.

    ``results`` holds ``(n, MiseResult)`` or ``(n, float)`` pairs with at
    least three distinct ``n``.
    """
    pairs = [(float(n), float(r.mean if isinstance(r, MiseResult) else r)) for n, r in results]
    ns = np.array([p[0] for p in pairs])
    vals = np.array([p[1] for p in pairs])
    if np.unique(ns).size < 3:
        raise DomainError("a rate fit needs at least three distinct sample sizes")
    if np.any(~(vals > 0)) or np.any(~(ns > 0)):
        raise DomainError("rate fit needs positive n and MISE values")
    slope, intercept = np.polyfit(np.log(ns), np.log(vals), 1)
    return RateFit(ns, vals, float(slope), float(intercept), reference_rate(s, gamma))
