"""Survival function estimation from multiplicatively contaminated data.

Observations ``Y = X U`` with known noise law ``U`` are deconvolved in the
Mellin domain with a spectral cut-off chosen by penalized contrast.
"""
__version__ = "0.1.0"

from .adaptive import PenaltyConfig, SelectionResult, adaptive_estimate, k_grid, select_k, sigma_y_hat
from .dependence import (
    Ar1GammaConfig,
    DependenceDiagnostics,
    fdm_bound,
    fdm_sums,
    holder_constant,
    sample_ar1_gamma,
)
from .errors import (
    DegenerateEstimate,
    DomainError,
    ExperimentFailure,
    G0Violation,
    UnsupportedConfiguration,
)
from .estimator import (
    EstimatorConfig,
    SurvivalEstimate,
    clip,
    delta_g,
    empirical_mellin,
    empirical_survival,
    estimate_norm2,
    heuristic_survival,
    spectral_cutoff,
)
from .kernels import BACKEND
from .mellin import (
    MellinSeries,
    QuadratureConfig,
    TGrid,
    mellin_inverse,
    mellin_inverse_at,
    mellin_numeric,
    mult_convolve_numeric,
    plancherel_norm2,
)
from .models import ErrorModel, TargetModel, get_error, get_target, sample_contaminated
from .risk import ExperimentSpec, MiseResult, RateFit, ise, rate_fit, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]
