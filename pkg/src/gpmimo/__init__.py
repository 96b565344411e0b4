"""Correlated-MIMO channel estimation with covariance-indexed GP regression.

Builds channel covariance models, reduced-pilot sounding plans, Gaussian
process and classical (LS / linear MMSE) channel estimators, link-level
metrics, and a reproducible Monte Carlo experiment runner with a CLI.
"""

__version__ = "0.1.0"

from .covariance import (
    ChannelCovariance,
    GridShape,
    exponential_coupling,
    kronecker_covariance,
    sample_channel,
    side_correlation,
    weichselberger_covariance,
)
from .estimators import Observation, ls_estimate, mmse_full, mmse_subsampled
from .experiment import (
    ExperimentConfig,
    FitSettings,
    build_covariance,
    run_experiment,
    timing_scan,
)
from .gpr import (
    ComplexGPR,
    FitReport,
    PosteriorEstimate,
    fit_hyperparameters,
    log_marginal_likelihood,
    posterior,
    reconstruct,
)
from .kernels import (
    GramSet,
    Matern15Kernel,
    RBFKernel,
    RationalQuadraticKernel,
    SpatialCovarianceKernel,
    gram,
    make_kernel,
)
from .linalg import IllConditionedKernelError
from .metrics import (
    EllipseStats,
    LinkReport,
    ellipse_stats,
    lmmse_detector,
    nmse_db,
    spectral_efficiency,
)
from .sounding import (
    SoundingPlan,
    TestSet,
    TrainingSet,
    full_pilot_matrix,
    make_plan,
    observe,
)

__all__ = [
    "ChannelCovariance",
    "ComplexGPR",
    "EllipseStats",
    "ExperimentConfig",
    "FitReport",
    "FitSettings",
    "GramSet",
    "GridShape",
    "IllConditionedKernelError",
    "LinkReport",
    "Matern15Kernel",
    "Observation",
    "PosteriorEstimate",
    "RBFKernel",
    "RationalQuadraticKernel",
    "SoundingPlan",
    "SpatialCovarianceKernel",
    "TestSet",
    "TrainingSet",
    "build_covariance",
    "ellipse_stats",
    "exponential_coupling",
    "fit_hyperparameters",
    "full_pilot_matrix",
    "gram",
    "kronecker_covariance",
    "lmmse_detector",
    "log_marginal_likelihood",
    "ls_estimate",
    "make_kernel",
    "make_plan",
    "mmse_full",
    "mmse_subsampled",
    "nmse_db",
    "observe",
    "posterior",
    "reconstruct",
    "run_experiment",
    "sample_channel",
    "side_correlation",
    "spectral_efficiency",
    "timing_scan",
    "weichselberger_covariance",
]
