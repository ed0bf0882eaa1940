"""Ridge regression with positive, zero or negative regularization: exact
risk on sampled designs and closed-form bounds driven by the covariance
spectrum."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.0.0"

from .bounds import BoundReport, SignalSpec, bound_report, matched_bounds, ratio_caps, regime_bounds
from .estimator import GramPath, exact_bias, exact_variance, ridge_fit_dual, sample_design
from .exceptions import ConfigError, DomainError, NotPositiveDefinite
from .experiments import ExperimentConfig, concentration_audit, run_sweep
from .spectrum import Spectrum, build_spectrum, effective_ranks, select_k_star
