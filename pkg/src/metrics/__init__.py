from .error_theory import (
    ErrorSummary,
    SaturationError,
    SaturationWarning,
    UndefinedMetricError,
    bias_coefficient,
    error_metric,
    mom_estimate,
    mse,
    sigma_q_full,
    sigma_q_linearized,
    summarize,
    wineland_xi,
    wineland_xi_from_moments,
)
from .moments import MomentSet, moments_from_state

__all__ = [
    "ErrorSummary",
    "MomentSet",
    "SaturationError",
    "SaturationWarning",
    "UndefinedMetricError",
    "bias_coefficient",
    "error_metric",
    "moments_from_state",
    "mom_estimate",
    "mse",
    "sigma_q_full",
    "sigma_q_linearized",
    "summarize",
    "wineland_xi",
    "wineland_xi_from_moments",
]
