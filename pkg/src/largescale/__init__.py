from .ku import (
    KUMoments,
    SmallEnsembleWarning,
    ku_applied_nu,
    ku_coefficients,
    ku_moments,
    ku_rotation_angle,
    ku_xi,
    lambda_opt,
)
from .threshold import (
    AnalyticError,
    ThresholdMode,
    ThresholdResult,
    ThresholdSpec,
    delta_lambda_crit,
    e_metric_analytic,
)

__all__ = [
    "AnalyticError",
    "KUMoments",
    "SmallEnsembleWarning",
    "ThresholdMode",
    "ThresholdResult",
    "ThresholdSpec",
    "delta_lambda_crit",
    "e_metric_analytic",
    "ku_applied_nu",
    "ku_coefficients",
    "ku_moments",
    "ku_rotation_angle",
    "ku_xi",
    "lambda_opt",
]
