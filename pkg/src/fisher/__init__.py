from .information import (
    FD_STEP,
    MIN_INFORMATION,
    DegenerateFisherError,
    DerivativeQualityWarning,
    DistributionFamily,
    FisherEstimate,
    FisherMatrix,
    PhaseFamily,
    TwoParameterModel,
    UnidentifiableModelError,
    classical_fisher,
    crb,
    fisher_matrix,
    misspec_bias,
    qfi_pure,
    two_param_q,
)
from .sandwich import misspecified_q, sandwich_variance, score_moments

__all__ = [
    "FD_STEP",
    "MIN_INFORMATION",
    "DegenerateFisherError",
    "DerivativeQualityWarning",
    "DistributionFamily",
    "FisherEstimate",
    "FisherMatrix",
    "PhaseFamily",
    "TwoParameterModel",
    "UnidentifiableModelError",
    "classical_fisher",
    "crb",
    "fisher_matrix",
    "misspec_bias",
    "misspecified_q",
    "qfi_pure",
    "sandwich_variance",
    "score_moments",
    "two_param_q",
]
