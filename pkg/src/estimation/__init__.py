from .likelihood import (
    LIKELIHOOD_FLOOR,
    MLE_GRID_POINTS,
    PHI_DOMAIN,
    X_READOUT_PHI_DOMAIN,
    JointLogProbTable,
    LikelihoodSupportWarning,
    LogProbTable,
    default_phi_domain,
    log_likelihood,
)
from .mle import (
    MLE_TOL,
    BoundaryHitWarning,
    EstimateResult,
    FlatLikelihoodWarning,
    mle_single,
    mle_two_param,
    mom_pipeline,
    pseudo_true_phi,
)
from .sampling import SampleSet, sample_outcomes, trial_rng
from .stats import EmpiricalStats, empirical_stats
from .trials import run_trials

__all__ = [
    "LIKELIHOOD_FLOOR",
    "MLE_GRID_POINTS",
    "MLE_TOL",
    "PHI_DOMAIN",
    "X_READOUT_PHI_DOMAIN",
    "BoundaryHitWarning",
    "EmpiricalStats",
    "EstimateResult",
    "FlatLikelihoodWarning",
    "JointLogProbTable",
    "LikelihoodSupportWarning",
    "LogProbTable",
    "SampleSet",
    "default_phi_domain",
    "empirical_stats",
    "log_likelihood",
    "mle_single",
    "mle_two_param",
    "mom_pipeline",
    "pseudo_true_phi",
    "run_trials",
    "sample_outcomes",
    "trial_rng",
]
