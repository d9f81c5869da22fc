import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from utils.errors import InvalidInputError

from .mle import EstimateResult


@dataclass(frozen=True)
class EmpiricalStats:
    repeats: int
    mean: float
    bias: float
    variance: float
    mse: float
    bias_se: float
    mse_se: float

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def empirical_stats(results: Sequence[EstimateResult | float], true_phi: float) -> EmpiricalStats:
    """Bias, unbiased variance and MSE of repeated estimates, with their standard errors."""
    estimates = np.array(
        [r.phi_star if isinstance(r, EstimateResult) else r for r in results], dtype=float
    )
    repeats = len(estimates)
    if repeats < 2:
        raise InvalidInputError(f"need at least 2 repeats, got {repeats}")
    errors = estimates - true_phi
    variance = float(np.var(estimates, ddof=1))
    squared = errors**2
    return EmpiricalStats(
        repeats=repeats,
        mean=float(estimates.mean()),
        bias=float(errors.mean()),
        variance=variance,
        mse=float(squared.mean()),
        bias_se=math.sqrt(variance / repeats),
        mse_se=float(np.std(squared, ddof=1) / math.sqrt(repeats)),
    )
