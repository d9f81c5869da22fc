import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize

from metrics import bias_coefficient, error_metric
from utils.errors import InvalidInputError

from .ku import ku_applied_nu, ku_moments, lambda_opt

logger = logging.getLogger(__name__)

THRESHOLD_RTOL = 1e-6
SCAN_POINTS = 400


class ThresholdMode(str, Enum):
    RELATIVE_TO_UNBIASED = "relative_to_unbiased"
    RELATIVE_TO_SHOT_NOISE = "relative_to_shot_noise"


class ThresholdSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: ThresholdMode = ThresholdMode.RELATIVE_TO_UNBIASED
    factor: float = Field(gt=0)


@dataclass(frozen=True)
class AnalyticError:
    bias_coeff: float
    q_single_shot: float
    e_metric: float


@dataclass(frozen=True)
class ThresholdResult:
    n_atoms: int
    lam: float
    lambda_assumed: Optional[float]
    ratio: Optional[float]
    crossed: bool
    e_at_crossing: Optional[float]

    @property
    def delta_lambda(self) -> Optional[float]:
        """Absolute critical error lambda - lambda', or None when E never crosses."""
        if self.lambda_assumed is None:
            return None
        return self.lam - self.lambda_assumed


def e_metric_analytic(n_atoms: int, lam: float, lambda_assumed: float) -> AnalyticError:
    """B, Q and E for OAT squeezing at ``lam`` read out with the estimator for ``lambda_assumed``.

    The rotation applied is the optimum for ``lambda_assumed``; the moments are
    those of the state actually twisted by ``lam``.
    """
    if lam < 0 or lambda_assumed < 0:
        raise InvalidInputError("twisting strengths must be >= 0")
    nu = ku_applied_nu(n_atoms, lambda_assumed)
    actual = ku_moments(n_atoms, lam, nu)
    assumed = ku_moments(n_atoms, lambda_assumed, nu)

    b = bias_coefficient(actual.s_x_mean, assumed.s_x_mean)
    q = math.sqrt(actual.var_minus) / abs(assumed.s_x_mean)
    return AnalyticError(bias_coeff=b, q_single_shot=q, e_metric=error_metric(n_atoms, q, b))


def _threshold_gap(n_atoms: int, lam: float, spec: ThresholdSpec, e_unbiased: float):
    def gap(lambda_assumed: float) -> float:
        e = e_metric_analytic(n_atoms, lam, lambda_assumed).e_metric
        if spec.mode is ThresholdMode.RELATIVE_TO_UNBIASED:
            return e / e_unbiased - spec.factor
        return e - spec.factor

    return gap


def delta_lambda_crit(
    n_atoms: int, spec: ThresholdSpec, lam: Optional[float] = None
) -> ThresholdResult:
    """Relative under-estimate |lambda' - lambda| / lambda at which E crosses the threshold.

    Searches the branch lambda' < lambda. ``lam`` defaults to the optimal
    squeezing strength for ``n_atoms``. When E never reaches the threshold on
    that branch the result has ``crossed=False`` and no ratio.
    """
    if lam is None:
        lam = lambda_opt(n_atoms)
    if lam <= 0:
        raise InvalidInputError("lambda must be > 0")

    e_unbiased = e_metric_analytic(n_atoms, lam, lam).e_metric
    gap = _threshold_gap(n_atoms, lam, spec, e_unbiased)

    start = gap(lam)
    if start >= 0.0:
        # E is at or above the threshold with no twist error, so the critical error is zero.
        logger.info(
            "threshold %s x%.3g at N=%d already met without twist error (E=%.6g)",
            spec.mode.value,
            spec.factor,
            n_atoms,
            e_unbiased,
        )
        return ThresholdResult(
            n_atoms=n_atoms,
            lam=lam,
            lambda_assumed=lam,
            ratio=0.0,
            crossed=True,
            e_at_crossing=e_unbiased,
        )

    upper, g_upper = lam, start
    for lambda_assumed in lam * np.linspace(1.0, 0.0, SCAN_POINTS + 1)[1:]:
        g = gap(float(lambda_assumed))
        if g >= 0.0:
            root = optimize.bisect(
                gap,
                float(lambda_assumed),
                upper,
                xtol=THRESHOLD_RTOL * lam * 1e-3,
                rtol=THRESHOLD_RTOL * 1e-3,
            )
            logger.debug(
                "threshold %s x%.3g at N=%d crossed at lambda'=%.9g",
                spec.mode.value,
                spec.factor,
                n_atoms,
                root,
            )
            return ThresholdResult(
                n_atoms=n_atoms,
                lam=lam,
                lambda_assumed=root,
                ratio=abs(root - lam) / lam,
                crossed=True,
                e_at_crossing=e_metric_analytic(n_atoms, lam, root).e_metric,
            )
        upper, g_upper = float(lambda_assumed), g

    logger.info(
        "threshold %s x%.3g not reached at N=%d (gap %.3g at lambda'=0)",
        spec.mode.value,
        spec.factor,
        n_atoms,
        g_upper,
    )
    return ThresholdResult(
        n_atoms=n_atoms, lam=lam, lambda_assumed=None, ratio=None, crossed=False, e_at_crossing=None
    )
