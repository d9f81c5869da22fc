"""Asymptotic variance of a maximum-likelihood phase estimate under a wrong model.

Scores Z = d(log P_assumed)/d(phi) are evaluated on the assumed model, while
all expectations are taken over the distribution the experiment actually
produces. Without misspecification both measures coincide and the result
collapses to 1/F_c.
"""

import math

import numpy as np

from spin_core import ProbDist
from utils.errors import InvalidInputError

from .information import FD_STEP, PROB_CUTOFF, DegenerateFisherError, PhaseFamily

# Stencil for the second derivative of P.
CURVATURE_STEP = 1e-4


def sandwich_variance(z_samples, weights, dz_dphi: float) -> float:
    """Var_w(Z) / dz_dphi^2, with ``dz_dphi`` the weighted mean score derivative."""
    z = np.asarray(z_samples, dtype=float)
    w = np.asarray(weights, dtype=float)
    if z.shape != w.shape:
        raise InvalidInputError(f"scores {z.shape} and weights {w.shape} differ in shape")
    w = w / w.sum()
    mean = float(w @ z)
    spread = float(w @ (z - mean) ** 2)
    if not math.isfinite(dz_dphi) or abs(dz_dphi) < 1e-300:
        raise DegenerateFisherError("mean score derivative vanishes")
    return spread / dz_dphi**2


def score_moments(
    actual: ProbDist | np.ndarray,
    assumed_model: PhaseFamily,
    phi_star: float,
    step: float = FD_STEP,
    curvature_step: float = CURVATURE_STEP,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Per-outcome scores, their actual-distribution weights and E_actual[dZ/dphi].

    Outcomes the actual distribution never produces, or the assumed model
    gives probability below the cutoff, are left out.
    """
    weights = actual.probs if isinstance(actual, ProbDist) else np.asarray(actual, dtype=float)
    slope_table = assumed_model.probs([phi_star - step, phi_star, phi_star + step])
    curve_table = assumed_model.probs([phi_star - curvature_step, phi_star + curvature_step])
    probs = slope_table[1]
    keep = (weights > 0) & (probs >= PROB_CUTOFF)

    first = (slope_table[2] - slope_table[0]) / (2.0 * step)
    second = (curve_table[1] - 2.0 * probs + curve_table[0]) / curvature_step**2
    scores = first[keep] / probs[keep]
    # d/dphi (P'/P) = P''/P - (P'/P)^2
    dscores = second[keep] / probs[keep] - scores**2
    w = weights[keep]
    return scores, w, float(w @ dscores / w.sum())


def misspecified_q(
    actual: ProbDist | np.ndarray,
    assumed_model: PhaseFamily,
    phi_star: float,
    step: float = FD_STEP,
) -> float:
    """Single-shot Q of the misspecified MLE converged at ``phi_star``."""
    scores, weights, dz_dphi = score_moments(actual, assumed_model, phi_star, step)
    return math.sqrt(sandwich_variance(scores, weights, dz_dphi))
