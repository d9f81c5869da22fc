import math
import warnings
from typing import Optional

import numpy as np

from fisher import PhaseFamily, TwoParameterModel
from spin_core import Basis
from utils.errors import InvalidInputError, NumericalQualityWarning

from .sampling import SampleSet

LIKELIHOOD_FLOOR = 1e-300
PHI_DOMAIN = (-math.pi / 2, math.pi / 2)
# J_x outcome statistics of parity-symmetric preparations are even in phi, so
# the sign of phi is only identifiable with the J_z readout.
X_READOUT_PHI_DOMAIN = (0.0, math.pi / 2)
MLE_GRID_POINTS = 2001


class LikelihoodSupportWarning(NumericalQualityWarning):
    """An observed outcome has probability below the floor under the model."""

    pass


def default_phi_domain(basis: Basis | str) -> tuple[float, float]:
    return X_READOUT_PHI_DOMAIN if Basis(basis) is Basis.X else PHI_DOMAIN


def floored_log(probs: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(probs, LIKELIHOOD_FLOOR))


def model_probs(
    model: PhaseFamily | TwoParameterModel, phis, lam: Optional[float] = None
) -> np.ndarray:
    if lam is None:
        return model.probs(phis)  # type: ignore[call-arg]
    return model.probs(phis, lam)  # type: ignore[call-arg]


def log_likelihood(
    samples: SampleSet,
    model: PhaseFamily | TwoParameterModel,
    phi: float,
    lam: Optional[float] = None,
) -> float:
    """Sum over outcomes of counts * log P(outcome | phi[, lambda]).

    Returns -inf, with a LikelihoodSupportWarning, when an observed outcome is
    outside the support of the model.
    """
    probs = model_probs(model, [phi], lam)[0]
    if probs.shape != samples.counts.shape:
        raise InvalidInputError(
            f"model has {probs.shape[0]} outcomes, samples have {samples.counts.shape[0]}"
        )
    observed = samples.counts > 0
    if (probs[observed] < LIKELIHOOD_FLOOR).any():
        warnings.warn(
            f"observed outcome has probability below {LIKELIHOOD_FLOOR:g} at phi={phi:.6g}",
            LikelihoodSupportWarning,
            stacklevel=2,
        )
        return -math.inf
    return float(samples.counts[observed] @ np.log(probs[observed]))


class LogProbTable:
    """Floored log-probabilities of a phase family on a fixed phi grid.

    One table serves every trial drawn against the same model, so a grid scan
    costs a single matrix-vector product.
    """

    def __init__(
        self,
        model: PhaseFamily,
        domain: tuple[float, float] = PHI_DOMAIN,
        points: int = MLE_GRID_POINTS,
    ):
        lo, hi = domain
        if not hi > lo:
            raise InvalidInputError(f"empty phi domain {domain}")
        if points < 3:
            raise InvalidInputError(f"grid needs at least 3 points, got {points}")
        self.model = model
        self.domain = (float(lo), float(hi))
        self.grid = np.linspace(lo, hi, points)
        self.log_probs = floored_log(model.probs(self.grid))

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def scan(self, weights: np.ndarray) -> np.ndarray:
        """Log-likelihood of ``weights`` (counts or probabilities) at every grid point."""
        return self.log_probs @ np.asarray(weights, dtype=float)


class JointLogProbTable:
    """Floored log-probabilities of a (phi, lambda) model on a rectangular grid, shape (L, P, K)."""

    def __init__(
        self,
        model: TwoParameterModel,
        phi_domain: tuple[float, float],
        lambda_domain: tuple[float, float],
        points: int,
    ):
        if not (phi_domain[1] > phi_domain[0] and lambda_domain[1] > lambda_domain[0]):
            raise InvalidInputError(f"empty search box {phi_domain} x {lambda_domain}")
        self.model = model
        self.phi_domain = (float(phi_domain[0]), float(phi_domain[1]))
        self.lambda_domain = (float(lambda_domain[0]), float(lambda_domain[1]))
        self.phis = np.linspace(phi_domain[0], phi_domain[1], points)
        self.lams = np.linspace(lambda_domain[0], lambda_domain[1], points)
        self.log_probs = np.stack(
            [floored_log(model.probs(self.phis, float(lam))) for lam in self.lams]
        )

    def scan(self, weights: np.ndarray) -> np.ndarray:
        """Log-likelihood on the grid, indexed [lambda, phi]."""
        return self.log_probs @ np.asarray(weights, dtype=float)
