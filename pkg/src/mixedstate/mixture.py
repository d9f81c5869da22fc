import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from estimation import run_trials
from fisher import MIN_INFORMATION, DegenerateFisherError, classical_fisher
from metrics import UndefinedMetricError
from schemes import PhaseModel, PrepConfig, SchemeFamily, SchemeKind, encode_phase
from spin_core import (
    DEFAULT_DIMENSION_CAP,
    Axis,
    Basis,
    CollectiveOps,
    ProbDist,
    SpinState,
    expectation,
)
from utils.errors import InvalidInputError, NumericalQualityWarning

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-10
SLOPE_STEP = 1e-5
MIN_SLOPE = 1e-12


class MixtureClippingWarning(NumericalQualityWarning):
    """Quadrature nodes with negative twist were dropped and the weights renormalized."""

    pass


class SpreadConvention(str, Enum):
    # exp(-(lam - lam0)^2 / (2 delta_lambda)): delta_lambda acts as a variance
    PRINTED = "printed"
    STANDARD_DEVIATION = "standard_deviation"


class MixtureSpec(BaseModel):
    """Gaussian distribution of the twisting strength across repeated preparations."""

    model_config = ConfigDict(frozen=True)

    lambda0: float = Field(ge=0)
    delta_lambda: float = Field(default=0.0, ge=0)
    n_nodes: int = Field(default=41, ge=2)
    truncation: float = Field(default=4.0, gt=0)
    spread_convention: SpreadConvention = SpreadConvention.PRINTED

    @property
    def spread(self) -> float:
        """Standard deviation of the twist distribution."""
        if self.spread_convention is SpreadConvention.PRINTED:
            return math.sqrt(self.delta_lambda)
        return self.delta_lambda


@dataclass(frozen=True)
class Mixture:
    """Discretized ensemble: one pure preparation per twist node, weights summing to one."""

    spec: MixtureSpec
    scheme: SchemeKind
    lambdas: np.ndarray
    weights: np.ndarray
    states: tuple[SpinState, ...]
    theta: float
    ops: CollectiveOps

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[tuple[float, SpinState]]:
        return iter(self.components())

    @property
    def n_atoms(self) -> int:
        return self.ops.n_atoms

    def components(self) -> list[tuple[float, SpinState]]:
        return [(float(w), state) for w, state in zip(self.weights, self.states)]


def quadrature(spec: MixtureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Equispaced nodes over lambda0 +- truncation * spread and their normalized weights."""
    spread = spec.spread
    if spread == 0.0:
        return np.array([spec.lambda0]), np.array([1.0])

    offsets = np.linspace(-spec.truncation, spec.truncation, spec.n_nodes)
    lambdas = spec.lambda0 + offsets * spread
    weights = np.exp(-0.5 * offsets**2)
    weights /= weights.sum()

    negative = lambdas < 0
    if negative.any():
        warnings.warn(
            f"{int(negative.sum())} of {spec.n_nodes} nodes below lambda = 0 dropped "
            f"({weights[negative].sum():.3g} of the weight)",
            MixtureClippingWarning,
            stacklevel=3,
        )
        lambdas, weights = lambdas[~negative], weights[~negative]
        weights = weights / weights.sum()
    return lambdas, weights


def build_mixture(
    spec: MixtureSpec,
    scheme: SchemeKind | str,
    n_atoms: int,
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
    workers: Optional[int] = None,
) -> Mixture:
    """Prepare one pure state per quadrature node.

    Every node receives the readout rotation of a preparation at ``lambda0``,
    so for OAT the squeezing axis is only optimal for the mean twist.
    """
    scheme = SchemeKind(scheme)
    lambdas, weights = quadrature(spec)
    if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise InvalidInputError(f"mixture weights sum to {weights.sum()!r}")

    family = SchemeFamily(
        PrepConfig(scheme=scheme, n_atoms=n_atoms, lambda_actual=spec.lambda0, dimension_cap=dimension_cap)
    )
    states = run_trials(lambda i: family.state(float(lambdas[i])), len(lambdas), workers, desc="nodes")
    logger.debug(
        "mixture %s N=%d: %d nodes over lambda in [%.6g, %.6g], theta=%.9g",
        scheme.value,
        n_atoms,
        len(lambdas),
        lambdas[0],
        lambdas[-1],
        family.theta,
    )
    return Mixture(
        spec=spec,
        scheme=scheme,
        lambdas=lambdas,
        weights=weights,
        states=tuple(states),
        theta=family.theta,
        ops=family.ops,
    )


@dataclass(frozen=True)
class MixedMoments:
    mean: float
    variance: float
    node_means: np.ndarray
    node_variances: np.ndarray

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def mixed_moments(
    mixture: Mixture, operator: np.ndarray | Axis, phi: Optional[float] = None
) -> MixedMoments:
    """Mean and variance of a Hermitian operator under the mixed state, optionally after encoding phi."""
    op = mixture.ops.axis(operator) if isinstance(operator, str) else np.asarray(operator)
    means, seconds = [], []
    for state in mixture.states:
        if phi is not None:
            state = encode_phase(state, phi, mixture.ops)
        applied = op @ state.amplitudes
        means.append(expectation(state, op))
        seconds.append(float(np.vdot(applied, applied).real))

    node_means = np.array(means)
    node_variances = np.maximum(np.array(seconds) - node_means**2, 0.0)
    mean = float(mixture.weights @ node_means)
    variance = max(float(mixture.weights @ np.array(seconds)) - mean**2, 0.0)
    return MixedMoments(
        mean=mean, variance=variance, node_means=node_means, node_variances=node_variances
    )


class MixturePhaseModel:
    """Outcome distribution of the encoded mixed state: the node distributions, weighted."""

    def __init__(self, mixture: Mixture, basis: Basis | str = Basis.Z):
        self.mixture = mixture
        self.basis = Basis(basis)
        self._models = [PhaseModel(state, self.basis, mixture.ops) for state in mixture.states]

    @property
    def outcomes(self) -> np.ndarray:
        return self.mixture.ops.m_values

    def probs(self, phis) -> np.ndarray:
        total = sum(w * model.probs(phis) for w, model in zip(self.mixture.weights, self._models))
        return np.asarray(total)

    def distribution(self, phi: float) -> ProbDist:
        return ProbDist(outcomes=self.outcomes, probs=self.probs([phi])[0])

    def mean(self, phi: float) -> float:
        return float(self.probs([phi])[0] @ self.outcomes)


def mom_sensitivity_mixed(
    mixture: Mixture, phi: float, shots: int = 1, step: float = SLOPE_STEP
) -> float:
    """Delta phi = Delta J_z / (sqrt(m) |d Tr[rho J_z] / d phi|) for the mixed state."""
    if shots < 1:
        raise InvalidInputError(f"shots must be >= 1, got {shots}")
    model = MixturePhaseModel(mixture, Basis.Z)
    table = model.probs([phi - step, phi, phi + step])
    means = table @ model.outcomes
    slope = (means[2] - means[0]) / (2.0 * step)
    if abs(slope) < MIN_SLOPE:
        raise UndefinedMetricError(f"<J_z> does not respond to phi at phi={phi}")
    variance = float(table[1] @ model.outcomes**2) - means[1] ** 2
    return math.sqrt(max(variance, 0.0)) / (math.sqrt(shots) * abs(slope))


def crb_mixed(mixture: Mixture, basis: Basis | str, phi: float) -> float:
    """Single-shot Cramer-Rao sensitivity 1 / sqrt(F_c) of the mixture's outcome distribution."""
    information = classical_fisher(MixturePhaseModel(mixture, basis), phi).value
    if information < MIN_INFORMATION:
        raise DegenerateFisherError(f"classical Fisher information {information:g} at phi={phi}")
    return 1.0 / math.sqrt(information)
