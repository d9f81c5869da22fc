import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

import numpy as np

from spin_core import Axis, CollectiveOps, ProbDist, SpinState, build_ops, variance
from utils.errors import InvalidInputError, NumericalQualityError, NumericalQualityWarning

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
PROB_CUTOFF = 1e-12
# Relative change of F between steps h and h/2 above which the derivative is flagged.
DRIFT_TOL = 0.01
PSD_TOL = 1e-8
MIN_INFORMATION = 1e-12


class DerivativeQualityWarning(NumericalQualityWarning):
    """Finite-difference derivative changed by more than 1% when the step was halved."""

    pass


class DegenerateFisherError(NumericalQualityError):
    pass


class UnidentifiableModelError(NumericalQualityError):
    """The (phi, lambda) Fisher matrix is singular, so both parameters cannot be estimated."""

    pass


class PhaseFamily(Protocol):
    def probs(self, phis) -> np.ndarray: ...


class TwoParameterModel(Protocol):
    def probs(self, phis, lam: float) -> np.ndarray: ...


class DistributionFamily:
    """Adapts a plain ``phi -> ProbDist`` callable to the vectorized family interface."""

    def __init__(self, fn: Callable[[float], ProbDist]):
        self.fn = fn

    def probs(self, phis) -> np.ndarray:
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        return np.stack([self.fn(float(phi)).probs for phi in phis])


@dataclass(frozen=True)
class FisherEstimate:
    value: float
    step: float
    drift: float

    @property
    def reliable(self) -> bool:
        return self.drift <= DRIFT_TOL


@dataclass(frozen=True)
class FisherMatrix:
    f_phiphi: float
    f_philambda: float
    f_lambdalambda: float

    def __post_init__(self):
        negative_diagonal = min(self.f_phiphi, self.f_lambdalambda) < -PSD_TOL * abs(self.trace)
        if negative_diagonal or self.determinant < -PSD_TOL * self.trace**2:
            raise NumericalQualityError(
                f"Fisher matrix is not positive semidefinite: {self.as_array().tolist()}"
            )

    @property
    def trace(self) -> float:
        return self.f_phiphi + self.f_lambdalambda

    @property
    def determinant(self) -> float:
        return self.f_phiphi * self.f_lambdalambda - self.f_philambda**2

    def as_array(self) -> np.ndarray:
        return np.array(
            [[self.f_phiphi, self.f_philambda], [self.f_philambda, self.f_lambdalambda]]
        )


def _information(probs: np.ndarray, d_a: np.ndarray, d_b: np.ndarray) -> float:
    keep = probs >= PROB_CUTOFF
    return float(np.sum(d_a[keep] * d_b[keep] / probs[keep]))


def _relative_drift(coarse: float, fine: float) -> float:
    scale = max(abs(coarse), abs(fine))
    if scale < MIN_INFORMATION:
        return 0.0
    return abs(coarse - fine) / scale


def _warn_drift(what: str, drift: float, step: float) -> None:
    if drift > DRIFT_TOL:
        warnings.warn(
            f"{what} changed by {100 * drift:.2g}% when halving the step {step:g}",
            DerivativeQualityWarning,
            stacklevel=3,
        )


def _phi_fisher(family: PhaseFamily, phi: float, step: float) -> float:
    table = family.probs([phi - step, phi, phi + step])
    derivative = (table[2] - table[0]) / (2.0 * step)
    return _information(table[1], derivative, derivative)


def classical_fisher(family: PhaseFamily, phi: float, step: float = FD_STEP) -> FisherEstimate:
    """Sum_j (dP_j/dphi)^2 / P_j by central differences, checked against step / 2."""
    if step <= 0:
        raise InvalidInputError(f"step must be > 0, got {step}")
    coarse = _phi_fisher(family, phi, step)
    fine = _phi_fisher(family, phi, step / 2.0)
    drift = _relative_drift(coarse, fine)
    _warn_drift("classical Fisher information", drift, step)
    return FisherEstimate(value=coarse, step=step, drift=drift)


def qfi_pure(state: SpinState, generator: np.ndarray | Axis, ops: Optional[CollectiveOps] = None) -> float:
    """4 Var(G) for a pure state; ``generator`` is a matrix or the name of a collective axis."""
    if isinstance(generator, str):
        if ops is None:
            ops = build_ops(state.n_atoms, dimension_cap=max(state.n_atoms, 1))
        generator = ops.axis(generator)
    return 4.0 * variance(state, generator)


def _lambda_derivative(model: TwoParameterModel, phi: float, lam: float, step: float) -> np.ndarray:
    if lam >= step:
        table = np.stack([model.probs([phi], lam - step)[0], model.probs([phi], lam + step)[0]])
        return (table[1] - table[0]) / (2.0 * step)
    # one-sided second-order stencil next to lambda = 0
    p0, p1, p2 = (model.probs([phi], lam + k * step)[0] for k in range(3))
    return (-3.0 * p0 + 4.0 * p1 - p2) / (2.0 * step)


def _matrix(model: TwoParameterModel, phi: float, lam: float, h_phi: float, h_lam: float) -> np.ndarray:
    table = model.probs([phi - h_phi, phi, phi + h_phi], lam)
    probs = table[1]
    d_phi = (table[2] - table[0]) / (2.0 * h_phi)
    d_lam = _lambda_derivative(model, phi, lam, h_lam)
    return np.array(
        [
            _information(probs, d_phi, d_phi),
            _information(probs, d_phi, d_lam),
            _information(probs, d_lam, d_lam),
        ]
    )


def fisher_matrix(
    model: TwoParameterModel,
    phi: float,
    lam: float,
    h_phi: float = FD_STEP,
    h_lam: float = FD_STEP,
) -> FisherMatrix:
    """The (phi, lambda) Fisher information matrix at the actual parameter values."""
    if lam < 0:
        raise InvalidInputError(f"lambda must be >= 0, got {lam}")
    coarse = _matrix(model, phi, lam, h_phi, h_lam)
    fine = _matrix(model, phi, lam, h_phi / 2.0, h_lam / 2.0)
    scale = max(abs(coarse[0]), abs(coarse[2]), abs(fine[0]), abs(fine[2]))
    drift = 0.0 if scale < MIN_INFORMATION else float(np.max(np.abs(coarse - fine)) / scale)
    _warn_drift("Fisher matrix", drift, max(h_phi, h_lam))
    logger.debug("Fisher matrix at phi=%.6g lambda=%.6g: %s (drift %.2g)", phi, lam, coarse, drift)
    return FisherMatrix(f_phiphi=coarse[0], f_philambda=coarse[1], f_lambdalambda=coarse[2])


def misspec_bias(fm: FisherMatrix, delta_lambda: float) -> float:
    """Local MLE bias -(F_phi,lambda / F_phi,phi) (lambda' - lambda) for a small twist error."""
    if fm.f_phiphi <= MIN_INFORMATION:
        raise DegenerateFisherError(f"F_phiphi={fm.f_phiphi!r}; phase is not identifiable")
    return -(fm.f_philambda / fm.f_phiphi) * delta_lambda


def two_param_q(fm: FisherMatrix) -> float:
    """Single-shot phase error when lambda is estimated jointly: sqrt(F_ll / det F)."""
    det = fm.determinant
    if fm.f_lambdalambda <= 0 or det <= PSD_TOL * fm.trace**2:
        raise UnidentifiableModelError(
            f"Fisher matrix is singular (det={det:.3g}, trace={fm.trace:.3g})"
        )
    return math.sqrt(fm.f_lambdalambda / det)


def crb(information: float, shots: int = 1) -> float:
    """Cramer-Rao standard deviation 1/sqrt(m F)."""
    if information <= MIN_INFORMATION:
        raise DegenerateFisherError(f"Fisher information {information!r} is zero")
    return 1.0 / math.sqrt(shots * information)
