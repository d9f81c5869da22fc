import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

from spin_core import CollectiveOps, SpinState, build_ops, expectation, variance
from utils.errors import InvalidInputError, NumericalQualityError, NumericalQualityWarning

from .moments import MomentSet

logger = logging.getLogger(__name__)

# Below this |<J_x>| the squeezing parameter and the arcsin response are undefined.
MIN_MEAN_SPIN = 1e-12
# Rounding slack before |ratio| > 1 counts as leaving the arcsin domain.
ARCSIN_SLACK = 1e-12


class UndefinedMetricError(InvalidInputError):
    """A metric whose normalizing moment vanishes."""

    pass


class SaturationError(NumericalQualityError):
    """The arcsin estimator input left [-1, 1]."""

    pass


class SaturationWarning(NumericalQualityWarning):
    pass


@dataclass(frozen=True)
class ErrorSummary:
    bias_coeff: float
    q_single_shot: float
    e_metric: float
    mse: float


def _require_spin(value: float, what: str) -> None:
    if not math.isfinite(value) or abs(value) < MIN_MEAN_SPIN:
        raise UndefinedMetricError(f"{what} is zero; metric undefined")


def wineland_xi(state: SpinState, ops: Optional[CollectiveOps] = None) -> float:
    """sqrt(N Var(J_z)) / |<J_x>|"""
    if ops is None:
        ops = build_ops(state.n_atoms, dimension_cap=max(state.n_atoms, 1))
    jx_mean = expectation(state, ops.jx)
    _require_spin(jx_mean, "<J_x>")
    return math.sqrt(state.n_atoms * variance(state, ops.jz)) / abs(jx_mean)


def wineland_xi_from_moments(moments: MomentSet) -> float:
    _require_spin(moments.jx0, "<J_x>")
    return math.sqrt(moments.n_atoms * moments.var_z0) / abs(moments.jx0)


def mom_estimate(jz_mean: float, jx0_assumed: float, clamp: bool = False) -> float:
    """Method-of-moments phase: arcsin(-<J_z> / <J_x0>'), restricted to [-pi/2, pi/2].

    Args:
        jz_mean: measured (or exact) mean of J_z after encoding
        jx0_assumed: <J_x0> of the state the experimenter believes was prepared
        clamp: when True a saturated ratio is clipped to +-1 and reported with a
            SaturationWarning instead of raising

    Returns:
        The phase estimate in radians.
    """
    _require_spin(jx0_assumed, "assumed <J_x0>")
    ratio = -jz_mean / jx0_assumed
    if abs(ratio) > 1.0 + ARCSIN_SLACK:
        if not clamp:
            raise SaturationError(f"arcsin argument {ratio!r} outside [-1, 1]")
        warnings.warn(
            f"arcsin argument {ratio:.6g} clamped to [-1, 1]", SaturationWarning, stacklevel=2
        )
    return math.asin(max(-1.0, min(1.0, ratio)))


def bias_coefficient(jx0_actual: float, jx0_assumed: float) -> float:
    """Linear bias coefficient B, so that the estimator bias is B * phi for small phi."""
    _require_spin(jx0_actual, "actual <J_x0>")
    _require_spin(jx0_assumed, "assumed <J_x0>")
    return 1.0 - jx0_assumed / jx0_actual


def _check_shots(shots: int) -> None:
    if shots < 1:
        raise InvalidInputError(f"shots must be >= 1, got {shots}")


def sigma_q_linearized(
    moments: MomentSet, theta_applied: float, jx0_assumed: float, shots: int = 1
) -> float:
    """Phase variance from error propagation at phi = 0.

    ``moments`` are taken before the J_x rotation by ``theta_applied``. With
    ``shots=1`` the return value is Q^2.
    """
    _check_shots(shots)
    _require_spin(jx0_assumed, "assumed <J_x0>")
    c, s = math.cos(theta_applied), math.sin(theta_applied)
    numerator = (
        c * c * moments.var_z0
        + s * s * moments.var_y0
        + 0.5 * math.sin(2.0 * theta_applied) * moments.cov_zy0
    )
    return numerator / (shots * jx0_assumed**2)


def sigma_q_full(
    moments: MomentSet,
    theta: float,
    phi: float,
    jx0_assumed: float,
    shots: int = 1,
    jz0_mean: Optional[float] = None,
    jy0_mean: Optional[float] = None,
) -> float:
    """Phase variance at an arbitrary operating point phi, without linearizing.

    Includes sin^2(phi) Var(J_x0) and the x-covariance terms in the numerator
    and the phi-dependent slope in the denominator. Transverse means default to
    the ones stored in ``moments``.
    """
    _check_shots(shots)
    jz0 = moments.jz0 if jz0_mean is None else jz0_mean
    jy0 = moments.jy0 if jy0_mean is None else jy0_mean
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)

    numerator = (
        ct * ct * cp * cp * moments.var_z0
        + sp * sp * moments.var_x0
        + cp * cp * st * st * moments.var_y0
        - 0.5 * st * math.sin(2.0 * phi) * moments.cov_xy0
        - 0.5 * math.sin(2.0 * phi) * ct * moments.cov_zx0
        + 0.5 * math.sin(2.0 * theta) * cp * cp * moments.cov_zy0
    )
    slope = cp * jx0_assumed + sp * (jz0 * ct + jy0 * st)
    _require_spin(slope, "phase response slope")
    return numerator / (shots * slope**2)


def error_metric(n_atoms: int, q_single_shot: float, bias_coeff: float) -> float:
    """E = sqrt(N Q^2 (1 + B^2)); E = 1 is the unentangled benchmark."""
    if q_single_shot < 0:
        raise InvalidInputError(f"Q must be >= 0, got {q_single_shot}")
    return math.sqrt(n_atoms * q_single_shot**2 * (1.0 + bias_coeff**2))


def mse(bias_coeff: float, phi: float, q_single_shot: float, shots: int) -> float:
    _check_shots(shots)
    return (bias_coeff * phi) ** 2 + q_single_shot**2 / shots


def summarize(
    n_atoms: int, bias_coeff: float, q_single_shot: float, phi: float, shots: int
) -> ErrorSummary:
    return ErrorSummary(
        bias_coeff=bias_coeff,
        q_single_shot=q_single_shot,
        e_metric=error_metric(n_atoms, q_single_shot, bias_coeff),
        mse=mse(bias_coeff, phi, q_single_shot, shots),
    )
