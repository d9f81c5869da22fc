import logging
import math
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Optional

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

import numpy as np
from cachetools import LRUCache, cached
from pydantic import BaseModel, ConfigDict, Field, model_validator

from largescale import ku_rotation_angle
from metrics import moments_from_state
from spin_core import (
    DEFAULT_DIMENSION_CAP,
    CollectiveOps,
    HermitianSpectrum,
    SpinState,
    apply_jz_squared_phase,
    apply_spectrum,
    build_ops,
    css_x,
    rotate,
    spectral_decomposition,
)
from utils.errors import InvalidInputError
from utils.optimize import golden_section_minimize

logger = logging.getLogger(__name__)

ROTATION_GRID_POINTS = 256
ROTATION_TOL = 1e-10

# Readout rotation for TNT, exp(i J_x).
TNT_ROTATION = -1.0
TAT_ROTATION = math.pi / 2

# Approximate onset of the non-Gaussian regime at N=100; used only to label output.
OAT_NON_GAUSSIAN_ONSET = 0.1
TNT_NON_GAUSSIAN_ONSET = 0.045

PHASE_DOMAIN = math.pi / 2


class RotationUndefinedError(InvalidInputError):
    """Optimal squeezing rotation requested for an untwisted state."""

    pass


class DomainError(InvalidInputError):
    """Phase outside the estimator domain [-pi/2, pi/2]."""

    pass


class SchemeKind(str, Enum):
    TAT_SQUEEZED = "tat_squeezed"
    OAT_SQUEEZED = "oat_squeezed"
    OAT_NON_GAUSS = "oat_non_gauss"
    TNT = "tnt"


class RotationPolicy(str, Enum):
    ANALYTIC_KU = "analytic_ku"
    NUMERIC_OPTIMAL = "numeric_optimal"
    FIXED_ANGLE = "fixed_angle"


class PrepConfig(BaseModel):
    """One state preparation: the twist actually applied and the one the experimenter assumes.

    ``rotation_policy`` selects the J_x rotation of the OAT squeezed scheme and is
    always evaluated at ``lambda_assumed``. TAT and TNT use their fixed rotations
    and the non-Gaussian OAT scheme applies none.
    """

    model_config = ConfigDict(frozen=True)

    scheme: SchemeKind
    n_atoms: int = Field(ge=1)
    lambda_actual: float = Field(ge=0)
    lambda_assumed: Optional[float] = Field(default=None, ge=0)
    rotation_policy: RotationPolicy = RotationPolicy.NUMERIC_OPTIMAL
    fixed_angle: Optional[float] = None
    dimension_cap: int = Field(default=DEFAULT_DIMENSION_CAP, ge=2)

    @model_validator(mode="after")
    def check_rotation(self) -> Self:
        if self.rotation_policy is RotationPolicy.FIXED_ANGLE and self.fixed_angle is None:
            raise ValueError("fixed_angle is required when rotation_policy is fixed_angle")
        return self

    @property
    def assumed(self) -> float:
        return self.lambda_actual if self.lambda_assumed is None else self.lambda_assumed

    def with_lambda(self, lambda_actual: float) -> "PrepConfig":
        """Same preparation template (rotation still fixed by the assumed value) at another twist."""
        return self.model_copy(update={"lambda_actual": lambda_actual, "lambda_assumed": self.assumed})


@dataclass(frozen=True)
class PreparedStages:
    twisted: SpinState
    theta: float
    prepared: SpinState


def regime_label(scheme: SchemeKind, lam: float) -> str:
    onset = {
        SchemeKind.OAT_SQUEEZED: OAT_NON_GAUSSIAN_ONSET,
        SchemeKind.OAT_NON_GAUSS: OAT_NON_GAUSSIAN_ONSET,
        SchemeKind.TNT: TNT_NON_GAUSSIAN_ONSET,
    }.get(scheme)
    if onset is None or lam < onset:
        return "gaussian"
    return "non_gaussian"


@cached(cache=LRUCache(maxsize=16), lock=threading.Lock())
def _tat_spectrum(n_atoms: int) -> HermitianSpectrum:
    ops = build_ops(n_atoms, dimension_cap=n_atoms)
    return spectral_decomposition(ops.jz @ ops.jy + ops.jy @ ops.jz)


@cached(cache=LRUCache(maxsize=256), lock=threading.Lock())
def _tnt_spectrum(n_atoms: int, lam: float) -> HermitianSpectrum:
    ops = build_ops(n_atoms, dimension_cap=n_atoms)
    generator = lam * (ops.jz @ ops.jz) + (lam * n_atoms / 2.0) * ops.jx
    return spectral_decomposition(generator)


def twist(
    scheme: SchemeKind, n_atoms: int, lam: float, dimension_cap: int = DEFAULT_DIMENSION_CAP
) -> SpinState:
    """The entangling stage of ``scheme`` applied to CSS_x, before any readout rotation."""
    initial = css_x(n_atoms, dimension_cap)
    if lam == 0.0:
        return initial
    if scheme is SchemeKind.TAT_SQUEEZED:
        # exp(i lam (J_z J_y + J_y J_z))
        return apply_spectrum(initial, _tat_spectrum(n_atoms), -lam)
    if scheme is SchemeKind.TNT:
        # exp(-i (lam J_z^2 + lam N/2 J_x))
        return apply_spectrum(initial, _tnt_spectrum(n_atoms, float(lam)), 1.0)
    return apply_jz_squared_phase(initial, lam)


def optimal_oat_rotation(n_atoms: int, lam: float, ops: Optional[CollectiveOps] = None) -> float:
    """theta in [0, pi) minimizing Var(J_z) of exp(-i theta J_x) exp(i lam J_z^2)|CSS_x>."""
    if lam <= 0:
        raise RotationUndefinedError("optimal rotation is undefined for lambda = 0")
    if ops is None:
        ops = build_ops(n_atoms, dimension_cap=max(n_atoms, 1))
    moments = moments_from_state(apply_jz_squared_phase(css_x(n_atoms, ops.n_atoms), lam), ops)

    def measured_variance(theta: float) -> float:
        return moments.rotated(theta).var_z0

    step = math.pi / ROTATION_GRID_POINTS
    grid = np.arange(ROTATION_GRID_POINTS) * step
    seed = int(np.argmin([measured_variance(float(theta)) for theta in grid]))
    result = golden_section_minimize(
        measured_variance, grid[seed] - step, grid[seed] + step, tol=ROTATION_TOL
    )
    logger.debug(
        "optimal OAT rotation N=%d lambda=%.6g: theta=%.12g after %d iterations",
        n_atoms,
        lam,
        result.x,
        result.iterations,
    )
    return result.x % math.pi


def applied_rotation(config: PrepConfig, ops: Optional[CollectiveOps] = None) -> float:
    if config.scheme is SchemeKind.TAT_SQUEEZED:
        return TAT_ROTATION
    if config.scheme is SchemeKind.TNT:
        return TNT_ROTATION
    if config.scheme is SchemeKind.OAT_NON_GAUSS:
        return 0.0

    if config.rotation_policy is RotationPolicy.FIXED_ANGLE:
        assert config.fixed_angle is not None
        return config.fixed_angle
    if config.rotation_policy is RotationPolicy.ANALYTIC_KU:
        if config.assumed <= 0:
            raise RotationUndefinedError("optimal rotation is undefined for lambda = 0")
        return ku_rotation_angle(config.n_atoms, config.assumed)
    return optimal_oat_rotation(config.n_atoms, config.assumed, ops)


def prepare_stages(config: PrepConfig, ops: Optional[CollectiveOps] = None) -> PreparedStages:
    if ops is None:
        ops = build_ops(config.n_atoms, config.dimension_cap)
    twisted = twist(config.scheme, config.n_atoms, config.lambda_actual, config.dimension_cap)
    theta = applied_rotation(config, ops)
    prepared = twisted if theta == 0.0 else rotate(twisted, "x", theta, ops)
    return PreparedStages(twisted=twisted, theta=theta, prepared=prepared)


def prepare(config: PrepConfig, ops: Optional[CollectiveOps] = None) -> SpinState:
    """Pre-encoding state for ``config``."""
    return prepare_stages(config, ops).prepared


def encode_phase(state: SpinState, phi: float, ops: Optional[CollectiveOps] = None) -> SpinState:
    """Rotate by phi about J_y, so that <J_z> = -<J_x0> sin(phi) for a state along +x."""
    if not -PHASE_DOMAIN <= phi <= PHASE_DOMAIN:
        raise DomainError(f"phi={phi} outside [-pi/2, pi/2]")
    return rotate(state, "y", phi, ops)
