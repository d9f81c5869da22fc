"""Closed-form one-axis-twisting moments valid at arbitrary atom number.

The twisted state is exp(i lambda J_z^2)|CSS_x> (mu = 2 lambda in the
Kitagawa-Ueda notation). ``nu`` is the Kitagawa-Ueda rotation angle; the
equivalent rotation in the exp(-i theta J_x) convention used by ``spin_core``
is theta = -nu, so the optimal rotation is theta = delta (mod pi) and the
matching Kitagawa-Ueda angle is nu = pi - delta.
"""

import logging
import math
import warnings
from dataclasses import dataclass

from utils.errors import InvalidInputError, NumericalQualityWarning

logger = logging.getLogger(__name__)

# lambda_opt is an N >> 1 asymptote.
LAMBDA_OPT_MIN_N = 100


class SmallEnsembleWarning(NumericalQualityWarning):
    """Large-N asymptotic formula evaluated at small N."""

    pass


@dataclass(frozen=True)
class KUMoments:
    n_atoms: int
    lam: float
    nu: float
    s_x_mean: float
    var_x: float
    var_plus: float
    var_minus: float
    a_coeff: float
    b_coeff: float
    delta_angle: float

    @property
    def spin(self) -> float:
        return self.n_atoms / 2.0

    def uncertainty_margin(self) -> float:
        """var_plus * var_minus / (<S_x>^2 / 4); never below 1 for a physical state."""
        if self.s_x_mean == 0.0:
            return math.inf
        return self.var_plus * self.var_minus / (0.25 * self.s_x_mean**2)


def _signed_power(base: float, exponent: int) -> float:
    """base**exponent through the log domain, keeping the sign of negative bases."""
    if exponent == 0:
        return 1.0
    if base == 0.0:
        return 0.0
    magnitude = math.exp(exponent * math.log(abs(base)))
    if base < 0 and exponent % 2 == 1:
        return -magnitude
    return magnitude


def _check(n_atoms: int, lam: float) -> None:
    if n_atoms < 2:
        raise InvalidInputError(f"analytic moments need N >= 2, got {n_atoms}")
    if lam < 0 or not math.isfinite(lam):
        raise InvalidInputError(f"lambda must be a finite value >= 0, got {lam}")


def ku_coefficients(n_atoms: int, lam: float) -> tuple[float, float, float]:
    """A, B and delta for twisting strength ``lam``."""
    _check(n_atoms, lam)
    a_coeff = 1.0 - _signed_power(math.cos(2.0 * lam), n_atoms - 2)
    b_coeff = 4.0 * math.sin(lam) * _signed_power(math.cos(lam), n_atoms - 2)
    delta = 0.5 * math.atan2(b_coeff, a_coeff)
    return a_coeff, b_coeff, delta


def ku_moments(n_atoms: int, lam: float, nu: float) -> KUMoments:
    a_coeff, b_coeff, delta = ku_coefficients(n_atoms, lam)
    s = n_atoms / 2.0

    s_x_mean = s * _signed_power(math.cos(lam), n_atoms - 1)
    var_x = 0.5 * s * (
        2.0 * s * (1.0 - _signed_power(math.cos(lam), 2 * (n_atoms - 1))) - (s - 0.5) * a_coeff
    )
    swing = math.hypot(a_coeff, b_coeff) * math.cos(2.0 * nu + 2.0 * delta)
    var_plus = 0.5 * s * (1.0 + 0.5 * (s - 0.5) * (a_coeff + swing))
    var_minus = 0.5 * s * (1.0 + 0.5 * (s - 0.5) * (a_coeff - swing))

    return KUMoments(
        n_atoms=n_atoms,
        lam=lam,
        nu=nu,
        s_x_mean=s_x_mean,
        var_x=var_x,
        var_plus=var_plus,
        var_minus=var_minus,
        a_coeff=a_coeff,
        b_coeff=b_coeff,
        delta_angle=delta,
    )


def ku_rotation_angle(n_atoms: int, lam: float) -> float:
    """Optimal exp(-i theta J_x) rotation after twisting by ``lam``, in [0, pi)."""
    if lam <= 0:
        raise InvalidInputError("optimal rotation is undefined without twisting (lambda = 0)")
    _, _, delta = ku_coefficients(n_atoms, lam)
    return delta % math.pi


def ku_applied_nu(n_atoms: int, lam_assumed: float) -> float:
    """Kitagawa-Ueda angle nu = pi - delta' applied when the experimenter assumes ``lam_assumed``."""
    _, _, delta = ku_coefficients(n_atoms, lam_assumed)
    return math.pi - delta


def ku_xi(n_atoms: int, lam: float) -> float:
    """Wineland parameter of the optimally rotated twisted state."""
    moments = ku_moments(n_atoms, lam, ku_applied_nu(n_atoms, lam))
    return math.sqrt(n_atoms * moments.var_minus) / abs(moments.s_x_mean)


def lambda_opt(n_atoms: int) -> float:
    """Twisting strength of maximal squeezing, 24^(1/6) / (2^(1/3) N^(2/3))."""
    if n_atoms < 1:
        raise InvalidInputError(f"n_atoms must be >= 1, got {n_atoms}")
    if n_atoms < LAMBDA_OPT_MIN_N:
        warnings.warn(
            f"lambda_opt is a large-N asymptote; N={n_atoms} < {LAMBDA_OPT_MIN_N}",
            SmallEnsembleWarning,
            stacklevel=2,
        )
    return 24.0 ** (1.0 / 6.0) / (2.0 ** (1.0 / 3.0) * n_atoms ** (2.0 / 3.0))
