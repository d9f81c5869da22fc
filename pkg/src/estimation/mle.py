import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from fisher import PhaseFamily, TwoParameterModel
from metrics import mom_estimate
from spin_core import ProbDist
from utils.errors import InvalidInputError, NumericalQualityWarning
from utils.optimize import golden_section_maximize

from .likelihood import PHI_DOMAIN, JointLogProbTable, LogProbTable, floored_log
from .sampling import SampleSet

logger = logging.getLogger(__name__)

MLE_TOL = 1e-7
TWO_PARAM_GRID_POINTS = 201
MAX_COORDINATE_PASSES = 200


class BoundaryHitWarning(NumericalQualityWarning):
    """The likelihood maximum sits on the edge of the search domain."""

    pass


class FlatLikelihoodWarning(NumericalQualityWarning):
    """The joint likelihood has singular or non-negative curvature at its maximum."""

    pass


@dataclass(frozen=True)
class EstimateResult:
    phi_star: float
    lambda_star: Optional[float]
    loglik_at_opt: float
    converged: bool
    grid_bounds_hit: bool


class _FixedLambda:
    def __init__(self, model: TwoParameterModel, lam: float):
        self.model = model
        self.lam = lam

    def probs(self, phis) -> np.ndarray:
        return self.model.probs(phis, self.lam)


def _weights(samples: SampleSet | ProbDist) -> np.ndarray:
    if isinstance(samples, SampleSet):
        return samples.counts.astype(float)
    return samples.probs


def _on_edge(x: float, domain: tuple[float, float], tol: float) -> bool:
    return x - domain[0] <= tol or domain[1] - x <= tol


def _warn_boundary(what: str, where: str, domain) -> None:
    warnings.warn(
        f"{what} maximum {where} on the edge of the search domain {domain}",
        BoundaryHitWarning,
        stacklevel=3,
    )


def _maximize_phi(weights: np.ndarray, table: LogProbTable, tol: float) -> EstimateResult:
    model = table.model
    domain = table.domain
    scan = table.scan(weights)
    best = int(np.argmax(scan))
    edge = best in (0, len(scan) - 1)

    def loglik(phi: float) -> float:
        return float(floored_log(model.probs([phi])[0]) @ weights)

    lo = max(domain[0], table.grid[best] - table.step)
    hi = min(domain[1], table.grid[best] + table.step)
    result = golden_section_maximize(loglik, lo, hi, tol=tol)
    phi_star, value = result.x, result.fun
    if scan[best] > value:
        phi_star, value = float(table.grid[best]), float(scan[best])

    edge = edge or _on_edge(phi_star, domain, tol)
    if edge:
        _warn_boundary("phase", f"{phi_star:.6g}", domain)
    return EstimateResult(
        phi_star=phi_star,
        lambda_star=None,
        loglik_at_opt=value,
        converged=result.converged and not edge,
        grid_bounds_hit=edge,
    )


def mle_single(
    samples: SampleSet,
    model: PhaseFamily,
    domain: tuple[float, float] = PHI_DOMAIN,
    table: Optional[LogProbTable] = None,
    tol: float = MLE_TOL,
) -> EstimateResult:
    """Grid scan followed by golden-section refinement of argmax_phi log L(samples | phi).

    ``model`` is held at one twist value, which may differ from the one that
    produced the samples. Pass a prebuilt ``table`` to reuse the grid across trials.
    """
    if table is None:
        table = LogProbTable(model, domain)
    elif table.model is not model or table.domain != tuple(map(float, domain)):
        raise InvalidInputError("log-probability table was built for another model or domain")
    return _maximize_phi(_weights(samples), table, tol)


def pseudo_true_phi(
    actual: ProbDist,
    assumed_model: PhaseFamily,
    domain: tuple[float, float] = PHI_DOMAIN,
    table: Optional[LogProbTable] = None,
    tol: float = MLE_TOL,
) -> float:
    """Infinite-shot limit of the MLE: argmax_phi sum_j P_actual(j) log P_assumed(j | phi)."""
    if table is None:
        table = LogProbTable(assumed_model, domain)
    return _maximize_phi(actual.probs, table, tol).phi_star


def _curvature_is_negative_definite(
    loglik, phi: float, lam: float, h_phi: float, h_lam: float
) -> bool:
    f0 = loglik(phi, lam)
    f_pp = (loglik(phi + h_phi, lam) - 2.0 * f0 + loglik(phi - h_phi, lam)) / h_phi**2
    f_ll = (loglik(phi, lam + h_lam) - 2.0 * f0 + loglik(phi, lam - h_lam)) / h_lam**2
    f_pl = (
        loglik(phi + h_phi, lam + h_lam)
        - loglik(phi + h_phi, lam - h_lam)
        - loglik(phi - h_phi, lam + h_lam)
        + loglik(phi - h_phi, lam - h_lam)
    ) / (4.0 * h_phi * h_lam)
    return f_pp < 0 and f_pp * f_ll - f_pl**2 > 0


def mle_two_param(
    samples: SampleSet,
    model: TwoParameterModel,
    phi_domain: tuple[float, float] = PHI_DOMAIN,
    lambda_domain: tuple[float, float] = (0.0, 0.2),
    points: int = TWO_PARAM_GRID_POINTS,
    table: Optional[JointLogProbTable] = None,
    tol: float = MLE_TOL,
) -> EstimateResult:
    """Joint (phi, lambda) maximum likelihood: coarse grid, then coordinate-wise golden passes.

    A lambda domain collapsed to one point reduces to ``mle_single`` at that twist.
    """
    lam_lo, lam_hi = lambda_domain
    if lam_lo < 0 or lam_hi < lam_lo:
        raise InvalidInputError(f"invalid lambda domain {lambda_domain}")
    if lam_hi == lam_lo:
        fixed = mle_single(samples, _FixedLambda(model, lam_lo), phi_domain, tol=tol)
        return replace(fixed, lambda_star=float(lam_lo))

    if table is None:
        table = JointLogProbTable(model, phi_domain, lambda_domain, points)
    elif table.model is not model:
        raise InvalidInputError("joint log-probability table was built for another model")
    phi_domain, lambda_domain = table.phi_domain, table.lambda_domain
    weights = _weights(samples)
    scan = table.scan(weights)
    j, i = np.unravel_index(int(np.argmax(scan)), scan.shape)
    n_lam, n_phi = scan.shape
    edge = i in (0, n_phi - 1) or j in (0, n_lam - 1)

    def loglik(phi: float, lam: float) -> float:
        return float(floored_log(model.probs([phi], lam)[0]) @ weights)

    d_phi = float(table.phis[1] - table.phis[0])
    d_lam = float(table.lams[1] - table.lams[0])
    phi, lam = float(table.phis[i]), float(table.lams[j])
    value = float(scan[j, i])
    converged = False
    for n_pass in range(MAX_COORDINATE_PASSES):
        at_lam = lam
        phi_res = golden_section_maximize(
            lambda x: loglik(x, at_lam),
            max(phi_domain[0], phi - d_phi),
            min(phi_domain[1], phi + d_phi),
            tol=tol,
        )
        new_phi = phi_res.x if phi_res.fun >= value else phi
        value = max(value, phi_res.fun)
        lam_res = golden_section_maximize(
            lambda x: loglik(new_phi, x),
            max(lambda_domain[0], lam - d_lam),
            min(lambda_domain[1], lam + d_lam),
            tol=tol,
        )
        new_lam = lam_res.x if lam_res.fun >= value else lam
        value = max(value, lam_res.fun)
        move = math.hypot(new_phi - phi, new_lam - lam)
        phi, lam = new_phi, new_lam
        logger.debug("coordinate pass %d: phi=%.9g lambda=%.9g move=%.3g", n_pass, phi, lam, move)
        if move < tol:
            converged = True
            break

    edge = edge or _on_edge(phi, phi_domain, tol) or _on_edge(lam, lambda_domain, tol)
    if edge:
        _warn_boundary("(phi, lambda)", f"({phi:.6g}, {lam:.6g})", (phi_domain, lambda_domain))
    elif not _curvature_is_negative_definite(loglik, phi, lam, 0.1 * d_phi, min(0.1 * d_lam, lam)):
        warnings.warn(
            f"log-likelihood is not locally concave at phi={phi:.6g}, lambda={lam:.6g}",
            FlatLikelihoodWarning,
            stacklevel=2,
        )
    return EstimateResult(
        phi_star=phi,
        lambda_star=lam,
        loglik_at_opt=value,
        converged=converged and not edge,
        grid_bounds_hit=edge,
    )


def mom_pipeline(samples: SampleSet | ProbDist, jx0_assumed: float) -> EstimateResult:
    """Method-of-moments phase from the sample mean of J_z; a ProbDist is the noise-free record."""
    jz_mean = samples.mean()
    saturated = abs(jz_mean) > abs(jx0_assumed)
    phi = mom_estimate(jz_mean, jx0_assumed, clamp=True)
    return EstimateResult(
        phi_star=phi,
        lambda_star=None,
        loglik_at_opt=math.nan,
        converged=not saturated,
        grid_bounds_hit=saturated,
    )
