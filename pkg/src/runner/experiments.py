"""Data series behind each experiment.

Every pipeline returns a DataFrame whose leading columns are the documented
contract for that experiment; diagnostic columns follow. Rows come out in grid
order and Monte-Carlo trial ``r`` of grid point ``i`` always draws from stream
``i * repeats + r`` of the master seed, so reruns are byte-identical.
"""

import logging
import math
import sys
from itertools import product
from typing import Callable, Iterable, Optional, TypeVar

import numpy as np
import pandas as pd
from tqdm import tqdm

from config import Settings
from estimation import (
    JointLogProbTable,
    LogProbTable,
    default_phi_domain,
    empirical_stats,
    mle_single,
    mle_two_param,
    mom_pipeline,
    pseudo_true_phi,
    run_trials,
    sample_outcomes,
)
from fisher import crb, fisher_matrix, misspec_bias, misspecified_q, qfi_pure, two_param_q
from largescale import ThresholdSpec, delta_lambda_crit, e_metric_analytic, ku_xi
from metrics import (
    bias_coefficient,
    error_metric,
    mom_estimate,
    moments_from_state,
    mse,
    sigma_q_linearized,
    wineland_xi,
)
from mixedstate import MixtureSpec, build_mixture, crb_mixed, mixed_moments, mom_sensitivity_mixed
from schemes import (
    PhaseModel,
    PrepConfig,
    SchemeFamily,
    prepare,
    prepare_stages,
    regime_label,
    twist,
)
from spin_core import CollectiveOps, build_ops, expectation
from utils.errors import InvalidInputError

from .models import ExperimentConfig, ExperimentKind

logger = logging.getLogger(__name__)

T = TypeVar("T")

Pipeline = Callable[[ExperimentConfig, Settings], pd.DataFrame]

SQUEEZE_COLUMNS = ["lambda", "xi", "fq_over_n", "regime"]
MOM_GRID_COLUMNS = ["lambda", "lambda_assumed", "B", "Q", "E"]
MOM_GRID_MC_COLUMNS = ["bias_mc", "bias_se", "bias_theory", "q_mc", "bias_linear_exact"]
TRADEOFF_COLUMNS = [
    "lambda",
    "shots",
    "lambda_p",
    "mse_mc",
    "mse_se",
    "mse_theory",
    "ratio_mc",
    "ratio_theory",
]
DELTA_CRIT_COLUMNS = [
    "n_atoms",
    "mode",
    "factor",
    "lambda",
    "e_unbiased",
    "crossed",
    "lambda_assumed",
    "ratio",
    "e_at_crossing",
]
NON_GAUSS_COLUMNS = [
    "lambda",
    "dlambda",
    "bias_mc",
    "bias_fisher",
    "q_over_qcrb",
    "se",
    "bias_pseudo_true",
    "q_mc_over_qcrb",
    "q_over_crb",
    "boundary_hits",
]
MOM_VS_MLE_COLUMNS = [
    "lambda",
    "dlambda",
    "bias_mom",
    "bias_mom_linear",
    "bias_mle_fisher",
    "bias_mle_pseudo_true",
]
TWO_PARAM_COLUMNS = [
    "lambda",
    "sqrtN_mse_single",
    "sqrtN_mse_two",
    "crb_two",
    "dlambda",
    "crb_single",
    "lambda_star_mean",
]
MIXED_COLUMNS = [
    "lambda0",
    "delta_lambda",
    "mom_noise",
    "crb_noise",
    "var_jx",
    "var_jz",
    "nodes",
]


def _progress(items: Iterable[T], desc: str, total: Optional[int] = None) -> Iterable[T]:
    return tqdm(items, desc=desc, total=total, disable=not sys.stderr.isatty())


def _prep(
    config: ExperimentConfig, settings: Settings, lam: float, lam_assumed: Optional[float] = None
) -> PrepConfig:
    if lam_assumed is not None and lam_assumed < 0:
        raise InvalidInputError(f"assumed twist {lam_assumed} is negative")
    return PrepConfig(
        scheme=config.scheme,
        n_atoms=config.n_atoms,
        lambda_actual=lam,
        lambda_assumed=lam_assumed,
        rotation_policy=config.rotation_policy,
        dimension_cap=settings.dimension_cap,
    )


def _assumed_jx0(config: ExperimentConfig, settings: Settings, lam: float, ops: CollectiveOps) -> float:
    # J_x is untouched by the readout rotation, so the twisted state is enough.
    return expectation(twist(config.scheme, config.n_atoms, lam, settings.dimension_cap), ops.jx)


def squeeze_sweep(config: ExperimentConfig, settings: Settings) -> pd.DataFrame:
    n = config.n_atoms
    ops = None if config.analytic else build_ops(n, settings.dimension_cap)
    rows = []
    for lam in _progress(config.lambda_values, "lambda"):
        if ops is None:
            xi, fq_over_n = ku_xi(n, lam), math.nan
        else:
            state = prepare(_prep(config, settings, lam), ops)
            xi = wineland_xi(state, ops)
            fq_over_n = qfi_pure(state, "y", ops) / n
        rows.append(
            {
                "lambda": lam,
                "xi": xi,
                "fq_over_n": fq_over_n,
                "regime": regime_label(config.scheme, lam),
            }
        )
    return pd.DataFrame(rows, columns=SQUEEZE_COLUMNS)


def _mom_trials(dist, jx0_assumed: float, config: ExperimentConfig, point: int) -> list[float]:
    shots, repeats = config.shots[0], config.repeats

    def trial(r: int) -> float:
        samples = sample_outcomes(dist, shots, config.master_seed, point * repeats + r)
        return mom_pipeline(samples, jx0_assumed).phi_star

    return run_trials(trial, repeats, desc="MOM trials")


def mom_error_grid(config: ExperimentConfig, settings: Settings) -> pd.DataFrame:
    n, phi = config.n_atoms, config.phi
    ops = build_ops(n, settings.dimension_cap)
    grid = list(product(config.lambda_values, config.lambda_assumed_values))
    columns = MOM_GRID_COLUMNS + (MOM_GRID_MC_COLUMNS if config.repeats else [])
    rows = []
    for point, (lam, lam_assumed) in enumerate(_progress(grid, "grid")):
        stages = prepare_stages(_prep(config, settings, lam, lam_assumed), ops)
        before = moments_from_state(stages.twisted, ops)
        jx0_assumed = _assumed_jx0(config, settings, lam_assumed, ops)
        b = bias_coefficient(before.jx0, jx0_assumed)
        q = math.sqrt(sigma_q_linearized(before, stages.theta, jx0_assumed))
        row = {"lambda": lam, "lambda_assumed": lam_assumed, "B": b, "Q": q, "E": error_metric(n, q, b)}

        if config.repeats:
            dist = PhaseModel(stages.prepared, "z", ops).distribution(phi)
            stats = empirical_stats(_mom_trials(dist, jx0_assumed, config, point), phi)
            row.update(
                bias_mc=stats.bias,
                bias_se=stats.bias_se,
                bias_theory=b * phi,
                q_mc=math.sqrt(config.shots[0] * stats.variance),
                # Small-phi limit of arcsin((actual / assumed) sin phi) - phi; B * phi is its first order.
                bias_linear_exact=(before.jx0 / jx0_assumed - 1.0) * phi,
            )
        logger.info("lambda=%.6g lambda'=%.6g: B=%.6g Q=%.6g", lam, lam_assumed, b, q)
        rows.append(row)
    return pd.DataFrame(rows, columns=columns)


def bias_variance_tradeoff(config: ExperimentConfig, settings: Settings) -> pd.DataFrame:
    """Empirical MOM mean-squared error against the estimator twist lambda_p.

    All lambda_p share the same sample means (common random numbers), so the
    ratios isolate the effect of the estimator choice.
    """
    phi, repeats = config.phi, config.repeats
    ops = build_ops(config.n_atoms, settings.dimension_cap)
    rows = []
    point = 0
    for lam in _progress(config.lambda_values, "lambda"):
        stages = prepare_stages(_prep(config, settings, lam), ops)
        before = moments_from_state(stages.twisted, ops)
        dist = PhaseModel(stages.prepared, "z", ops).distribution(phi)
        lambda_ps = sorted(set(config.lambda_assumed_values) | {lam})
        jx0 = {lp: _assumed_jx0(config, settings, lp, ops) for lp in lambda_ps}

        def theory(lp: float, shots: int) -> float:
            q = math.sqrt(sigma_q_linearized(before, stages.theta, jx0[lp]))
            return mse(bias_coefficient(before.jx0, jx0[lp]), phi, q, shots)

        for shots in config.shots:
            base = point * repeats

            def sample_mean(r: int) -> float:
                return sample_outcomes(dist, shots, config.master_seed, base + r).mean()

            means = run_trials(sample_mean, repeats, desc="MOM trials")
            point += 1

            def squared_errors(lp: float) -> np.ndarray:
                estimates = np.array([mom_estimate(m, jx0[lp], clamp=True) for m in means])
                return (estimates - phi) ** 2

            reference_mc = float(squared_errors(lam).mean())
            reference_theory = theory(lam, shots)
            for lp in lambda_ps:
                errors = squared_errors(lp)
                mse_mc = float(errors.mean())
                mse_theory = theory(lp, shots)
                rows.append(
                    {
                        "lambda": lam,
                        "shots": shots,
                        "lambda_p": lp,
                        "mse_mc": mse_mc,
                        "mse_se": float(errors.std(ddof=1) / math.sqrt(repeats)),
                        "mse_theory": mse_theory,
                        "ratio_mc": mse_mc / reference_mc,
                        "ratio_theory": mse_theory / reference_theory,
                    }
                )
    return pd.DataFrame(rows, columns=TRADEOFF_COLUMNS)


def delta_crit(config: ExperimentConfig, settings: Settings) -> pd.DataFrame:
    rows = []
    grid = list(product(config.n_atoms_grid, config.thresholds))
    for n, factor in _progress(grid, "thresholds"):
        result = delta_lambda_crit(n, ThresholdSpec(mode=config.threshold_mode, factor=factor))
        rows.append(
            {
                "n_atoms": n,
                "mode": config.threshold_mode.value,
                "factor": factor,
                "lambda": result.lam,
                "e_unbiased": e_metric_analytic(n, result.lam, result.lam).e_metric,
                "crossed": result.crossed,
                "lambda_assumed": result.lambda_assumed,
                "ratio": result.ratio,
                "e_at_crossing": result.e_at_crossing,
            }
        )
    return pd.DataFrame(rows, columns=DELTA_CRIT_COLUMNS)


def non_gauss_mc(config: ExperimentConfig, settings: Settings) -> pd.DataFrame:
    """Misspecified MLE: Monte-Carlo bias and spread against the Fisher-matrix and sandwich predictions."""
    phi, shots, repeats = config.phi, config.shots[0], config.repeats
    domain = default_phi_domain(config.basis)
    grid = list(product(config.lambda_values, config.dlambdas))
    rows = []
    for point, (lam, dlam) in enumerate(_progress(grid, "grid")):
        family = SchemeFamily(_prep(config, settings, lam, lam + dlam), config.basis)
        assumed = family.at(lam + dlam)
        dist = family.distribution(phi, lam)
        table = LogProbTable(assumed, domain)

        def trial(r: int):
            samples = sample_outcomes(dist, shots, config.master_seed, point * repeats + r)
            return mle_single(samples, assumed, domain, table)

        results = run_trials(trial, repeats, desc="MLE trials")
        stats = empirical_stats(results, phi)
        fm = fisher_matrix(family, phi, lam)
        # Quantum bound of the prepared state, independent of the readout.
        q_qcrb = crb(qfi_pure(family.state(lam), "y", family.ops))
        phi_pseudo = pseudo_true_phi(dist, assumed, domain, table)
        q_sandwich = misspecified_q(dist, assumed, phi_pseudo)
        rows.append(
            {
                "lambda": lam,
                "dlambda": dlam,
                "bias_mc": stats.bias,
                "bias_fisher": misspec_bias(fm, dlam),
                "q_over_qcrb": q_sandwich / q_qcrb,
                "se": stats.bias_se,
                "bias_pseudo_true": phi_pseudo - phi,
                "q_mc_over_qcrb": math.sqrt(shots * stats.variance) / q_qcrb,
                "q_over_crb": q_sandwich / crb(fm.f_phiphi),
                "boundary_hits": sum(r.grid_bounds_hit for r in results),
            }
        )
    return pd.DataFrame(rows, columns=NON_GAUSS_COLUMNS)


def mom_vs_mle(config: ExperimentConfig, settings: Settings) -> pd.DataFrame:
    """Noise-free bias of the J_z moment estimator and of the misspecified MLE."""
    n, phi = config.n_atoms, config.phi
    ops = build_ops(n, settings.dimension_cap)
    domain = default_phi_domain(config.basis)
    rows = []
    for lam, dlam in _progress(list(product(config.lambda_values, config.dlambdas)), "grid"):
        prep = _prep(config, settings, lam, lam + dlam)
        stages = prepare_stages(prep, ops)
        jx0_actual = expectation(stages.twisted, ops.jx)
        jx0_assumed = _assumed_jx0(config, settings, lam + dlam, ops)
        jz_mean = PhaseModel(stages.prepared, "z", ops).mean(phi)

        family = SchemeFamily(prep, config.basis)
        pseudo = pseudo_true_phi(family.distribution(phi, lam), family.at(lam + dlam), domain)
        rows.append(
            {
                "lambda": lam,
                "dlambda": dlam,
                "bias_mom": mom_estimate(jz_mean, jx0_assumed, clamp=True) - phi,
                "bias_mom_linear": bias_coefficient(jx0_actual, jx0_assumed) * phi,
                "bias_mle_fisher": misspec_bias(fisher_matrix(family, phi, lam), dlam),
                "bias_mle_pseudo_true": pseudo - phi,
            }
        )
    return pd.DataFrame(rows, columns=MOM_VS_MLE_COLUMNS)


def two_param_rescue(config: ExperimentConfig, settings: Settings) -> pd.DataFrame:
    """Single-parameter MLE at the wrong twist against the joint (phi, lambda) MLE."""
    n, phi, shots, repeats = config.n_atoms, config.phi, config.shots[0], config.repeats
    domain = default_phi_domain(config.basis)
    grid = list(product(config.lambda_values, config.dlambdas))
    rows = []
    for point, (lam, dlam) in enumerate(_progress(grid, "grid")):
        family = SchemeFamily(_prep(config, settings, lam, lam + dlam), config.basis)
        assumed = family.at(lam + dlam)
        dist = family.distribution(phi, lam)
        table = LogProbTable(assumed, domain)
        joint = JointLogProbTable(family, domain, config.lambda_domain, config.joint_grid_points)

        def trial(r: int):
            samples = sample_outcomes(dist, shots, config.master_seed, point * repeats + r)
            return mle_single(samples, assumed, domain, table), mle_two_param(
                samples, family, domain, config.lambda_domain, table=joint
            )

        pairs = run_trials(trial, repeats, desc="MLE trials")
        single = empirical_stats([p[0] for p in pairs], phi)
        two = empirical_stats([p[1] for p in pairs], phi)
        fm = fisher_matrix(family, phi, lam)
        rows.append(
            {
                "lambda": lam,
                "sqrtN_mse_single": math.sqrt(n * single.mse),
                "sqrtN_mse_two": math.sqrt(n * two.mse),
                "crb_two": math.sqrt(n / shots) * two_param_q(fm),
                "dlambda": dlam,
                "crb_single": math.sqrt(n) * crb(fm.f_phiphi, shots),
                "lambda_star_mean": float(np.mean([p[1].lambda_star for p in pairs])),
            }
        )
    return pd.DataFrame(rows, columns=TWO_PARAM_COLUMNS)


def mixed_state(config: ExperimentConfig, settings: Settings) -> pd.DataFrame:
    """Shot-noise-scaled MOM and Cramer-Rao noise of the randomly twisted ensemble."""
    n, phi = config.n_atoms, config.phi
    rows = []
    grid = list(product(config.lambda_values, config.delta_lambdas))
    for lam0, delta in _progress(grid, "mixtures"):
        spec = MixtureSpec(
            lambda0=lam0,
            delta_lambda=delta,
            n_nodes=config.n_nodes,
            spread_convention=config.spread_convention,
        )
        mixture = build_mixture(spec, config.scheme, n, settings.dimension_cap)
        rows.append(
            {
                "lambda0": lam0,
                "delta_lambda": delta,
                "mom_noise": math.sqrt(n) * mom_sensitivity_mixed(mixture, phi),
                "crb_noise": math.sqrt(n) * crb_mixed(mixture, config.basis, phi),
                "var_jx": mixed_moments(mixture, "x").variance,
                "var_jz": mixed_moments(mixture, "z", phi).variance,
                "nodes": len(mixture),
            }
        )
    return pd.DataFrame(rows, columns=MIXED_COLUMNS)


PIPELINES: dict[ExperimentKind, Pipeline] = {
    ExperimentKind.SQUEEZE_SWEEP: squeeze_sweep,
    ExperimentKind.MOM_ERROR_GRID: mom_error_grid,
    ExperimentKind.BIAS_VARIANCE_TRADEOFF: bias_variance_tradeoff,
    ExperimentKind.DELTA_CRIT: delta_crit,
    ExperimentKind.NON_GAUSS_MC: non_gauss_mc,
    ExperimentKind.MOM_VS_MLE: mom_vs_mle,
    ExperimentKind.TWO_PARAM_RESCUE: two_param_rescue,
    ExperimentKind.MIXED_STATE: mixed_state,
}
