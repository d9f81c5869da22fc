import math

import numpy as np
import pytest
from pydantic import ValidationError

from estimation import empirical_stats, mom_pipeline, run_trials, sample_outcomes
from fisher import classical_fisher
from mixedstate import (
    MixtureClippingWarning,
    MixturePhaseModel,
    MixtureSpec,
    build_mixture,
    crb_mixed,
    mixed_moments,
    mom_sensitivity_mixed,
    quadrature,
)
from schemes import PhaseModel, PrepConfig, prepare
from spin_core import build_ops, expectation, variance

STD = "standard_deviation"


def _tat(delta: float, n_nodes: int = 41, lam0: float = 0.02, n_atoms: int = 100):
    spec = MixtureSpec(lambda0=lam0, delta_lambda=delta, n_nodes=n_nodes, spread_convention=STD)
    return build_mixture(spec, "tat_squeezed", n_atoms, workers=1)


@pytest.mark.parametrize(
    "scheme, n_atoms, lam0",
    [("oat_squeezed", 100, 0.03), ("tat_squeezed", 100, 0.02), ("tnt", 50, 0.05)],
)
def test_zero_spread_is_the_pure_preparation(scheme, n_atoms, lam0):
    mixture = build_mixture(MixtureSpec(lambda0=lam0), scheme, n_atoms, workers=1)
    assert len(mixture) == 1
    assert mixture.weights.tolist() == [1.0]

    pure = prepare(PrepConfig(scheme=scheme, n_atoms=n_atoms, lambda_actual=lam0))
    ops = build_ops(n_atoms)
    moments = mixed_moments(mixture, "x")
    assert moments.mean == pytest.approx(expectation(pure, ops.jx), abs=1e-10)
    assert moments.variance == pytest.approx(variance(pure, ops.jx), abs=1e-10)

    pure_crb = 1 / math.sqrt(classical_fisher(PhaseModel(pure, "z", ops), 0.05).value)
    assert crb_mixed(mixture, "z", 0.05) == pytest.approx(pure_crb, rel=1e-6)


def test_weights_are_symmetric_and_normalized():
    lambdas, weights = quadrature(MixtureSpec(lambda0=0.05, delta_lambda=1e-4))
    assert len(lambdas) == 41
    assert weights.sum() == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(weights, weights[::-1], rtol=1e-12)
    np.testing.assert_allclose(lambdas - 0.05, -(lambdas - 0.05)[::-1], atol=1e-15)
    assert lambdas[-1] - 0.05 == pytest.approx(4 * 0.01)


def test_spread_conventions():
    printed = MixtureSpec(lambda0=0.1, delta_lambda=4e-4)
    assert printed.spread == pytest.approx(0.02)
    assert MixtureSpec(lambda0=0.1, delta_lambda=4e-4, spread_convention=STD).spread == 4e-4


def test_negative_nodes_are_clipped():
    with pytest.warns(MixtureClippingWarning):
        lambdas, weights = quadrature(MixtureSpec(lambda0=0.02, delta_lambda=0.002))
    assert (lambdas >= 0).all()
    assert len(lambdas) < 41
    assert weights.sum() == pytest.approx(1.0, abs=1e-10)


def test_invalid_spec():
    with pytest.raises(ValidationError):
        MixtureSpec(lambda0=0.02, delta_lambda=-1e-3)
    with pytest.raises(ValidationError):
        MixtureSpec(lambda0=-0.01)


def test_components_iterate_weight_state_pairs():
    mixture = _tat(0.002, n_nodes=5, n_atoms=20)
    pairs = list(mixture)
    assert len(pairs) == 5
    assert sum(w for w, _ in pairs) == pytest.approx(1.0)
    assert all(state.n_atoms == 20 for _, state in pairs)


def test_quadrature_converges():
    coarse, fine = _tat(0.002, 41), _tat(0.002, 81)
    jz_coarse = mixed_moments(coarse, "z", phi=0.05).mean
    jz_fine = mixed_moments(fine, "z", phi=0.05).mean
    assert abs(jz_coarse - jz_fine) < 1e-6
    assert mom_sensitivity_mixed(coarse, 0.05) == pytest.approx(
        mom_sensitivity_mixed(fine, 0.05), rel=1e-3
    )
    assert crb_mixed(coarse, "z", 0.05) == pytest.approx(crb_mixed(fine, "z", 0.05), rel=1e-3)


def test_mixture_variance_exceeds_mean_node_variance():
    mixture = _tat(0.004)
    moments = mixed_moments(mixture, "x")
    assert moments.variance >= moments.node_variances @ mixture.weights - 1e-12
    spread_of_means = moments.node_means.max() - moments.node_means.min()
    assert spread_of_means > 0


def test_tat_jx_variance_grows_with_spread():
    variances = [mixed_moments(_tat(d), "x").variance for d in (0.0, 0.001, 0.002, 0.004)]
    assert all(b > a for a, b in zip(variances, variances[1:]))


def test_css_mom_sensitivity_is_shot_noise():
    mixture = build_mixture(MixtureSpec(lambda0=0.0), "tat_squeezed", 100, workers=1)
    assert mom_sensitivity_mixed(mixture, 0.0, shots=100) == pytest.approx(0.01, rel=1e-6)


@pytest.mark.parametrize("delta", [0.0, 0.002, 0.004])
def test_crb_never_exceeds_mom(delta):
    mixture = _tat(delta)
    assert crb_mixed(mixture, "z", 0.05) <= mom_sensitivity_mixed(mixture, 0.05) * (1 + 1e-6)


def test_oat_mom_sensitivity_grows_with_spread():
    def sensitivity(delta: float) -> float:
        spec = MixtureSpec(lambda0=0.03, delta_lambda=delta, spread_convention=STD)
        return mom_sensitivity_mixed(build_mixture(spec, "oat_squeezed", 100, workers=1), 0.0)

    values = [sensitivity(d) for d in (0.0, 0.002, 0.004, 0.006)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_oat_nodes_share_the_mean_twist_rotation():
    spec = MixtureSpec(lambda0=0.03, delta_lambda=0.002, n_nodes=3, spread_convention=STD)
    mixture = build_mixture(spec, "oat_squeezed", 50, workers=1)
    reference = prepare(PrepConfig(scheme="oat_squeezed", n_atoms=50, lambda_actual=0.03))
    assert abs(np.vdot(mixture.states[1].amplitudes, reference.amplitudes)) == pytest.approx(1.0)
    shifted = prepare(
        PrepConfig(
            scheme="oat_squeezed",
            n_atoms=50,
            lambda_actual=float(mixture.lambdas[2]),
            lambda_assumed=0.03,
        )
    )
    np.testing.assert_allclose(mixture.states[2].amplitudes, shifted.amplitudes, atol=1e-12)


@pytest.mark.slow
def test_mom_with_known_mixture_is_unbiased():
    mixture = _tat(0.004)
    phi, shots = 0.05, 1000
    jx0 = mixed_moments(mixture, "x").mean
    dist = MixturePhaseModel(mixture).distribution(phi)

    def trial(i: int):
        return mom_pipeline(sample_outcomes(dist, shots, 8080, i), jx0)

    stats = empirical_stats(run_trials(trial, 50), phi)
    assert abs(stats.bias) < 4 * stats.bias_se
