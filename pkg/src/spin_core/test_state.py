import math

import numpy as np
import pytest
from scipy.stats import binom

from spin_core import (
    Basis,
    DimensionMismatchError,
    NonHermitianError,
    NormalizationError,
    ProbDist,
    SpinState,
    apply_hermitian_evolution,
    apply_jz_squared_phase,
    build_ops,
    css_x,
    expectation,
    fidelity,
    jz_eigenstate,
    outcome_distribution,
    rotate,
    sym_covariance,
    variance,
)
from test_utils.spin_fixtures import css100, ops100, random_state, rng  # noqa


def _series_expm(matrix: np.ndarray, terms: int = 40) -> np.ndarray:
    result = np.eye(matrix.shape[0], dtype=complex)
    term = np.eye(matrix.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ matrix / k
        result = result + term
    return result


def test_css_small_amplitudes():
    state = css_x(2)
    assert np.allclose(state.amplitudes, [0.5, 1 / math.sqrt(2), 0.5], atol=1e-14)


def test_css_moments(css100, ops100):
    assert expectation(css100, ops100.jx) == pytest.approx(50.0, abs=1e-9)
    assert variance(css100, ops100.jz) == pytest.approx(25.0, abs=1e-9)
    assert expectation(css100, ops100.jy) == pytest.approx(0.0, abs=1e-10)
    assert expectation(css100, ops100.jz) == pytest.approx(0.0, abs=1e-10)
    assert sym_covariance(css100, ops100.jz, ops100.jy) == pytest.approx(0.0, abs=1e-10)


def test_css_is_max_jx_eigenstate():
    ops = build_ops(8)
    state = css_x(8)
    applied = ops.jx @ state.amplitudes
    assert np.allclose(applied, 4.0 * state.amplitudes, atol=1e-12)


def test_state_validation():
    with pytest.raises(NormalizationError):
        SpinState(n_atoms=1, amplitudes=np.array([1.0, 1.0]))
    with pytest.raises(DimensionMismatchError):
        SpinState(n_atoms=2, amplitudes=np.array([1.0, 0.0]))
    with pytest.raises(NormalizationError):
        SpinState.from_amplitudes(np.zeros(3))


def test_state_is_immutable(css100):
    with pytest.raises(ValueError):
        css100.amplitudes[0] = 1.0


def test_rotate_identity_and_periodicity(css100):
    same = rotate(css100, "x", 0.0)
    assert np.max(np.abs(same.amplitudes - css100.amplitudes)) < 1e-14

    tilted = rotate(css100, "y", 0.3)
    full_turn = rotate(tilted, "x", 2 * math.pi)
    assert fidelity(full_turn, tilted) == pytest.approx(1.0, abs=1e-10)


def test_rotate_about_z_moves_x_to_y(css100, ops100):
    turned = rotate(css100, "z", math.pi / 2)
    assert expectation(turned, ops100.jy) == pytest.approx(50.0, abs=1e-8)
    assert abs(expectation(turned, ops100.jx)) < 1e-8


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_rotation_composition(axis, rng):
    state = random_state(20, rng)
    stepwise = rotate(rotate(state, axis, 0.37), axis, -1.1)
    direct = rotate(state, axis, 0.37 - 1.1)
    assert fidelity(stepwise, direct) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_rotation_preserves_norm(axis, rng):
    for _ in range(5):
        state = random_state(30, rng)
        out = rotate(state, axis, rng.uniform(-math.pi, math.pi))
        assert out.norm() == pytest.approx(1.0, abs=1e-10)


def test_jz_squared_phase_identity_cases(css100):
    assert np.array_equal(apply_jz_squared_phase(css100, 0.0).amplitudes, css100.amplitudes)
    wrapped = apply_jz_squared_phase(css100, 2 * math.pi)
    assert fidelity(wrapped, css100) == pytest.approx(1.0, abs=1e-10)


def test_jz_squared_phase_mean_spin_contraction(css100, ops100):
    twisted = apply_jz_squared_phase(css100, 0.02)
    expected = 50.0 * math.cos(0.02) ** 99
    assert expectation(twisted, ops100.jx) == pytest.approx(expected, rel=1e-10)


def test_hermitian_evolution_matches_z_rotation(ops100, css100):
    tilted = rotate(css100, "y", 0.4)
    via_generator = apply_hermitian_evolution(tilted, ops100.jz, 0.8)
    via_rotation = rotate(tilted, "z", 0.8)
    assert fidelity(via_generator, via_rotation) == pytest.approx(1.0, abs=1e-10)


def test_hermitian_evolution_zero_generator(css100):
    out = apply_hermitian_evolution(css100, np.zeros((101, 101)), 3.0)
    assert np.max(np.abs(out.amplitudes - css100.amplitudes)) < 1e-12


def test_hermitian_evolution_against_series():
    ops = build_ops(2)
    generator = ops.jz @ ops.jy + ops.jy @ ops.jz
    state = css_x(2)
    time = 0.7
    expected = _series_expm(-1j * time * generator) @ state.amplitudes
    out = apply_hermitian_evolution(state, generator, time)
    assert np.max(np.abs(out.amplitudes - expected)) < 1e-9


def test_hermitian_evolution_twist_sign_convention(css100, ops100):
    strength = 0.05
    via_phase = apply_jz_squared_phase(css100, strength)
    via_generator = apply_hermitian_evolution(css100, ops100.jz @ ops100.jz, -strength)
    assert fidelity(via_phase, via_generator) == pytest.approx(1.0, abs=1e-10)


def test_hermitian_evolution_rejects_bad_generators(css100):
    with pytest.raises(NonHermitianError):
        apply_hermitian_evolution(css100, np.triu(np.ones((101, 101))), 1.0)
    with pytest.raises(DimensionMismatchError):
        apply_hermitian_evolution(css100, np.eye(3), 1.0)


def test_casimir_variance_identity(rng):
    ops = build_ops(12)
    state = random_state(12, rng)
    j = 6.0
    variances = sum(variance(state, op) for op in (ops.jx, ops.jy, ops.jz))
    means_sq = sum(expectation(state, op) ** 2 for op in (ops.jx, ops.jy, ops.jz))
    assert variances == pytest.approx(j * (j + 1) - means_sq, abs=1e-8)


def test_expectation_rejects_non_hermitian(css100):
    with pytest.raises(NonHermitianError):
        expectation(css100, np.triu(np.ones((101, 101))))


def test_outcome_distribution_z_basis():
    delta = outcome_distribution(jz_eigenstate(6, 1.0), Basis.Z)
    assert delta.probs[2] == pytest.approx(1.0)
    assert delta.probs.sum() == pytest.approx(1.0, abs=1e-12)

    dist = outcome_distribution(css_x(20), "z")
    expected = binom.pmf(np.arange(21), 20, 0.5)
    assert np.allclose(dist.probs, expected, atol=1e-14)
    assert np.allclose(dist.outcomes, np.arange(10, -11, -1))


def test_outcome_distribution_x_basis(css100):
    dist = outcome_distribution(css100, Basis.X)
    assert dist.probs[0] == pytest.approx(1.0, abs=1e-10)
    assert dist.outcomes[0] == 50.0
    assert abs(dist.probs.sum() - 1.0) < 1e-12


def test_probdist_clamps_rounding_noise():
    dist = ProbDist(outcomes=np.array([0.5, -0.5]), probs=np.array([1.0 + 1e-15, -1e-15]))
    assert dist.probs[1] == 0.0
    with pytest.raises(NormalizationError):
        ProbDist(outcomes=np.array([0.5, -0.5]), probs=np.array([1.1, -0.1]))
    with pytest.raises(NormalizationError):
        ProbDist(outcomes=np.array([0.5, -0.5]), probs=np.array([0.3, 0.3]))


def test_normalization_tolerances():
    SpinState(n_atoms=1, amplitudes=np.array([1.0 + 5e-11, 0.0]))
    with pytest.raises(NormalizationError):
        SpinState(n_atoms=1, amplitudes=np.array([1.0 + 1e-9, 0.0]))

    ProbDist(outcomes=np.array([0.5, -0.5]), probs=np.array([0.5 + 5e-13, 0.5]))
    with pytest.raises(NormalizationError):
        ProbDist(outcomes=np.array([0.5, -0.5]), probs=np.array([0.5 + 1e-11, 0.5]))


def test_outcome_distribution_of_loosely_normalized_state():
    state = SpinState(n_atoms=1, amplitudes=np.array([1.0 + 5e-11, 0.0]))
    assert outcome_distribution(state, "z").probs.sum() == pytest.approx(1.0, abs=1e-15)
