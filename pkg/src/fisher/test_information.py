import math
import warnings

import numpy as np
import pytest

from fisher import (
    DegenerateFisherError,
    DerivativeQualityWarning,
    DistributionFamily,
    FisherMatrix,
    UnidentifiableModelError,
    classical_fisher,
    crb,
    fisher_matrix,
    misspec_bias,
    misspecified_q,
    qfi_pure,
    sandwich_variance,
    two_param_q,
)
from schemes import PhaseModel, PrepConfig, SchemeFamily, prepare
from spin_core import ProbDist, jz_eigenstate
from test_utils.spin_fixtures import css100, ops100, random_state, rng  # noqa
from utils.errors import NumericalQualityError


class _LambdaBlind:
    """A (phi, lambda) model that ignores lambda."""

    def __init__(self, model: PhaseModel):
        self.model = model

    def probs(self, phis, lam):
        return self.model.probs(phis)


def _two_outcome(p: float) -> ProbDist:
    return ProbDist(outcomes=np.array([0.5, -0.5]), probs=np.array([p, 1.0 - p]))


def test_constant_family_has_no_information():
    family = DistributionFamily(lambda phi: _two_outcome(0.3))
    estimate = classical_fisher(family, 0.1)
    assert estimate.value == 0.0
    assert estimate.reliable


@pytest.mark.parametrize("phi", [0.0, 0.3, -0.7])
def test_css_fisher_is_shot_noise(phi, css100, ops100):
    estimate = classical_fisher(PhaseModel(css100, "z", ops100), phi)
    assert estimate.value == pytest.approx(100.0, abs=0.1)
    assert estimate.drift < 1e-4


def test_fisher_step_independent(css100, ops100):
    model = PhaseModel(css100, "z", ops100)
    coarse = classical_fisher(model, 0.05, step=1e-4).value
    fine = classical_fisher(model, 0.05, step=1e-5).value
    assert coarse == pytest.approx(fine, rel=1e-4)


def test_qfi_pure(css100):
    assert qfi_pure(css100, "y") == pytest.approx(100.0, rel=1e-12)
    assert qfi_pure(jz_eigenstate(100, 10), "z") == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("basis", ["z", "x"])
def test_classical_fisher_below_quantum(basis, rng):
    for _ in range(5):
        state = random_state(12, rng)
        model = PhaseModel(state, basis)
        bound = qfi_pure(state, "y")
        for phi in (0.0, 0.3, -1.0):
            assert classical_fisher(model, phi).value <= bound * (1.0 + 1e-6)


def test_kinked_family_is_flagged():
    family = DistributionFamily(lambda phi: _two_outcome(0.5 + 0.4 * math.tanh(1e5 * phi)))
    with pytest.warns(DerivativeQualityWarning):
        estimate = classical_fisher(family, 0.0)
    assert not estimate.reliable


def test_lambda_blind_model(css100, ops100):
    model = PhaseModel(css100, "z", ops100)
    fm = fisher_matrix(_LambdaBlind(model), 0.02, 0.05)
    assert fm.f_philambda == 0.0
    assert fm.f_lambdalambda == 0.0
    assert fm.f_phiphi == pytest.approx(classical_fisher(model, 0.02).value, rel=1e-6)
    assert misspec_bias(fm, 0.01) == 0.0


@pytest.mark.parametrize("scheme, lam", [("oat_non_gauss", 0.1), ("tnt", 0.05), ("tat_squeezed", 0.02)])
def test_scheme_fisher_matrix_is_consistent(scheme, lam):
    family = SchemeFamily(PrepConfig(scheme=scheme, n_atoms=30, lambda_actual=lam))
    with warnings.catch_warnings():
        warnings.simplefilter("error", DerivativeQualityWarning)
        fm = fisher_matrix(family, 0.02, lam)
    assert fm.determinant >= -1e-8 * fm.trace**2
    slice_fisher = classical_fisher(family.at(lam), 0.02).value
    assert fm.f_phiphi == pytest.approx(slice_fisher, rel=1e-6)


def test_fisher_matrix_near_zero_twist():
    family = SchemeFamily(PrepConfig(scheme="oat_non_gauss", n_atoms=20, lambda_actual=0.0))
    fm = fisher_matrix(family, 0.1, 0.0)
    assert fm.f_phiphi == pytest.approx(20.0, rel=1e-4)
    assert np.isfinite(fm.f_lambdalambda)


def test_misspec_bias_sign_and_linearity():
    fm = FisherMatrix(f_phiphi=50.0, f_philambda=20.0, f_lambdalambda=40.0)
    assert misspec_bias(fm, 0.01) == pytest.approx(-0.004)
    assert misspec_bias(fm, 0.01) < 0
    assert misspec_bias(fm, -0.01) > 0
    assert misspec_bias(fm, 0.02) / misspec_bias(fm, 0.01) == pytest.approx(2.0)
    with pytest.raises(DegenerateFisherError):
        misspec_bias(FisherMatrix(0.0, 0.0, 1.0), 0.01)


def test_fisher_matrix_rejects_indefinite():
    with pytest.raises(NumericalQualityError):
        FisherMatrix(f_phiphi=1.0, f_philambda=2.0, f_lambdalambda=1.0)


def test_two_param_q(rng):
    assert two_param_q(FisherMatrix(100.0, 0.0, 7.0)) == pytest.approx(0.1)
    for _ in range(20):
        a = rng.normal(size=(2, 2))
        f = a @ a.T + 1e-3 * np.eye(2)
        fm = FisherMatrix(f[0, 0], f[0, 1], f[1, 1])
        assert two_param_q(fm) >= 1.0 / math.sqrt(fm.f_phiphi) * (1.0 - 1e-12)
    with pytest.raises(UnidentifiableModelError):
        two_param_q(FisherMatrix(4.0, 2.0, 1.0))


def test_crb():
    assert crb(100.0, shots=4) == pytest.approx(0.05)
    with pytest.raises(DegenerateFisherError):
        crb(0.0)


def test_sandwich_variance_basic():
    assert sandwich_variance([1.0, -1.0], [0.5, 0.5], -2.0) == pytest.approx(0.25)
    with pytest.raises(DegenerateFisherError):
        sandwich_variance([1.0, -1.0], [0.5, 0.5], 0.0)


@pytest.mark.parametrize("scheme, basis", [("oat_squeezed", "z"), ("oat_non_gauss", "x"), ("tnt", "z")])
def test_sandwich_collapses_without_misspecification(scheme, basis):
    state = prepare(PrepConfig(scheme=scheme, n_atoms=50, lambda_actual=0.05))
    model = PhaseModel(state, basis)
    phi = 0.02
    q = misspecified_q(model.distribution(phi), model, phi)
    assert q**2 == pytest.approx(1.0 / classical_fisher(model, phi).value, rel=1e-6)


def test_sandwich_with_wrong_model_is_finite():
    actual = PhaseModel(prepare(PrepConfig(scheme="oat_non_gauss", n_atoms=50, lambda_actual=0.1)), "x")
    assumed = PhaseModel(prepare(PrepConfig(scheme="oat_non_gauss", n_atoms=50, lambda_actual=0.101)), "x")
    q = misspecified_q(actual.distribution(0.02), assumed, 0.02)
    assert math.isfinite(q) and q > 0


def test_x_readout_saturates_quantum_bound_for_oat():
    lam, phi = 0.15, 0.02
    family = SchemeFamily(PrepConfig(scheme="oat_non_gauss", n_atoms=100, lambda_actual=lam), "x")
    fc = classical_fisher(family.at(lam), phi).value
    fq = qfi_pure(family.state(lam), "y", family.ops)
    assert fc / fq == pytest.approx(1.0, abs=0.01)


def test_twist_coupling_oat_against_tnt():
    # Phase/twist coupling per unit phase information, at the x readout.
    def coupling(scheme: str, lam: float) -> float:
        family = SchemeFamily(PrepConfig(scheme=scheme, n_atoms=100, lambda_actual=lam), "x")
        fm = fisher_matrix(family, 0.02, lam)
        return fm.f_philambda / fm.f_phiphi

    oat, tnt = coupling("oat_non_gauss", 0.15), coupling("tnt", 0.08)
    assert abs(tnt) > 0.03
    assert abs(oat) < 0.1 * abs(tnt)
