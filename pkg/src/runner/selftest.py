import logging
import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional

import numpy as np

from largescale import ku_applied_nu, ku_moments
from schemes import PrepConfig, SchemeKind, encode_phase, prepare
from spin_core import (
    Basis,
    CollectiveOps,
    SpinState,
    apply_jz_squared_phase,
    build_ops,
    css_x,
    expectation,
    outcome_distribution,
    rotate,
    variance,
)

logger = logging.getLogger(__name__)

Encoder = Callable[[SpinState, float, Optional[CollectiveOps]], SpinState]

SIGN_GATE_PHIS = (0.1, -0.1, 0.01, -0.01)
SIGN_GATE_RTOL = 1e-8
OPERATOR_TOL = 1e-10
ORACLE_RTOL = 1e-8
ORACLE_LAMBDAS = (1e-3, 0.01, 0.05)
NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class SelftestReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]


def check_sign_convention(encoder: Encoder = encode_phase, n_atoms: int = 100) -> CheckResult:
    """<J_z> after encoding the x-polarized CSS must equal -<J_x0> sin(phi)."""
    ops = build_ops(n_atoms)
    css = css_x(n_atoms)
    jx0 = expectation(css, ops.jx)
    worst = 0.0
    for phi in SIGN_GATE_PHIS:
        expected = -jx0 * math.sin(phi)
        measured = expectation(encoder(css, phi, ops), ops.jz)
        worst = max(worst, abs(measured - expected) / abs(expected))
    return CheckResult("sign convention", worst <= SIGN_GATE_RTOL, f"max relative deviation {worst:.3g}")


def check_operator_algebra(n_atoms: int = 10) -> CheckResult:
    ops = build_ops(n_atoms)
    jx, jy, jz = ops.jx, ops.jy, ops.jz
    j = ops.j
    residuals = {
        "[Jx,Jy]-iJz": jx @ jy - jy @ jx - 1j * jz,
        "[Jy,Jz]-iJx": jy @ jz - jz @ jy - 1j * jx,
        "[Jz,Jx]-iJy": jz @ jx - jx @ jz - 1j * jy,
        "J^2-J(J+1)": jx @ jx + jy @ jy + jz @ jz - j * (j + 1) * np.eye(ops.dim),
        "Jy-Jy^H": jy - jy.conj().T,
    }
    worst_name, worst = max(
        ((name, float(np.max(np.abs(r)))) for name, r in residuals.items()), key=lambda x: x[1]
    )
    return CheckResult(
        "operator algebra", worst <= OPERATOR_TOL, f"largest residual {worst_name}: {worst:.3g}"
    )


def check_analytic_oracle(n_atoms: int = 100) -> CheckResult:
    """Closed-form OAT moments against exact evolution."""
    ops = build_ops(n_atoms)
    worst = 0.0
    for lam in ORACLE_LAMBDAS:
        nu = ku_applied_nu(n_atoms, lam)
        analytic = ku_moments(n_atoms, lam, nu)
        twisted = apply_jz_squared_phase(css_x(n_atoms), lam)
        prepared = rotate(twisted, "x", -nu, ops)
        pairs = (
            (analytic.s_x_mean, expectation(twisted, ops.jx)),
            (analytic.var_minus, variance(prepared, ops.jz)),
            (analytic.var_plus, variance(prepared, ops.jy)),
        )
        for predicted, exact in pairs:
            worst = max(worst, abs(predicted - exact) / abs(exact))
    return CheckResult(
        f"analytic OAT moments at N={n_atoms}", worst <= ORACLE_RTOL, f"max relative error {worst:.3g}"
    )


def check_normalization(n_atoms: int = 30, lam: float = 0.05) -> CheckResult:
    worst = 0.0
    phis = np.linspace(-math.pi / 2, math.pi / 2, 7)
    for scheme in SchemeKind:
        state = prepare(PrepConfig(scheme=scheme, n_atoms=n_atoms, lambda_actual=lam))
        worst = max(worst, abs(state.norm() - 1.0))
        for basis, phi in product(Basis, phis):
            dist = outcome_distribution(encode_phase(state, float(phi)), basis)
            worst = max(worst, abs(float(dist.probs.sum()) - 1.0))
    return CheckResult("normalization", worst <= NORMALIZATION_TOL, f"max deviation {worst:.3g}")


def run_selftest(encoder: Encoder = encode_phase) -> SelftestReport:
    """Run every gate; an exception inside a check counts as its failure."""
    checks: list[Callable[[], CheckResult]] = [
        lambda: check_sign_convention(encoder),
        check_operator_algebra,
        check_analytic_oracle,
        check_normalization,
    ]
    results = []
    for check in checks:
        try:
            result = check()
        except Exception as exc:
            logger.exception("selftest check raised")
            result = CheckResult(getattr(check, "__name__", "check"), False, f"{type(exc).__name__}: {exc}")
        logger.info("%s %s: %s", "PASS" if result.passed else "FAIL", result.name, result.detail)
        results.append(result)
    return SelftestReport(checks=results)
