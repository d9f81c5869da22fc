import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import gammaln

from utils.errors import InvalidInputError

from .operators import (
    DEFAULT_DIMENSION_CAP,
    Axis,
    CollectiveOps,
    HermitianSpectrum,
    NonHermitianError,
    build_ops,
    check_size,
    is_hermitian,
    m_values,
    spectral_decomposition,
)

NORM_TOL = 1e-10
PROB_SUM_TOL = 1e-12
NEGATIVE_PROB_TOL = 1e-14
IMAG_TOL = 1e-10

# Clockwise pi/2 about J_y: maps the +J_x eigenstate onto m = +J.
X_READOUT_ANGLE = -math.pi / 2.0


class DimensionMismatchError(InvalidInputError):
    """State and operator dimensions disagree."""

    pass


class NormalizationError(InvalidInputError):
    """Amplitudes or probabilities are not normalized."""

    pass


class Basis(str, Enum):
    Z = "z"
    X = "x"


@dataclass(frozen=True)
class SpinState:
    n_atoms: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex, copy=True)
        if amps.shape != (self.n_atoms + 1,):
            raise DimensionMismatchError(
                f"expected {self.n_atoms + 1} amplitudes for N={self.n_atoms}, got shape {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"state norm {norm!r} differs from 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray) -> "SpinState":
        """Normalise an arbitrary nonzero vector into a state."""
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise NormalizationError("zero vector is not a state")
        return cls(n_atoms=amps.shape[0] - 1, amplitudes=amps / norm)

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class ProbDist:
    """Outcome distribution over m = +J ... -J."""

    outcomes: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        outcomes = np.array(self.outcomes, dtype=float, copy=True)
        probs = np.array(self.probs, dtype=float, copy=True)
        if outcomes.shape != probs.shape or outcomes.ndim != 1:
            raise DimensionMismatchError("outcomes and probs must be 1d arrays of equal length")
        if np.any(probs < -NEGATIVE_PROB_TOL):
            raise NormalizationError(f"negative probability {probs.min()!r}")
        probs = np.clip(probs, 0.0, None)
        total = probs.sum()
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise NormalizationError(f"probabilities sum to {total!r}")
        probs = probs / total
        outcomes.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probs", probs)

    @property
    def n_atoms(self) -> int:
        return len(self.outcomes) - 1

    def mean(self) -> float:
        return float(self.outcomes @ self.probs)

    def variance(self) -> float:
        mu = self.mean()
        return float(((self.outcomes - mu) ** 2) @ self.probs)


def _ops_for(state: SpinState, ops: Optional[CollectiveOps]) -> CollectiveOps:
    if ops is None:
        return build_ops(state.n_atoms, dimension_cap=max(DEFAULT_DIMENSION_CAP, state.n_atoms))
    if ops.n_atoms != state.n_atoms:
        raise DimensionMismatchError(
            f"operators built for N={ops.n_atoms}, state has N={state.n_atoms}"
        )
    return ops


def css_x(n_atoms: int, dimension_cap: int = DEFAULT_DIMENSION_CAP) -> SpinState:
    """Coherent spin state along +x: a_k = sqrt(C(N, k)) / 2^(N/2) over m = J - k."""
    check_size(n_atoms, dimension_cap)
    k = np.arange(n_atoms + 1)
    log_binom = gammaln(n_atoms + 1) - gammaln(k + 1) - gammaln(n_atoms - k + 1)
    amps = np.exp(0.5 * log_binom - 0.5 * n_atoms * math.log(2.0))
    return SpinState(n_atoms=n_atoms, amplitudes=amps / np.linalg.norm(amps))


def jz_eigenstate(n_atoms: int, m: float) -> SpinState:
    ms = m_values(n_atoms)
    idx = np.flatnonzero(np.isclose(ms, m))
    if idx.size != 1:
        raise InvalidInputError(f"m={m} is not a Dicke index for N={n_atoms}")
    amps = np.zeros(n_atoms + 1, dtype=complex)
    amps[idx[0]] = 1.0
    return SpinState(n_atoms=n_atoms, amplitudes=amps)


def rotate(
    state: SpinState, axis: Axis, angle: float, ops: Optional[CollectiveOps] = None
) -> SpinState:
    """Apply exp(-i * angle * J_axis)."""
    ops = _ops_for(state, ops)
    if axis == "z":
        amps = np.exp(-1j * angle * ops.m_values) * state.amplitudes
    elif axis in ("x", "y"):
        amps = ops.spectrum(axis).propagate(state.amplitudes, angle)
    else:
        raise InvalidInputError(f"unknown axis {axis!r}")
    return SpinState(n_atoms=state.n_atoms, amplitudes=amps)


def apply_jz_squared_phase(state: SpinState, strength: float) -> SpinState:
    """Multiply the amplitude at m by exp(i * strength * m^2)."""
    m = m_values(state.n_atoms)
    return SpinState(
        n_atoms=state.n_atoms,
        amplitudes=np.exp(1j * strength * m**2) * state.amplitudes,
    )


def apply_spectrum(state: SpinState, spectrum: HermitianSpectrum, time: float) -> SpinState:
    if spectrum.evecs.shape[0] != state.dim:
        raise DimensionMismatchError(
            f"generator dimension {spectrum.evecs.shape[0]} != state dimension {state.dim}"
        )
    return SpinState(n_atoms=state.n_atoms, amplitudes=spectrum.propagate(state.amplitudes, time))


def apply_hermitian_evolution(state: SpinState, generator: np.ndarray, time: float) -> SpinState:
    """Apply exp(-i * time * generator) through a dense Hermitian eigendecomposition."""
    generator = np.asarray(generator)
    if generator.shape != (state.dim, state.dim):
        raise DimensionMismatchError(
            f"generator shape {generator.shape} does not match state dimension {state.dim}"
        )
    return apply_spectrum(state, spectral_decomposition(generator), time)


def _check_operator(state: SpinState, op: np.ndarray) -> None:
    if op.shape != (state.dim, state.dim):
        raise DimensionMismatchError(f"operator shape {op.shape} vs state dimension {state.dim}")
    if not is_hermitian(op):
        raise NonHermitianError("observable is not Hermitian")


def expectation(state: SpinState, op: np.ndarray) -> float:
    op = np.asarray(op)
    _check_operator(state, op)
    value = np.vdot(state.amplitudes, op @ state.amplitudes)
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise NonHermitianError(f"expectation has imaginary part {value.imag!r}")
    return float(value.real)


def variance(state: SpinState, op: np.ndarray) -> float:
    op = np.asarray(op)
    _check_operator(state, op)
    applied = op @ state.amplitudes
    second = float(np.vdot(applied, applied).real)
    first = float(np.vdot(state.amplitudes, applied).real)
    return max(second - first**2, 0.0)


def sym_covariance(state: SpinState, op_a: np.ndarray, op_b: np.ndarray) -> float:
    """<(AB + BA)/2> - <A><B>."""
    op_a = np.asarray(op_a)
    op_b = np.asarray(op_b)
    _check_operator(state, op_a)
    _check_operator(state, op_b)
    a_psi = op_a @ state.amplitudes
    b_psi = op_b @ state.amplitudes
    sym = float(np.vdot(a_psi, b_psi).real)
    mean_a = float(np.vdot(state.amplitudes, a_psi).real)
    mean_b = float(np.vdot(state.amplitudes, b_psi).real)
    return sym - mean_a * mean_b


def fidelity(a: SpinState, b: SpinState) -> float:
    if a.n_atoms != b.n_atoms:
        raise DimensionMismatchError("fidelity between states of different N")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def outcome_distribution(
    state: SpinState, basis: Basis | str = Basis.Z, ops: Optional[CollectiveOps] = None
) -> ProbDist:
    basis = Basis(basis)
    if basis is Basis.X:
        state = rotate(state, "y", X_READOUT_ANGLE, ops)
    probs = np.abs(state.amplitudes) ** 2
    # The state norm is only held to NORM_TOL; the distribution must sum to PROB_SUM_TOL.
    return ProbDist(outcomes=m_values(state.n_atoms), probs=probs / probs.sum())
