import logging
import threading
from dataclasses import dataclass
from typing import Literal

import numpy as np
from cachetools import LRUCache, cached
from scipy import linalg as la

from utils.errors import InvalidInputError, NumericalQualityError, ResourceLimitError

logger = logging.getLogger(__name__)

Axis = Literal["x", "y", "z"]

DEFAULT_DIMENSION_CAP = 4096
HERMITIAN_TOL = 1e-10


class NonHermitianError(InvalidInputError):
    """Operator or generator is not Hermitian within tolerance."""

    pass


class EigendecompositionError(NumericalQualityError):
    """Dense Hermitian eigendecomposition did not converge."""

    pass


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigendecomposition H = V diag(e) V^dagger of a Hermitian matrix."""

    evals: np.ndarray
    evecs: np.ndarray

    def propagate(self, amplitudes: np.ndarray, time: float) -> np.ndarray:
        """Apply exp(-i * time * H) to a vector (or to the columns of a matrix)."""
        coeffs = self.evecs.conj().T @ amplitudes
        phases = np.exp(-1j * time * self.evals)
        if coeffs.ndim == 1:
            return self.evecs @ (phases * coeffs)
        return self.evecs @ (phases[:, None] * coeffs)


def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tol)


def spectral_decomposition(matrix: np.ndarray) -> HermitianSpectrum:
    if not is_hermitian(matrix):
        raise NonHermitianError("generator is not Hermitian within %.0e" % HERMITIAN_TOL)
    try:
        evals, evecs = la.eigh(matrix)
    except la.LinAlgError as err:
        raise EigendecompositionError(f"eigendecomposition failed: {err}") from err
    evals.flags.writeable = False
    evecs.flags.writeable = False
    return HermitianSpectrum(evals=evals, evecs=evecs)


@dataclass(frozen=True)
class CollectiveOps:
    """J_x, J_y, J_z on the symmetric Dicke basis |J, m>, ordered m = +J down to -J."""

    n_atoms: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    x_spectrum: HermitianSpectrum
    y_spectrum: HermitianSpectrum

    @property
    def j(self) -> float:
        return self.n_atoms / 2.0

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    @property
    def m_values(self) -> np.ndarray:
        return np.real(np.diag(self.jz))

    def axis(self, axis: Axis) -> np.ndarray:
        if axis == "x":
            return self.jx
        if axis == "y":
            return self.jy
        if axis == "z":
            return self.jz
        raise InvalidInputError(f"unknown axis {axis!r}")

    def spectrum(self, axis: Axis) -> HermitianSpectrum:
        if axis == "x":
            return self.x_spectrum
        if axis == "y":
            return self.y_spectrum
        raise InvalidInputError(f"no cached spectrum for axis {axis!r}")


def check_size(n_atoms: int, dimension_cap: int = DEFAULT_DIMENSION_CAP) -> None:
    if n_atoms < 1:
        raise ResourceLimitError(f"n_atoms must be >= 1, got {n_atoms}")
    if n_atoms > dimension_cap:
        raise ResourceLimitError(
            f"n_atoms={n_atoms} exceeds the exact-simulation cap {dimension_cap}; "
            "use the largescale module for analytic moments"
        )


def m_values(n_atoms: int) -> np.ndarray:
    j = n_atoms / 2.0
    return j - np.arange(n_atoms + 1, dtype=float)


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.flags.writeable = False
    return matrix


@cached(cache=LRUCache(maxsize=32), lock=threading.Lock())
def _build_ops(n_atoms: int) -> CollectiveOps:
    logger.debug("building collective operators for N=%d", n_atoms)
    j = n_atoms / 2.0
    m = m_values(n_atoms)

    # J+ |m> = sqrt(J(J+1) - m(m+1)) |m+1>; index k <-> m = J - k, so J+ sits above the diagonal.
    ladder = np.sqrt(np.clip(j * (j + 1.0) - m[1:] * (m[1:] + 1.0), 0.0, None))
    jplus = np.diag(ladder.astype(complex), k=1)

    jx = 0.5 * (jplus + jplus.conj().T)
    jy = -0.5j * (jplus - jplus.conj().T)
    jz = np.diag(m.astype(complex))

    return CollectiveOps(
        n_atoms=n_atoms,
        jx=_frozen(jx),
        jy=_frozen(jy),
        jz=_frozen(jz),
        x_spectrum=spectral_decomposition(jx),
        y_spectrum=spectral_decomposition(jy),
    )


def build_ops(n_atoms: int, dimension_cap: int = DEFAULT_DIMENSION_CAP) -> CollectiveOps:
    """Collective spin operators for N two-mode bosons (cached per N)."""
    check_size(n_atoms, dimension_cap)
    return _build_ops(int(n_atoms))
