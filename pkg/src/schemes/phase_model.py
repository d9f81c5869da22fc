import math
import threading
from typing import Optional

import numpy as np
from cachetools import LRUCache

from spin_core import Basis, CollectiveOps, ProbDist, SpinState, build_ops, rotate
from spin_core.state import X_READOUT_ANGLE
from utils.errors import InvalidInputError

from .preparation import PrepConfig, applied_rotation, twist


class PhaseModel:
    """Outcome distributions of one pre-encoding state as a function of the encoded phase.

    Encoding and the optional J_x readout are both rotations about J_y, so the
    state is expanded once in the J_y eigenbasis and every phi costs a single
    diagonal phase plus one basis change.
    """

    def __init__(
        self,
        state: SpinState,
        basis: Basis | str = Basis.Z,
        ops: Optional[CollectiveOps] = None,
    ):
        self.state = state
        self.basis = Basis(basis)
        self.ops = ops if ops is not None else build_ops(state.n_atoms, dimension_cap=state.n_atoms)
        spectrum = self.ops.spectrum("y")
        self._evecs = spectrum.evecs
        self._evals = spectrum.evals
        self._coeffs = spectrum.evecs.conj().T @ state.amplitudes
        self._offset = X_READOUT_ANGLE if self.basis is Basis.X else 0.0

    @property
    def n_atoms(self) -> int:
        return self.state.n_atoms

    @property
    def outcomes(self) -> np.ndarray:
        return self.ops.m_values

    def probs(self, phis) -> np.ndarray:
        """Outcome probabilities, shape (len(phis), N + 1); rows follow m = +J ... -J."""
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        angles = phis + self._offset
        phases = np.exp(-1j * np.outer(self._evals, angles))
        amplitudes = self._evecs @ (phases * self._coeffs[:, None])
        probs = np.abs(amplitudes.T) ** 2
        return probs / probs.sum(axis=1, keepdims=True)

    def distribution(self, phi: float) -> ProbDist:
        return ProbDist(outcomes=self.outcomes, probs=self.probs([phi])[0])

    def mean(self, phi: float) -> float:
        return float(self.probs([phi])[0] @ self.outcomes)


class SchemeFamily:
    """The (phi, lambda) outcome model of a preparation template.

    The readout rotation is frozen at the value the template applies (set by
    its assumed twist); only the twisting strength varies with lambda. The
    family evaluated at the actual twist therefore reproduces the real
    experiment, and at lambda = lambda_assumed it is the experimenter's model.
    """

    def __init__(self, template: PrepConfig, basis: Basis | str = Basis.Z, cache_size: int = 512):
        self.template = template
        self.basis = Basis(basis)
        self.ops = build_ops(template.n_atoms, template.dimension_cap)
        self.theta = applied_rotation(template, self.ops)
        self._cache: LRUCache = LRUCache(maxsize=cache_size)
        self._lock = threading.Lock()

    @property
    def n_atoms(self) -> int:
        return self.template.n_atoms

    def state(self, lam: float) -> SpinState:
        twisted = twist(self.template.scheme, self.n_atoms, lam, self.template.dimension_cap)
        if self.theta == 0.0:
            return twisted
        return rotate(twisted, "x", self.theta, self.ops)

    def at(self, lam: float) -> PhaseModel:
        key = float(lam)
        with self._lock:
            model = self._cache.get(key)
        if model is None:
            if not math.isfinite(key) or key < 0:
                raise InvalidInputError(f"lambda must be >= 0, got {lam}")
            model = PhaseModel(self.state(key), self.basis, self.ops)
            with self._lock:
                self._cache[key] = model
        return model

    def probs(self, phis, lam: float) -> np.ndarray:
        return self.at(lam).probs(phis)

    def distribution(self, phi: float, lam: float) -> ProbDist:
        return self.at(lam).distribution(phi)
