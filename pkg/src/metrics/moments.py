import math
from dataclasses import dataclass
from typing import Optional

from spin_core import CollectiveOps, SpinState, build_ops, expectation, sym_covariance, variance


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of the state entering the phase encoding.

    Covariances are stored in the barred convention Covar(a, b) + Covar(b, a),
    i.e. twice the symmetrized covariance.
    """

    n_atoms: int
    jx0: float
    jy0: float
    jz0: float
    var_x0: float
    var_y0: float
    var_z0: float
    cov_zy0: float
    cov_xy0: float = 0.0
    cov_zx0: float = 0.0

    def casimir_residual(self) -> float:
        """J(J+1) minus the sum of second moments; zero for a pure symmetric state."""
        j = self.n_atoms / 2.0
        second = (
            self.var_x0
            + self.var_y0
            + self.var_z0
            + self.jx0**2
            + self.jy0**2
            + self.jz0**2
        )
        return j * (j + 1.0) - second

    def rotated(self, theta: float) -> "MomentSet":
        """Moments after exp(-i theta J_x): J_z -> J_z cos(theta) + J_y sin(theta)."""
        c, s = math.cos(theta), math.sin(theta)
        var_z = c * c * self.var_z0 + s * s * self.var_y0 + s * c * self.cov_zy0
        var_y = s * s * self.var_z0 + c * c * self.var_y0 - s * c * self.cov_zy0
        cov_zy = 2.0 * s * c * (self.var_y0 - self.var_z0) + (c * c - s * s) * self.cov_zy0
        return MomentSet(
            n_atoms=self.n_atoms,
            jx0=self.jx0,
            jy0=c * self.jy0 - s * self.jz0,
            jz0=c * self.jz0 + s * self.jy0,
            var_x0=self.var_x0,
            var_y0=var_y,
            var_z0=var_z,
            cov_zy0=cov_zy,
            cov_xy0=c * self.cov_xy0 - s * self.cov_zx0,
            cov_zx0=c * self.cov_zx0 + s * self.cov_xy0,
        )


def moments_from_state(state: SpinState, ops: Optional[CollectiveOps] = None) -> MomentSet:
    if ops is None:
        ops = build_ops(state.n_atoms, dimension_cap=max(state.n_atoms, 1))
    jx, jy, jz = ops.jx, ops.jy, ops.jz
    return MomentSet(
        n_atoms=state.n_atoms,
        jx0=expectation(state, jx),
        jy0=expectation(state, jy),
        jz0=expectation(state, jz),
        var_x0=variance(state, jx),
        var_y0=variance(state, jy),
        var_z0=variance(state, jz),
        cov_zy0=2.0 * sym_covariance(state, jz, jy),
        cov_xy0=2.0 * sym_covariance(state, jx, jy),
        cov_zx0=2.0 * sym_covariance(state, jz, jx),
    )
