import hashlib
import math
from datetime import datetime
from enum import Enum
from typing import Any, Optional

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from estimation.sampling import MAX_SEED
from largescale import ThresholdMode
from mixedstate import SpreadConvention
from schemes import RotationPolicy, SchemeKind
from spin_core import Basis


class ExperimentKind(str, Enum):
    SQUEEZE_SWEEP = "SqueezeSweep"
    MOM_ERROR_GRID = "MomErrorGrid"
    BIAS_VARIANCE_TRADEOFF = "BiasVarianceTradeoff"
    DELTA_CRIT = "DeltaCrit"
    NON_GAUSS_MC = "NonGaussMC"
    MOM_VS_MLE = "MomVsMle"
    TWO_PARAM_RESCUE = "TwoParamRescue"
    MIXED_STATE = "MixedState"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class Grid(BaseModel):
    """Inclusive, evenly spaced range."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    start: float
    stop: float
    points: int = Field(ge=1)

    def values(self) -> list[float]:
        if self.points == 1:
            return [self.start]
        return [float(x) for x in np.linspace(self.start, self.stop, self.points)]


GridLike = list[float] | Grid


def grid_values(grid: Optional[GridLike]) -> list[float]:
    if grid is None:
        return []
    if isinstance(grid, Grid):
        return grid.values()
    return [float(x) for x in grid]


# Experiments that evaluate lambda' = lambda + dlambda.
_NEEDS_DLAMBDAS = {
    ExperimentKind.NON_GAUSS_MC,
    ExperimentKind.MOM_VS_MLE,
    ExperimentKind.TWO_PARAM_RESCUE,
}
_NEEDS_REPEATS = {
    ExperimentKind.BIAS_VARIANCE_TRADEOFF,
    ExperimentKind.NON_GAUSS_MC,
    ExperimentKind.TWO_PARAM_RESCUE,
}


class ExperimentConfig(BaseModel):
    """Everything one run needs; validated in full before any computation starts."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    experiment: ExperimentKind
    scheme: SchemeKind = SchemeKind.TAT_SQUEEZED
    n_atoms: int = Field(default=100, ge=1)
    lambdas: GridLike = Field(default_factory=list)
    lambda_assumed: Optional[GridLike] = None
    dlambdas: list[float] = Field(default_factory=list)
    phi: float = Field(default=0.02, ge=-math.pi / 2, le=math.pi / 2)
    shots: list[int] = Field(default_factory=lambda: [10_000])
    repeats: int = Field(default=0, ge=0)
    master_seed: int = Field(default=0, ge=0, le=MAX_SEED)
    basis: Basis = Basis.Z
    rotation_policy: RotationPolicy = RotationPolicy.NUMERIC_OPTIMAL

    # SqueezeSweep
    analytic: bool = False

    # TwoParamRescue
    lambda_domain: tuple[float, float] = (0.0, 0.2)
    joint_grid_points: int = Field(default=201, ge=3)

    # DeltaCrit
    n_atoms_grid: list[int] = Field(default_factory=list)
    thresholds: list[float] = Field(default_factory=lambda: [2.0, 4.0, 6.0, 8.0])
    threshold_mode: ThresholdMode = ThresholdMode.RELATIVE_TO_UNBIASED

    # MixedState
    delta_lambdas: list[float] = Field(default_factory=list)
    spread_convention: SpreadConvention = SpreadConvention.PRINTED
    n_nodes: int = Field(default=41, ge=2)

    output: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV

    @field_validator("shots", mode="before")
    @classmethod
    def wrap_scalar_shots(cls, value: Any) -> Any:
        return [value] if isinstance(value, int) else value

    @field_validator("shots")
    @classmethod
    def check_shots(cls, value: list[int]) -> list[int]:
        if not value or min(value) < 1:
            raise ValueError("shots must be a non-empty list of positive integers")
        return value

    @model_validator(mode="after")
    def check_experiment_inputs(self) -> Self:
        kind = self.experiment
        if kind is not ExperimentKind.DELTA_CRIT and not self.lambda_values:
            raise ValueError(f"{kind.value} needs a non-empty lambdas grid")
        if any(lam < 0 for lam in self.lambda_values):
            raise ValueError("lambdas must be >= 0")
        if kind is ExperimentKind.MOM_ERROR_GRID and not self.lambda_assumed_values:
            raise ValueError("MomErrorGrid needs a lambda_assumed grid")
        if kind is ExperimentKind.BIAS_VARIANCE_TRADEOFF and not self.lambda_assumed_values:
            raise ValueError("BiasVarianceTradeoff needs a lambda_assumed grid of estimator twists")
        if kind in _NEEDS_DLAMBDAS and not self.dlambdas:
            raise ValueError(f"{kind.value} needs at least one dlambda")
        if kind in _NEEDS_REPEATS and self.repeats < 2:
            raise ValueError(f"{kind.value} needs repeats >= 2")
        if kind is ExperimentKind.DELTA_CRIT and not self.n_atoms_grid:
            raise ValueError("DeltaCrit needs n_atoms_grid")
        if kind is ExperimentKind.MIXED_STATE and not self.delta_lambdas:
            raise ValueError("MixedState needs delta_lambdas")
        if kind is ExperimentKind.SQUEEZE_SWEEP and self.analytic and self.scheme not in (
            SchemeKind.OAT_SQUEEZED,
            SchemeKind.OAT_NON_GAUSS,
        ):
            raise ValueError("the analytic squeezing path exists for OAT only")
        if self.basis is Basis.X and self.phi < 0:
            raise ValueError("the J_x readout cannot resolve the sign of phi; use phi >= 0")
        lo, hi = self.lambda_domain
        if lo < 0 or hi < lo:
            raise ValueError(f"invalid lambda_domain {self.lambda_domain}")
        return self

    @property
    def lambda_values(self) -> list[float]:
        return grid_values(self.lambdas)

    @property
    def lambda_assumed_values(self) -> list[float]:
        return grid_values(self.lambda_assumed)

    def config_hash(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()


class WarningRecord(BaseModel):
    category: str
    message: str
    count: int = 1


class ResultEnvelope(BaseModel):
    """Provenance of one output: the exact config, its hash, and every warning raised."""

    experiment: ExperimentKind
    version: str
    created_at: datetime
    master_seed: int
    config: ExperimentConfig
    config_hash: str
    columns: list[str]
    n_rows: int
    data_file: Optional[str] = None
    rows: Optional[list[dict[str, Any]]] = None
    warnings: list[WarningRecord] = Field(default_factory=list)
