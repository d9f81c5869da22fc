from .operators import (
    DEFAULT_DIMENSION_CAP,
    Axis,
    CollectiveOps,
    EigendecompositionError,
    HermitianSpectrum,
    NonHermitianError,
    build_ops,
    check_size,
    is_hermitian,
    m_values,
    spectral_decomposition,
)
from .state import (
    Basis,
    DimensionMismatchError,
    NormalizationError,
    ProbDist,
    SpinState,
    apply_hermitian_evolution,
    apply_jz_squared_phase,
    apply_spectrum,
    css_x,
    expectation,
    fidelity,
    jz_eigenstate,
    outcome_distribution,
    rotate,
    sym_covariance,
    variance,
)

__all__ = [
    "DEFAULT_DIMENSION_CAP",
    "Axis",
    "Basis",
    "CollectiveOps",
    "DimensionMismatchError",
    "EigendecompositionError",
    "HermitianSpectrum",
    "NonHermitianError",
    "NormalizationError",
    "ProbDist",
    "SpinState",
    "apply_hermitian_evolution",
    "apply_jz_squared_phase",
    "apply_spectrum",
    "build_ops",
    "check_size",
    "css_x",
    "expectation",
    "fidelity",
    "is_hermitian",
    "jz_eigenstate",
    "m_values",
    "outcome_distribution",
    "rotate",
    "spectral_decomposition",
    "sym_covariance",
    "variance",
]
