from .phase_model import PhaseModel, SchemeFamily
from .preparation import (
    OAT_NON_GAUSSIAN_ONSET,
    PHASE_DOMAIN,
    TNT_NON_GAUSSIAN_ONSET,
    DomainError,
    PrepConfig,
    PreparedStages,
    RotationPolicy,
    RotationUndefinedError,
    SchemeKind,
    applied_rotation,
    encode_phase,
    optimal_oat_rotation,
    prepare,
    prepare_stages,
    regime_label,
    twist,
)

__all__ = [
    "OAT_NON_GAUSSIAN_ONSET",
    "PHASE_DOMAIN",
    "TNT_NON_GAUSSIAN_ONSET",
    "DomainError",
    "PhaseModel",
    "PrepConfig",
    "PreparedStages",
    "RotationPolicy",
    "RotationUndefinedError",
    "SchemeFamily",
    "SchemeKind",
    "applied_rotation",
    "encode_phase",
    "optimal_oat_rotation",
    "prepare",
    "prepare_stages",
    "regime_label",
    "twist",
]
