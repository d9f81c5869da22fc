from .mixture import (
    MixedMoments,
    Mixture,
    MixtureClippingWarning,
    MixturePhaseModel,
    MixtureSpec,
    SpreadConvention,
    build_mixture,
    crb_mixed,
    mixed_moments,
    mom_sensitivity_mixed,
    quadrature,
)

__all__ = [
    "MixedMoments",
    "Mixture",
    "MixtureClippingWarning",
    "MixturePhaseModel",
    "MixtureSpec",
    "SpreadConvention",
    "build_mixture",
    "crb_mixed",
    "mixed_moments",
    "mom_sensitivity_mixed",
    "quadrature",
]
