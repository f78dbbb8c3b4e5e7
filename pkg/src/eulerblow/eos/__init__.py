"""Equations of state, entropy profiles, and hypothesis certification."""

from .hypotheses import (
    ConditionResult,
    HypothesisReport,
    StateBox,
    check_all,
    check_h1,
    check_h2,
    check_h3,
    check_h4,
    derivative_consistency,
    mu_partials,
)
from .laws import (
    DeclaredConstants,
    ExpressionLaw,
    GammaLaw,
    Partials,
    PressureLaw,
    StiffenedGas,
    law_from_config,
)
from .profiles import (
    ConstantEntropy,
    EntropyProfile,
    Segment,
    SineBumpEntropy,
    SmoothedPiecewiseLinearEntropy,
    TanhEntropy,
    profile_from_config,
)

__all__ = [
    "ConditionResult", "HypothesisReport", "StateBox", "check_all", "check_h1", "check_h2",
    "check_h3", "check_h4", "derivative_consistency", "mu_partials", "DeclaredConstants",
    "ExpressionLaw", "GammaLaw", "Partials", "PressureLaw", "StiffenedGas", "law_from_config",
    "ConstantEntropy", "EntropyProfile", "Segment", "SineBumpEntropy",
    "SmoothedPiecewiseLinearEntropy", "TanhEntropy", "profile_from_config",
]
