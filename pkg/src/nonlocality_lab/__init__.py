"""Numerical and logical laboratory for nonlocality arguments without
inequalities on small spin-1/2 systems."""

__version__ = "0.1.0"

from .chains import (
    Chain,
    CorrelationSet,
    Prop2Report,
    lemma1_check,
    maximal_chain,
    prop2_verify,
    r2_derivable,
    random_chain,
    verify_chain,
)
from .correlation_engine import (
    Correlation,
    dual,
    holds,
    normalize,
    partner,
    probability,
    solution_space,
    violation,
)
from .hardy import (
    HardyConfig,
    HardyOptimum,
    MAX_VIOLATION,
    OptimizerConfig,
    SensitivityReport,
    build_hardy,
    max_hardy_probability,
    schmidt_state,
    sensitivity,
)
from .reality_inference import (
    ConstraintSystem,
    Contradiction,
    ExclusionConstraint,
    RealityLedger,
    derive_contradiction,
    ghsz_correlations,
    lhv_search,
    propagate,
    replay_trace,
)
from .spin_observables import (
    Direction,
    LocalObservable,
    direction_from_projector,
    embed,
    observable_from_direction,
    projector_from_direction,
)
from .tensor_core import is_projector, kernel_basis, tensor
