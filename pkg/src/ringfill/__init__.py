"""Deterministic planner, simulator and exhaustive verifier for
three-stage token placement on bucket rings.

Stage 1 confines tokens to a window of consecutive ring buckets using
two counter-rotating round-robin streams, stage 2 rebalances across the
whole ring moving each token at most once, and stage 3 re-shards into a
strictly larger bucket set.  The verifier checks the homogeneity and
move-budget requirements the scheme promises, and can sweep a whole
parameter domain exhaustively against an independent oracle.
"""

from .lifecycle import (
    LifecycleTrace,
    Stage1EndState,
    TokenPlacement,
    end_state,
    run_lifecycle,
)
from .placement import (
    Cycle,
    GapDescriptor,
    PlacementParams,
    Stage1Planner,
    cycle_class,
    gap,
    label,
    plan_stage1,
    stage2_bucket,
    stage3_bucket,
)
from .verify import (
    REQUIREMENT_DESCRIPTIONS,
    REQUIREMENT_IDS,
    EndStateClassification,
    RequirementCheck,
    RequirementReport,
    ResidueHistogram,
    SweepDomain,
    SweepReport,
    check_requirements,
    classify_end_state,
    prose_oracle_stage1,
    spread,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Cycle",
    "EndStateClassification",
    "GapDescriptor",
    "LifecycleTrace",
    "PlacementParams",
    "REQUIREMENT_DESCRIPTIONS",
    "REQUIREMENT_IDS",
    "RequirementCheck",
    "RequirementReport",
    "ResidueHistogram",
    "Stage1EndState",
    "Stage1Planner",
    "SweepDomain",
    "SweepReport",
    "TokenPlacement",
    "check_requirements",
    "classify_end_state",
    "cycle_class",
    "end_state",
    "gap",
    "label",
    "plan_stage1",
    "prose_oracle_stage1",
    "run_lifecycle",
    "spread",
    "stage2_bucket",
    "stage3_bucket",
    "sweep",
    "__version__",
]
