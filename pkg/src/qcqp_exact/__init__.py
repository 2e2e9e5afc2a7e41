"""Exactness certificates for semidefinite relaxations of diagonal QCQPs.

The package decides, through a ladder of sufficient conditions, whether the
matrix relaxation of a diagonal quadratically constrained quadratic program
is tight; solves the equivalent convex relaxations; reconstructs feasible
matrix pairs from their optima; and cross-checks every verdict against a
brute-force oracle at desk scale.
"""

from .conditions import (
    CONDITION_IDS,
    CheckBudget,
    ExactnessVerdict,
    check_dual_all,
    check_dual_partition,
    check_h1_convex,
    check_h1_powerset,
    check_h1_refined,
    check_m1,
    check_m2,
    check_m3,
    check_sign_definite,
    check_trs_linear,
    run_all,
)
from .model import (
    AssumptionReport,
    DiagonalQCQP,
    PartitionInfo,
    check_assumption1,
    compute_partition,
    evaluate,
    perturb,
    validate_instance,
)
from .oracle import OracleResult, bounding_box, global_minimize, verify_exactness
from .relaxations import (
    KktResiduals,
    RelaxSolution,
    ShorPoint,
    exactness_gap,
    kkt_residuals,
    reconstruct_shor,
    solve_convrel,
    solve_newconvrel,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport",
    "CheckBudget",
    "CONDITION_IDS",
    "DiagonalQCQP",
    "ExactnessVerdict",
    "KktResiduals",
    "OracleResult",
    "PartitionInfo",
    "RelaxSolution",
    "ShorPoint",
    "bounding_box",
    "check_assumption1",
    "check_dual_all",
    "check_dual_partition",
    "check_h1_convex",
    "check_h1_powerset",
    "check_h1_refined",
    "check_m1",
    "check_m2",
    "check_m3",
    "check_sign_definite",
    "check_trs_linear",
    "compute_partition",
    "evaluate",
    "exactness_gap",
    "global_minimize",
    "kkt_residuals",
    "perturb",
    "reconstruct_shor",
    "run_all",
    "solve_convrel",
    "solve_newconvrel",
    "validate_instance",
    "verify_exactness",
]
