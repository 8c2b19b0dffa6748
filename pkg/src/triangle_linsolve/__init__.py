"""Triangle Algorithm for real linear systems ``Ax = b`` of any shape and rank.

The solver either returns an approximate solution, an approximate solution of
the normal equations, or a certificate that ``Ax = b`` has no solution together
with a lower bound on the least-squares residual.
"""

from .baselines import BaselineReport, bicgstab, steepest_descent_normal
from .instances import InstanceSpec, Kind, generate
from .linalg import matvec, operator_norm_estimate, random_orthogonal, transpose_matvec
from .membership import (
    MembershipResult,
    MembershipTag,
    PivotMode,
    WitnessCertificate,
    run_membership,
)
from .solver import (
    InconclusiveError,
    MinNormResult,
    SolveOutcome,
    SolverConfig,
    SolveTag,
    min_norm_refine,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineReport",
    "InconclusiveError",
    "InstanceSpec",
    "Kind",
    "MembershipResult",
    "MembershipTag",
    "MinNormResult",
    "PivotMode",
    "SolveOutcome",
    "SolveTag",
    "SolverConfig",
    "WitnessCertificate",
    "bicgstab",
    "generate",
    "matvec",
    "min_norm_refine",
    "operator_norm_estimate",
    "random_orthogonal",
    "run_membership",
    "solve",
    "steepest_descent_normal",
    "transpose_matvec",
]
