"""Self-contained dense numerical kernels.

Everything here is deliberately small-scale: the linear programs come from
per-index multiplier sets, the quadratic programs from single-class
exactness conditions, and the linear systems from two stationarity
equations.  Robustness and verifiable outcomes matter more than speed.
"""

from .linsolve import solve_linear
from .roots import find_real_roots
from .simplex import LinearProgram, LpOutcome, lp_solve, verify_farkas
from .qp import ConvexQp, QpResult, qp_solve

__all__ = [
    "solve_linear",
    "find_real_roots",
    "LinearProgram",
    "LpOutcome",
    "lp_solve",
    "verify_farkas",
    "ConvexQp",
    "QpResult",
    "qp_solve",
]
