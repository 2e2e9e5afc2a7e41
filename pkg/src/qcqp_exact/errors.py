"""Exception types shared across the package.

Solver kernels raise these instead of returning sentinel values so that
callers can distinguish expected control-flow outcomes (a singular pivot,
a degenerate instance shape) from genuine bugs.
"""


class QcqpError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(QcqpError):
    """A coefficient sequence does not have the declared length."""


class NonFiniteEntry(QcqpError):
    """An instance coefficient is NaN or infinite."""


class EmptyModel(QcqpError):
    """The instance has no variables or no constraints."""


class CycleGuardExceeded(QcqpError):
    """The simplex iteration cap was hit; numerical trouble, not a verdict."""


class IllConditioned(QcqpError):
    """A Newton system could not be solved even after regularization."""


class SingularSystem(QcqpError):
    """A small dense linear system has no reliable pivot.

    Expected control flow: callers respond by perturbing the data.
    """


class WrongArity(QcqpError):
    """A fixed-constraint-count checker was called with the wrong m."""


class ShapeMismatch(QcqpError):
    """The instance does not match the ball-plus-linear pattern."""


class WrongShape(QcqpError):
    """A single-class checker was called on a multi-class instance."""


class TooManyConstraints(QcqpError):
    """Power-set enumeration refused: 2^m subproblems would be impractical."""


class NegativeSlack(QcqpError):
    """A lifted value fell below its square beyond tolerance (solver bug)."""


class DeskScaleExceeded(QcqpError):
    """The brute-force oracle only supports very small variable counts."""


class NoFeasiblePoint(QcqpError):
    """The oracle grid found no feasible point (not a claim of infeasibility)."""


class NoBoundingWeights(QcqpError):
    """No nonnegative constraint weights with positive-definite aggregate."""
