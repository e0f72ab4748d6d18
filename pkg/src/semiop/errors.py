"""Exception hierarchy for semiop."""


class SemiopError(Exception):
    """Base class for all library errors."""


class ShapeError(SemiopError, ValueError):
    """Raised on non-square input or mismatched dimensions."""


class NotFiniteError(SemiopError, ValueError):
    """Raised when a matrix contains NaN or Inf entries."""


class NotHermitian(SemiopError, ValueError):
    """Raised when a weight matrix is not Hermitian within tolerance."""


class NotPositive(SemiopError, ValueError):
    """Raised when a weight matrix has a significantly negative eigenvalue.

    The offending minimum eigenvalue is kept in ``lam_min``.
    """

    def __init__(self, msg, lam_min=None):
        super().__init__(msg)
        self.lam_min = lam_min


class ZeroOperator(SemiopError, ValueError):
    """Raised when the weight matrix is zero."""


class ConvergenceError(SemiopError, RuntimeError):
    """Raised when an iterative kernel exhausts its iteration budget.

    ``residual`` holds the last measured residual.
    """

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class NotAdjointable(SemiopError, ValueError):
    """Raised when an operator does not leave N(A) invariant.

    Such an operator has no A-adjoint and no reduced operator, so every
    quantity that needs either is undefined for it.
    """

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class ChainViolation(SemiopError, AssertionError):
    """Raised when a proven class implication fails numerically.

    This points to a tolerance problem, never to a mathematical outcome.
    """
