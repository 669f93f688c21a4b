"""Exception types raised across dilatekit.

Every failure mode that callers are expected to branch on gets its own
class; the CLI maps them onto process exit codes.
"""

__all__ = [
    "DilatekitError",
    "NonSquareError",
    "NotHermitianError",
    "NotPSDError",
    "DimensionMismatchError",
    "ShapeMismatchError",
    "NotIsometricError",
    "InvalidCombinationError",
    "NotNormalizedError",
    "ZeroCoefficientError",
    "NotCommutingError",
    "InfeasibleError",
    "GridEmptyError",
    "NonPSDWeightError",
    "NonConvexCurveError",
    "NotContainedError",
    "ResolventSingularError",
    "MalformedInputError",
]


class DilatekitError(Exception):
    """Base class for all dilatekit errors."""


class NonSquareError(DilatekitError):
    """A square matrix was required."""


class NotHermitianError(DilatekitError):
    """Hermitian input required; the anti-Hermitian part is too large."""


class NotPSDError(DilatekitError):
    """Positive semidefiniteness failed beyond tolerance.

    Carries the offending minimum eigenvalue when known.
    """

    def __init__(self, message, min_eig=None):
        super().__init__(message)
        self.min_eig = min_eig


class DimensionMismatchError(DilatekitError):
    """Operands have incompatible dimensions."""


class ShapeMismatchError(DilatekitError):
    """Array has the wrong shape for its declared role."""


class NotIsometricError(DilatekitError):
    """A map that should be isometric (or unitary) is not, beyond tolerance."""


class InvalidCombinationError(DilatekitError):
    """Matrix convex combination coefficients do not sum to the identity."""


class NotNormalizedError(DilatekitError):
    """Weights or measure do not carry unit total mass."""


class ZeroCoefficientError(DilatekitError):
    """A (numerically) zero coefficient where a nonzero one is required."""


class NotCommutingError(DilatekitError):
    """Tuple entries were required to commute."""


class InfeasibleError(DilatekitError):
    """Moment fitting did not reach the requested residual.

    ``residual`` is the best value seen when the solver gave up.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GridEmptyError(DilatekitError):
    """The atom grid supplied to the fitter is empty."""


class NonPSDWeightError(DilatekitError):
    """An atomic weight matrix fails positive semidefiniteness."""


class NonConvexCurveError(DilatekitError):
    """Operation requires a convex boundary curve."""


class NotContainedError(DilatekitError):
    """Numerical range is not contained in the region with the required margin."""


class ResolventSingularError(DilatekitError):
    """Resolvent evaluation too close to the spectrum."""


class MalformedInputError(DilatekitError):
    """Input file or flag value could not be parsed or validated."""
