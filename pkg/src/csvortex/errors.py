"""Exception types shared across the package."""


class CsvortexError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CsvortexError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class QuadratureError(CsvortexError, RuntimeError):
    """Adaptive quadrature failed to meet its tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class StiffnessError(CsvortexError, RuntimeError):
    """ODE step size underflowed (stiff or singular regime)."""


class IntegrationOverflowError(CsvortexError, OverflowError):
    """Numerical overflow during radial integration.

    Carries the radius reached when the integration had to stop.
    """

    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class BracketError(CsvortexError, RuntimeError):
    """Shooting scan exhausted its search range without finding a bracket."""


class WindowError(CsvortexError, ValueError):
    """A fit window contains too few grid points."""


class SpreadError(CsvortexError, RuntimeError):
    """Tail-fit spread exceeds its bound; r_max is likely too small."""


class ScaleMismatchError(CsvortexError, ValueError):
    """Two-scale operator application fell outside a field's grid."""


class DivergentNormError(CsvortexError, ValueError):
    """A weighted norm diverges according to tail-exponent analysis."""


class NonConvergenceError(CsvortexError, RuntimeError):
    """A fixed-point iteration failed to converge."""
