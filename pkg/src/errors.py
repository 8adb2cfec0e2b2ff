"""
Exception hierarchy for detector, correlation and sweep computations.

Every error subclasses a builtin (ValueError or ArithmeticError) so callers
that only know the builtin still catch it. Messages name the offending value.
"""

from typing import Optional


# ========== Numerics ==========

class ConvergenceError(ArithmeticError):
    """
    Adaptive quadrature did not reach the requested tolerance.

    Attributes:
        estimate: Best available value of the integral
        error: Achieved absolute error estimate
    """

    def __init__(self, message: str, estimate=None, error: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UnboundedDomainError(ValueError):
    """A semi-infinite integrand has no usable decay bound."""


class DegenerateRootError(ValueError):
    """
    A root of a denominator is (numerically) a double root.

    Attributes:
        root: Location of the offending root
        derivative: Derivative magnitude found there
    """

    def __init__(self, message: str, root: float = float('nan'),
                 derivative: float = float('nan')):
        super().__init__(message)
        self.root = root
        self.derivative = derivative


class WindowCollisionError(ValueError):
    """Principal-value windows around neighbouring roots overlap."""


class InsufficientDataError(ValueError):
    """Too few samples for an extrapolation."""


# ========== Motion ==========

class SuperluminalError(ValueError):
    """A trajectory parameter set implies v >= 1."""


class AnalyticityError(ValueError):
    """An imaginary-time shift leaves the strip where a Wightman function is analytic."""


# ========== Detector response ==========

class PopulationInversionError(ValueError):
    """Excitation exceeds de-excitation, so no positive EDR temperature exists."""


class NonpositiveResponseError(ValueError):
    """A response is at or below the quadrature noise floor."""


# ========== Harvesting / scenarios ==========

class CoincidentDetectorError(ValueError):
    """Two detectors share a worldline and their correlation diverges."""


class ScenarioError(ValueError):
    """
    A scenario description is malformed or violates an invariant.

    Attributes:
        field: Dotted name of the offending field, when known
    """

    def __init__(self, message: str, field: Optional[str] = None):
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
