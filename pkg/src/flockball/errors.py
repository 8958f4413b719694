"""Exception types raised across the package."""
from __future__ import annotations


class FlockballError(Exception):
    """Base class for all package errors."""


class DomainError(FlockballError, ValueError):
    """An argument lies outside the domain of the operation."""


class DivergentIntegralError(FlockballError, ArithmeticError):
    """The requested integral is infinite (kernel singularity not integrable)."""


class NonIntegrableError(DivergentIntegralError):
    """The volume integral of ``|x|**mu`` diverges (``mu <= -N``)."""


class SurfaceDivergence(DivergentIntegralError):
    """Ball-potential derivative blows up at the unit sphere.

    ``sign`` is the sign of the blow-up; ``distance`` is ``|r - 1|``.
    """

    def __init__(self, message: str, sign: int = -1, distance: float = 0.0):
        super().__init__(message)
        self.sign = sign
        self.distance = distance


class ToleranceNotMet(FlockballError, RuntimeError):
    """A quadrature did not reach its tolerance; ``worst`` names the culprit."""

    def __init__(self, message: str, worst=None, error: float = float("nan")):
        super().__init__(message)
        self.worst = worst
        self.error = error


class GridMismatch(FlockballError, ValueError):
    """Operands live on different radial grids or dimensions."""


class InfeasibleMass(FlockballError, ValueError):
    """Target mass is negative or exceeds the grid capacity."""


class ZeroMassError(FlockballError, ValueError):
    """Operation needs a profile of positive mass."""


class RegimeError(FlockballError, ValueError):
    """Parameters are outside the regime an operation is defined for."""


class ShellViolation(FlockballError, ValueError):
    """A shell pattern leaves the prescribed annulus around the ball."""


class ConfigError(FlockballError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class MassMismatch(FlockballError, ValueError):
    """Reference ball volume differs from the profile mass."""
