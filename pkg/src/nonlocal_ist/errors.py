"""Exception hierarchy.

Every error raised on purpose by the package derives from ``ISTError`` so
callers (and the command line) can separate numerical failures from usage
mistakes.
"""


class ISTError(Exception):
    """Base class for all package errors."""


class InvalidInputError(ISTError, ValueError):
    """Input data violates a documented precondition."""


class GridError(InvalidInputError):
    """Grid is malformed, too coarse, asymmetric or of unsupported size."""


class DomainError(InvalidInputError):
    """Parameter outside the admissible domain (e.g. wrong half plane, t < 0)."""


class NumericalError(ISTError, ArithmeticError):
    """A numerical stage failed (division hazard, divergence, singular system)."""


class DivisionHazardError(NumericalError):
    """Denominator of a reflection coefficient came too close to zero."""


class SingularEquationError(NumericalError):
    """Both the Neumann iteration and the dense solve of the RH equation failed."""


class InstabilityError(NumericalError):
    """Time integration blew up."""


class ReconstructionError(NumericalError):
    """Per-x Riemann-Hilbert solve failed during reconstruction."""

    def __init__(self, x, cause):
        self.x = x
        self.cause = cause
        super().__init__(f"RH solve failed at x = {x:.6g}: {cause}")


class ConfigurationError(ISTError):
    """Missing prerequisite data or malformed configuration."""
