"""Exception types shared across the package."""


class QmetroError(Exception):
    """Base class for all package-specific errors."""


class DomainError(QmetroError):
    """An argument is outside the mathematical domain of the operation."""


class NumericalFailure(QmetroError):
    """A dense linear-algebra routine failed to converge or produced garbage."""


class CapacityError(QmetroError):
    """A requested object exceeds the configured Hilbert-space dimension cap."""


class ShapeMismatch(QmetroError):
    """Matrix dimensions are inconsistent with each other or with the channel."""


class CompletenessViolation(QmetroError):
    """Kraus operators do not sum to the identity within tolerance."""

    def __init__(self, residual: float, message: str | None = None):
        self.residual = float(residual)
        super().__init__(message or f"Kraus completeness residual {self.residual:.3e}")


class NotUnitary(QmetroError):
    """A matrix required to be unitary is not, within tolerance."""


class AngleSpreadExceeded(QmetroError):
    """Eigen-angle spread exceeds pi, outside the closed-form regime."""


class DegenerateStep(QmetroError):
    """Finite-difference step too small for double precision."""


class NotConverged(QmetroError):
    """A solver result is being used that did not meet its gap tolerance."""
