"""Exception types shared across the package."""


class FpnniError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(FpnniError):
    """A vector or matrix has the wrong size for the operation."""


class NoConvergence(FpnniError):
    """An iterative procedure exhausted its budget.

    The last observed residual, when meaningful, is stored on ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotSymmetric(FpnniError):
    """Input matrix is not symmetric within tolerance."""


class NotPositiveDefinite(FpnniError):
    """Matrix required to be positive definite is not."""


class PoleError(FpnniError):
    """Gamma function evaluated at a non-positive integer."""


class DomainError(FpnniError):
    """Argument outside the evaluator's declared domain."""


class OutOfRange(FpnniError):
    """Query point lies outside the stored time range."""


class NonFiniteState(FpnniError):
    """State became NaN or infinite during integration."""


class ScheduleError(FpnniError):
    """Impulse schedule violates its ordering/interior constraints."""


class AnchorUnresolved(FpnniError):
    """Jump rule needs the equilibrium anchor, which has not been resolved."""


class ConfigError(FpnniError):
    """Config file failed validation; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
