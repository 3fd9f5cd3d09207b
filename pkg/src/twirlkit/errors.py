"""Exception types shared across twirlkit."""


class TwirlkitError(Exception):
    """Base class for all twirlkit errors."""


class DimensionError(TwirlkitError, ValueError):
    """Operands have incompatible shapes."""


class DomainError(TwirlkitError, ValueError):
    """A scalar parameter lies outside its valid range."""


class CapacityError(TwirlkitError, ValueError):
    """Requested qubit count exceeds what a dense routine supports."""


class SingularityError(TwirlkitError, ArithmeticError):
    """A matrix is singular or too ill-conditioned to invert.

    Attributes:
        condition: estimated 2-norm condition number of the offending matrix.
    """

    def __init__(self, message, condition):
        super().__init__(f"{message} (condition number {condition:.3e})")
        self.condition = condition


class ValidationError(TwirlkitError, ValueError):
    """An object violates a physical constraint (e.g. a non-CPTP Kraus set)."""


class NonMarkovianError(TwirlkitError):
    """A generator snapshot has substantially negative decay rates."""


class ConfigurationError(TwirlkitError, ValueError):
    """Run or experiment parameters are inconsistent."""


class IntegrationError(TwirlkitError, RuntimeError):
    """Numerical integration drifted beyond its stated tolerance."""
