"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(ArithmeticError):
    """A series did not reach its tolerance within the allowed term count."""


class NotClosedForm(LookupError):
    """No exact law is implemented for the requested walk."""


class InternalError(AssertionError):
    """An exact-arithmetic sentinel fired; this indicates a bug."""


class UnsupportedLaw(TypeError):
    """The law has no computable CDF for goodness-of-fit testing."""


class DimensionMismatch(ValueError):
    """Two sample batches cannot be combined."""
