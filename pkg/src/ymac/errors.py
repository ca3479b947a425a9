"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: DomainError -> 1, NumericalFailure -> 2.
"""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class NumericalFailure(RuntimeError):
    """A numerical procedure could not reach its target."""


class IntegrationError(NumericalFailure):
    """Step-size underflow or step budget exhausted during ODE integration.

    The orbit computed up to the failure is kept on ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InsufficientSpanError(NumericalFailure):
    """The orbit is too short to contain the requested feature."""


class PreconditionError(DomainError):
    """A documented precondition of a diagnostic does not hold."""


class NotASolutionError(DomainError):
    """Sampled data fails the discrete PDE residual gate."""


class ConfigurationError(DomainError):
    """Solver configured outside its stability or validity range."""
