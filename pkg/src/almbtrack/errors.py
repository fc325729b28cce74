"""Exception types shared across the library."""


class ConfigurationError(ValueError):
    """Raised when model or scenario parameters are inconsistent (shape
    mismatches, probabilities outside [0, 1], unknown config keys)."""


class UsageError(ValueError):
    """Raised when an operation is called with arguments that are valid
    Python but outside the operation's contract (empty mixture, unknown
    builtin scenario name)."""


class NumericalError(ArithmeticError):
    """Raised when a computation degenerates (singular innovation
    covariance, all hypothesis weights vanishing).  Carries a
    ``diagnostics`` dict describing the failing quantity."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
