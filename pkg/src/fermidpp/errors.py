"""Exception types shared across the package.

The command line maps these onto exit codes: configuration problems
exit 2, validity/certificate failures exit 3, numerical failures exit 4.
"""


class ConfigurationError(ValueError):
    """Unknown tag, malformed parameter set, or unusable config file."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class ValidityError(RuntimeError):
    """A structural guarantee failed: positivity certificate, parameter constraint."""


class NumericalFailureError(RuntimeError):
    """A computation lost the accuracy it promised."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class SizeError(ValueError):
    """Requested problem size exceeds a hard memory or enumeration guard."""
