"""Exception types raised by luinv.

Every error carries a short machine-readable ``code`` so callers (and the CLI)
can map failures without parsing messages.
"""


class LUInvError(ValueError):
    """Base class for all luinv errors."""

    code = "ERROR"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self):
        return f"[{self.code}] {self.args[0]}"


class ValidationError(LUInvError):
    """A state, matrix or parameter violates a documented invariant."""

    code = "VALIDATION"


class NumericsError(LUInvError):
    """A numerical kernel could not produce a result."""

    code = "NUMERICS"


class ComparisonError(LUInvError):
    """Two fingerprints cannot be compared (shape or convention mismatch)."""

    code = "MISMATCH"


class FormatError(LUInvError):
    """A state or fingerprint file could not be parsed."""

    code = "PARSE"
