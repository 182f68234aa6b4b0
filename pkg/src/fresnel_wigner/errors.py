"""Exception hierarchy.

Everything raised on bad input derives from :class:`ValidationError` (itself a
``ValueError``) so the CLI can map it to exit status 2.
"""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class InvalidInputError(ValidationError):
    pass


class CoverageError(ValidationError):
    """A signal or frequency range does not cover what the computation needs."""


class AlignmentError(ValidationError):
    """Two sampled objects do not share the same time grid."""


class UnsupportedReferenceError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
