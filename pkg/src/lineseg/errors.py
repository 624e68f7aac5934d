"""Exception types shared across the package."""


class LinesegError(Exception):
    """Base class for package-specific failures."""


class FormatError(LinesegError, ValueError):
    """Raised for unsupported image shapes, dtypes, or file contents."""


class ParameterError(LinesegError, ValueError):
    """Raised when a caller-supplied parameter is out of its valid range."""


class InvariantError(LinesegError, RuntimeError):
    """Raised when internal state violates a documented invariant."""


class UndefinedRateError(LinesegError, ValueError):
    """Raised when a detection/recognition rate has a zero denominator."""

    code = "undefined-rate"

    def __init__(self, message: str):
        super().__init__(message)


class AnnotationParseError(FormatError):
    """Annotation file could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int = 0):
        super().__init__(message)
        self.line_number = line_number
