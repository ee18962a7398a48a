"""Exception types shared by every texstage module."""


class TexstageError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(TexstageError):
    """An input value violates a documented precondition."""


class InvalidConfigError(TexstageError):
    """A configuration value is out of its legal range."""


class DegenerateInputError(TexstageError):
    """The input is structurally valid but carries no usable signal."""


class UndefinedCorrelationError(DegenerateInputError):
    """Gray-level variance is zero, so the correlation measure is undefined."""


class InvalidModelError(TexstageError):
    """A classifier model violates its invariants or cannot be used."""


class DatasetParseError(TexstageError):
    """A dataset or model file is malformed.

    ``line`` carries the 1-based line number when the problem is tied to a
    specific row of a CSV file, otherwise None.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(TexstageError):
    """Parsed data is well-formed but internally inconsistent."""
