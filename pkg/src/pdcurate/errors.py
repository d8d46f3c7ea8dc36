"""Exception types shared across the package.

ConfigError covers bad specs, flags and config files (CLI exit code 2).
DataError covers problems with input data files (CLI exit code 3).
Programming-contract violations (e.g. out-of-order ids) raise ValueError.
"""


class CurateError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(CurateError):
    """Invalid configuration: bad spec parameters, malformed config files."""


class DataError(CurateError):
    """Invalid input data: misaligned files, bad encodings, broken formats."""


class AlignmentError(DataError):
    """Parallel files disagree on line count."""

    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.line = line


class PredictorError(CurateError):
    """A language-ID predictor could not produce a prediction."""
