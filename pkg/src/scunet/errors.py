"""Exception hierarchy shared by every scunet module.

The CLI maps these onto exit codes: usage -> 1, data -> 2, numeric -> 3.
"""


class ScunetError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class UsageError(ScunetError):
    exit_code = 1


class ConfigError(UsageError):
    pass


class SpecError(UsageError):
    """Invalid convolution / pooling / STFT geometry."""


class DimensionError(ScunetError, ValueError):
    """Tensor shapes disagree; the message names the offending axis."""

    exit_code = 1


class DataError(ScunetError):
    exit_code = 2


class FormatError(DataError):
    """Malformed or unsupported file (WAV, checkpoint, manifest)."""


class DegenerateSourceError(DataError):
    """A source has zero mean norm, so its balancing weight is undefined."""


class UndefinedReferenceError(DataError):
    """SDR reference signal is all zeros."""


class NumericError(ScunetError, ArithmeticError):
    exit_code = 3


class StorageError(DataError, OSError):
    """A file or directory could not be read or written."""
