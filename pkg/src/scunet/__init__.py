"""Spectrogram-channels U-Net source separation on a NumPy autograd core."""
from .errors import (
    ConfigError,
    DataError,
    DegenerateSourceError,
    DimensionError,
    FormatError,
    NumericError,
    ScunetError,
    SpecError,
    StorageError,
    UndefinedReferenceError,
    UsageError,
)
from .estimator import SpectrogramChannelsSeparator
from .tensor import Tensor

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateSourceError",
    "DimensionError",
    "FormatError",
    "NumericError",
    "ScunetError",
    "SpecError",
    "SpectrogramChannelsSeparator",
    "StorageError",
    "Tensor",
    "UndefinedReferenceError",
    "UsageError",
    "__version__",
]
