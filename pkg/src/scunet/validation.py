"""Input checks for the estimator API; failures raise DimensionError naming the axis."""
import numpy as np
from sklearn.utils.validation import check_array

from .errors import DataError, DimensionError


def check_waveforms(X, name="X"):
    """2-D (clips, samples) finite float64 array; a single 1-D clip is promoted."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DimensionError(f"{name} must be (clips, samples), got {X.ndim} axes with shape {X.shape}")
    try:
        return check_array(X, dtype=np.float64, ensure_all_finite=True)
    except ValueError as exc:
        raise DataError(f"{name}: {exc}") from None


def check_stems(Y, n_clips, n_sources, n_samples, name="Y"):
    """(clips, sources, samples) finite float64 array matching the mixtures."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 3:
        raise DimensionError(f"{name} must be (clips, sources, samples), got shape {Y.shape}")
    for axis, (got, want) in enumerate(zip(Y.shape, (n_clips, n_sources, n_samples))):
        if got != want:
            raise DimensionError(f"{name} axis {axis} has extent {got}, expected {want}")
    if not np.all(np.isfinite(Y)):
        raise DataError(f"{name} contains non-finite values")
    return Y
