"""Central finite-difference check of reverse-mode gradients."""
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, UsageError
from .tensor import Tensor


@dataclass
class GradCheckReport:
    max_rel_error: float
    tolerance: float
    analytic: np.ndarray
    numeric: np.ndarray

    @property
    def passed(self):
        return self.max_rel_error < self.tolerance

    def __bool__(self):
        return self.passed


def numerical_gradient(f, point, step=1e-5):
    x = np.array(point, dtype=np.float64)
    grad = np.zeros_like(x)
    flat, gflat = x.reshape(-1), grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        fp = float(f(Tensor(x.copy())).data)
        flat[i] = orig - step
        fm = float(f(Tensor(x.copy())).data)
        flat[i] = orig
        gflat[i] = (fp - fm) / (2 * step)
    return grad


def grad_check(f, point, tolerance=1e-4, step=1e-5, floor=1e-6):
    """Compare d f / d point from backward() with central differences.

    `f` maps a Tensor to a scalar Tensor and must be deterministic (dropout
    off, batchnorm in eval mode). Relative error per element is
    |a - n| / max(|a|, |n|, floor); the report holds the maximum.
    """
    x = np.array(point.data if isinstance(point, Tensor) else point, dtype=np.float64)
    leaf = Tensor(x.copy(), requires_grad=True)
    out = f(leaf)
    if out.size != 1:
        raise UsageError(f"grad_check needs a scalar-valued function, got shape {out.shape}")
    if not np.all(np.isfinite(out.data)):
        raise NumericError("function value is not finite at the check point")
    out.backward()
    analytic = leaf.grad if leaf.grad is not None else np.zeros_like(x)
    numeric = numerical_gradient(f, x, step)
    if not (np.all(np.isfinite(analytic)) and np.all(np.isfinite(numeric))):
        raise NumericError("non-finite gradient encountered during grad_check")
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    err = float(np.max(np.abs(analytic - numeric) / denom)) if x.size else 0.0
    return GradCheckReport(err, tolerance, analytic, numeric)
