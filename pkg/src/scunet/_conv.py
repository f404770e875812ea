"""Array-level convolution primitives behind conv2d / conv_transpose2d.

Everything reduces to two stride-1 operations on padded inputs:

* ``corr(xp, w)``            valid cross-correlation (forward)
* ``corr_wgrad(xp, g, k)``   its gradient with respect to the weights

Strided correlations are split into ``stride_h * stride_w`` phases, each a
stride-1 correlation of a subsampled input with a subsampled kernel, so the
5x5/stride-2 layers run on 3x3, 3x2, 2x3 and 2x2 kernels.
"""
import ctypes
import importlib.util
import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._corr_kernels import KERNELS


def _load_simd():
    """ctypes handle on the optional AVX-512 extension, or None.

    Set SCUNET_NO_SIMD=1 to force the numba kernels.
    """
    if os.environ.get("SCUNET_NO_SIMD"):
        return None
    try:
        spec = importlib.util.find_spec("scunet._simd")
        if spec is None or not spec.origin or spec.origin.endswith(".c"):
            return None
        lib = ctypes.CDLL(spec.origin)
        if not lib.scunet_simd_available():
            return None
    except (ImportError, OSError, AttributeError):
        return None
    ptr, i = ctypes.c_void_p, ctypes.c_int
    lib.scunet_corr_f32.argtypes = [ptr, ptr, ptr] + [i] * 7
    lib.scunet_corr_f32.restype = None
    lib.scunet_wgrad_f32.argtypes = [ptr, ptr, ptr] + [i] * 9
    lib.scunet_wgrad_f32.restype = i
    return lib


_SIMD = _load_simd()
SIMD_AVAILABLE = _SIMD is not None
_WGRAD_SIMD_SIZES = {(a, b) for a in (1, 2, 3) for b in (1, 2, 3)} - {(1, 1)}


def _ptr(a):
    return a.ctypes.data_as(ctypes.c_void_p)


def _contig(a, dtype):
    return np.ascontiguousarray(a, dtype=dtype)


def _pad_hw(a, ph, pw):
    if not (ph or pw):
        return a
    n, c, h, w = a.shape
    out = np.empty((n, c, h + 2 * ph, w + 2 * pw), dtype=a.dtype)
    out[:, :, :ph] = 0
    out[:, :, ph + h:] = 0
    out[:, :, ph:ph + h, :pw] = 0
    out[:, :, ph:ph + h, pw + w:] = 0
    out[:, :, ph:ph + h, pw:pw + w] = a
    return out


def corr(xp, w):
    """out[n,o,i,j] = sum_{c,a,b} w[o,c,a,b] * xp[n,c,i+a,j+b]."""
    dtype = np.result_type(xp.dtype, w.dtype)
    kh, kw = w.shape[2], w.shape[3]
    n, _, hp, wp = xp.shape
    out_shape = (n, w.shape[0], hp - kh + 1, wp - kw + 1)
    if (kh, kw) == (1, 1):
        xs = xp.reshape(n, xp.shape[1], -1).astype(dtype, copy=False)
        return np.matmul(w[:, :, 0, 0].astype(dtype, copy=False), xs).reshape(out_shape)
    fns = KERNELS.get((kh, kw))
    if fns is None:
        win = sliding_window_view(xp, (kh, kw), axis=(2, 3))
        return np.einsum("nchwab,ocab->nohw", win, w, optimize=True).astype(dtype, copy=False)
    out = np.empty(out_shape, dtype=dtype)
    xp, w = _contig(xp, dtype), _contig(w, dtype)
    if _SIMD is not None and dtype == np.float32 and out_shape[1] >= 4 and out_shape[2] >= 4 and out_shape[3] >= 16:
        _SIMD.scunet_corr_f32(_ptr(xp), _ptr(w), _ptr(out), n, xp.shape[1], out_shape[1], hp, wp, kh, kw)
        return out
    fns[0](xp, w, out)
    return out


def corr_wgrad(xp, g, kh, kw):
    """gw[o,c,a,b] = sum_{n,i,j} g[n,o,i,j] * xp[n,c,i+a,j+b]."""
    dtype = np.result_type(xp.dtype, g.dtype)
    if (
        _SIMD is not None
        and dtype == np.float32
        and (kh, kw) in _WGRAD_SIMD_SIZES
        and g.shape[1] >= 2
        and xp.flags.c_contiguous
        and xp.dtype == dtype
    ):
        g = _contig(g, dtype)
        gw = np.empty((g.shape[1], xp.shape[1], kh, kw), dtype=dtype)
        n, c, hp, wp = xp.shape
        _SIMD.scunet_wgrad_f32(_ptr(xp), _ptr(g), _ptr(gw), n, c, g.shape[1], hp, wp, g.shape[2], g.shape[3], kh, kw)
        return gw
    # the phase split can leave a few trailing rows/cols unused
    xp = xp[:, :, : g.shape[2] + kh - 1, : g.shape[3] + kw - 1]
    if (kh, kw) == (1, 1):
        n, o = g.shape[:2]
        gm = g.reshape(n, o, -1).astype(dtype, copy=False)
        xm = np.ascontiguousarray(xp, dtype=dtype).reshape(n, xp.shape[1], -1)
        return np.matmul(gm, xm.transpose(0, 2, 1)).sum(axis=0)[:, :, None, None]
    fns = KERNELS.get((kh, kw))
    if fns is None:
        win = sliding_window_view(xp, (kh, kw), axis=(2, 3))
        return np.einsum("nchwab,nohw->ocab", win, g, optimize=True).astype(dtype, copy=False)
    gw = np.empty((g.shape[1], xp.shape[1], kh, kw), dtype=dtype)
    xp, g = _contig(xp, dtype), _contig(g, dtype)
    if _SIMD is not None and dtype == np.float32 and (kh, kw) in _WGRAD_SIMD_SIZES and g.shape[1] >= 2:
        n, c, hp, wp = xp.shape
        _SIMD.scunet_wgrad_f32(_ptr(xp), _ptr(g), _ptr(gw), n, c, g.shape[1], hp, wp, g.shape[2], g.shape[3], kh, kw)
        return gw
    fns[1](xp, g, gw)
    return gw


def _phases(k, s):
    """(phase, taps in that phase) for a kernel extent k and stride s."""
    return [(t, len(range(t, k, s))) for t in range(s) if t < k]


def strided_corr(xp, w, stride):
    """Valid correlation of an already padded input with the given stride."""
    sh, sw = stride
    kh, kw = w.shape[2], w.shape[3]
    ho = (xp.shape[2] - kh) // sh + 1
    wo = (xp.shape[3] - kw) // sw + 1
    if (sh, sw) == (1, 1):
        return corr(xp, w)
    out = None
    for ty, ay in _phases(kh, sh):
        for tx, ax in _phases(kw, sw):
            xs = xp[:, :, ty::sh, tx::sw][:, :, : ho + ay - 1, : wo + ax - 1]
            part = corr(xs, w[:, :, ty::sh, tx::sw])
            out = part if out is None else out + part
    return out


def strided_corr_wgrad(xp, g, kernel, stride):
    """Weight gradient of ``strided_corr(xp, w, stride)`` given output grad g."""
    sh, sw = stride
    kh, kw = kernel
    if (sh, sw) == (1, 1):
        return corr_wgrad(xp, g, kh, kw)
    dtype = np.result_type(xp.dtype, g.dtype)
    gw = np.zeros((g.shape[1], xp.shape[1], kh, kw), dtype=dtype)
    ho, wo = g.shape[2], g.shape[3]
    for ty, ay in _phases(kh, sh):
        for tx, ax in _phases(kw, sw):
            xs = xp[:, :, ty::sh, tx::sw][:, :, : ho + ay - 1, : wo + ax - 1]
            gw[:, :, ty::sh, tx::sw] = corr_wgrad(xs, g, ay, ax)
    return gw


def scatter_full(x, w, stride):
    """Full transposed correlation (no cropping).

    z[n, co, s*m + k] += x[n, ci, m] * w[ci, co, k] over both spatial axes; the
    result has extent (h - 1) * s + k. This is the adjoint of
    ``strided_corr(., w, stride)`` with the channel roles of `w` swapped.
    """
    sh, sw = stride
    kh, kw = w.shape[2], w.shape[3]
    n, _, h, wd = x.shape
    dtype = np.result_type(x.dtype, w.dtype)
    if (sh, sw) == (1, 1):
        return corr(_pad_hw(x, kh - 1, kw - 1), w[:, :, ::-1, ::-1].transpose(1, 0, 2, 3))
    z = np.zeros((n, w.shape[1], (h - 1) * sh + kh, (wd - 1) * sw + kw), dtype=dtype)
    for ty, ay in _phases(kh, sh):
        for tx, ax in _phases(kw, sw):
            sub = w[:, :, ty::sh, tx::sw][:, :, ::-1, ::-1].transpose(1, 0, 2, 3)
            z[:, :, ty::sh, tx::sw] = corr(_pad_hw(x, ay - 1, ax - 1), sub)
    return z


def corr_input_grad(g, w, ph, pw, h, wd):
    """Gradient w.r.t. x of ``corr(_pad_hw(x, ph, pw), w)`` given output grad g."""
    kh, kw = w.shape[2], w.shape[3]
    if 2 * ph <= kh - 1 and 2 * pw <= kw - 1:
        # padding g by k - 1 - p lands the correlation on the input grid
        wf = w[:, :, ::-1, ::-1].transpose(1, 0, 2, 3)
        return corr(_pad_hw(g, kh - 1 - ph, kw - 1 - pw), wf)[:, :, :h, :wd]
    return scatter_full(g, w, (1, 1))[:, :, ph:ph + h, pw:pw + wd]


def scatter_full_wgrad(x, gz, kernel, stride):
    """Gradient of ``scatter_full(x, w, stride)`` w.r.t. w, given grad gz of z."""
    # z = scatter_full(x, w) is linear in w with <gz, z> = sum w * strided_corr_wgrad(gz, x)
    return strided_corr_wgrad(gz, x, kernel, stride)
