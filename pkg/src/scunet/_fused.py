"""numba kernels for the memory-bound layers (batchnorm + ReLU, 2x2 max pooling).

Reductions accumulate in float64 regardless of the activation dtype.
"""
import numpy as np
from numba import njit


@njit(fastmath=True, cache=True, nogil=True)
def channel_moments(x):
    """Per-channel mean and biased variance, one pass with float64 sums."""
    n, c, h, w = x.shape
    mean = np.zeros(c)
    var = np.zeros(c)
    m = n * h * w
    for ch in range(c):
        s = 0.0
        q = 0.0
        for i in range(n):
            plane = x[i, ch]
            for a in range(h):
                for b in range(w):
                    v = np.float64(plane[a, b])
                    s += v
                    q += v * v
        mu = s / m
        mean[ch] = mu
        var[ch] = max(q / m - mu * mu, 0.0)
    return mean, var


@njit(fastmath=True, cache=True, nogil=True)
def affine_relu(x, scale, shift, out):
    """out = max(0, x * scale[c] + shift[c])."""
    n, c, h, w = x.shape
    for i in range(n):
        for ch in range(c):
            sc = scale[ch]
            sh = shift[ch]
            src = x[i, ch]
            dst = out[i, ch]
            for a in range(h):
                for b in range(w):
                    v = src[a, b] * sc + sh
                    dst[a, b] = v if v > 0 else 0


@njit(fastmath=True, cache=True, nogil=True)
def bn_relu_backward(g, x, y, mean, inv_std, gamma, train, gx):
    """Backward of y = relu(gamma * (x - mean) * inv_std + beta).

    Returns (dgamma, dbeta) and writes the input gradient into gx. In train mode
    mean/inv_std are batch statistics and contribute to the input gradient.
    """
    n, c, h, w = x.shape
    m = n * h * w
    dgamma = np.zeros(c)
    dbeta = np.zeros(c)
    for ch in range(c):
        mu = mean[ch]
        istd = inv_std[ch]
        sg = 0.0
        sgx = 0.0
        for i in range(n):
            gp = g[i, ch]
            xp = x[i, ch]
            yp = y[i, ch]
            for a in range(h):
                for b in range(w):
                    if yp[a, b] > 0:
                        gv = gp[a, b]
                        sg += gv
                        sgx += gv * (xp[a, b] - mu) * istd
        dgamma[ch] = sgx
        dbeta[ch] = sg
        k = gamma[ch] * istd
        if train:
            c1 = sg / m
            c2 = sgx / m
            for i in range(n):
                gp = g[i, ch]
                xp = x[i, ch]
                yp = y[i, ch]
                op = gx[i, ch]
                for a in range(h):
                    for b in range(w):
                        gv = gp[a, b] if yp[a, b] > 0 else 0.0
                        op[a, b] = k * (gv - c1 - (xp[a, b] - mu) * istd * c2)
        else:
            for i in range(n):
                gp = g[i, ch]
                yp = y[i, ch]
                op = gx[i, ch]
                for a in range(h):
                    for b in range(w):
                        op[a, b] = k * gp[a, b] if yp[a, b] > 0 else 0.0
    return dgamma, dbeta


@njit(cache=True, nogil=True)
def maxpool2_forward(x, out, arg):
    """2x2/2 pooling; arg stores the winning offset 0..3 (row-major, first max wins)."""
    n, c, h, w = out.shape
    for i in range(n):
        for ch in range(c):
            src = x[i, ch]
            for a in range(h):
                for b in range(w):
                    best = src[2 * a, 2 * b]
                    k = 0
                    v = src[2 * a, 2 * b + 1]
                    if v > best:
                        best = v
                        k = 1
                    v = src[2 * a + 1, 2 * b]
                    if v > best:
                        best = v
                        k = 2
                    v = src[2 * a + 1, 2 * b + 1]
                    if v > best:
                        best = v
                        k = 3
                    out[i, ch, a, b] = best
                    arg[i, ch, a, b] = k


@njit(cache=True, nogil=True)
def maxpool2_backward(g, arg, gx):
    n, c, h, w = g.shape
    for i in range(n):
        for ch in range(c):
            for a in range(h):
                for b in range(w):
                    k = arg[i, ch, a, b]
                    gx[i, ch, 2 * a + k // 2, 2 * b + k % 2] = g[i, ch, a, b]
