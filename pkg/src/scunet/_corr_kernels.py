"""Unrolled stride-1 correlation kernels. GENERATED by tools/gen_kernels.py; do not edit.

corr_KHxKW(xp, w, out):       out[n, o, i, j] = sum_{c, ki, kj} w[o, c, ki, kj] * xp[n, c, i + ki, j + kj]
wgrad_KHxKW(xp, g, gw):       gw[o, c, ki, kj] = sum_{n, i, j} g[n, o, i, j] * xp[n, c, i + ki, j + kj]

All arrays must be C-contiguous and share a dtype; `out` and `gw` are overwritten.
"""
import numpy as np
from numba import njit


@njit(fastmath=True, cache=True, nogil=True)
def corr_1x1(xp, w, out):
    N = xp.shape[0]
    C = xp.shape[1]
    O = w.shape[0]
    H = out.shape[2]
    W = out.shape[3]
    a0 = np.empty(W, out.dtype)
    a1 = np.empty(W, out.dtype)
    a2 = np.empty(W, out.dtype)
    a3 = np.empty(W, out.dtype)
    for n in range(N):
        o = 0
        while o + 4 <= O:
            for i in range(H):
                a0[:] = 0
                a1[:] = 0
                a2[:] = 0
                a3[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w1_00 = w[o + 1, c, 0, 0]
                    w2_00 = w[o + 2, c, 0, 0]
                    w3_00 = w[o + 3, c, 0, 0]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        a0[j] += w0_00 * x00
                        a1[j] += w1_00 * x00
                        a2[j] += w2_00 * x00
                        a3[j] += w3_00 * x00
                out[n, o + 0, i] = a0
                out[n, o + 1, i] = a1
                out[n, o + 2, i] = a2
                out[n, o + 3, i] = a3
            o += 4
        while o < O:
            for i in range(H):
                a0[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        a0[j] += w0_00 * x00
                out[n, o + 0, i] = a0
            o += 1


@njit(fastmath=True, cache=True, nogil=True)
def wgrad_1x1(xp, g, gw):
    N = xp.shape[0]
    C = xp.shape[1]
    O = g.shape[1]
    H = g.shape[2]
    W = g.shape[3]
    zero = gw.dtype.type(0)
    for c in range(C):
        o = 0
        while o + 2 <= O:
            s0_00 = zero
            s1_00 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    g1 = g[n, o + 1, i]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        gv1 = g1[j]
                        s1_00 += gv1 * x00
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 1, c, 0, 0] = s1_00
            o += 2
        while o < O:
            s0_00 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
            gw[o + 0, c, 0, 0] = s0_00
            o += 1

@njit(fastmath=True, cache=True, nogil=True)
def corr_1x2(xp, w, out):
    N = xp.shape[0]
    C = xp.shape[1]
    O = w.shape[0]
    H = out.shape[2]
    W = out.shape[3]
    a0 = np.empty(W, out.dtype)
    a1 = np.empty(W, out.dtype)
    a2 = np.empty(W, out.dtype)
    a3 = np.empty(W, out.dtype)
    for n in range(N):
        o = 0
        while o + 4 <= O:
            for i in range(H):
                a0[:] = 0
                a1[:] = 0
                a2[:] = 0
                a3[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w1_00 = w[o + 1, c, 0, 0]
                    w1_01 = w[o + 1, c, 0, 1]
                    w2_00 = w[o + 2, c, 0, 0]
                    w2_01 = w[o + 2, c, 0, 1]
                    w3_00 = w[o + 3, c, 0, 0]
                    w3_01 = w[o + 3, c, 0, 1]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        a0[j] += w0_00 * x00 + w0_01 * x01
                        a1[j] += w1_00 * x00 + w1_01 * x01
                        a2[j] += w2_00 * x00 + w2_01 * x01
                        a3[j] += w3_00 * x00 + w3_01 * x01
                out[n, o + 0, i] = a0
                out[n, o + 1, i] = a1
                out[n, o + 2, i] = a2
                out[n, o + 3, i] = a3
            o += 4
        while o < O:
            for i in range(H):
                a0[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        a0[j] += w0_00 * x00 + w0_01 * x01
                out[n, o + 0, i] = a0
            o += 1


@njit(fastmath=True, cache=True, nogil=True)
def wgrad_1x2(xp, g, gw):
    N = xp.shape[0]
    C = xp.shape[1]
    O = g.shape[1]
    H = g.shape[2]
    W = g.shape[3]
    zero = gw.dtype.type(0)
    for c in range(C):
        o = 0
        while o + 2 <= O:
            s0_00 = zero
            s0_01 = zero
            s1_00 = zero
            s1_01 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    g1 = g[n, o + 1, i]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        gv1 = g1[j]
                        s1_00 += gv1 * x00
                        s1_01 += gv1 * x01
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 1, c, 0, 0] = s1_00
            gw[o + 1, c, 0, 1] = s1_01
            o += 2
        while o < O:
            s0_00 = zero
            s0_01 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            o += 1

@njit(fastmath=True, cache=True, nogil=True)
def corr_1x3(xp, w, out):
    N = xp.shape[0]
    C = xp.shape[1]
    O = w.shape[0]
    H = out.shape[2]
    W = out.shape[3]
    a0 = np.empty(W, out.dtype)
    a1 = np.empty(W, out.dtype)
    a2 = np.empty(W, out.dtype)
    a3 = np.empty(W, out.dtype)
    for n in range(N):
        o = 0
        while o + 4 <= O:
            for i in range(H):
                a0[:] = 0
                a1[:] = 0
                a2[:] = 0
                a3[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_02 = w[o + 0, c, 0, 2]
                    w1_00 = w[o + 1, c, 0, 0]
                    w1_01 = w[o + 1, c, 0, 1]
                    w1_02 = w[o + 1, c, 0, 2]
                    w2_00 = w[o + 2, c, 0, 0]
                    w2_01 = w[o + 2, c, 0, 1]
                    w2_02 = w[o + 2, c, 0, 2]
                    w3_00 = w[o + 3, c, 0, 0]
                    w3_01 = w[o + 3, c, 0, 1]
                    w3_02 = w[o + 3, c, 0, 2]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_02 * x02
                        a1[j] += w1_00 * x00 + w1_01 * x01 + w1_02 * x02
                        a2[j] += w2_00 * x00 + w2_01 * x01 + w2_02 * x02
                        a3[j] += w3_00 * x00 + w3_01 * x01 + w3_02 * x02
                out[n, o + 0, i] = a0
                out[n, o + 1, i] = a1
                out[n, o + 2, i] = a2
                out[n, o + 3, i] = a3
            o += 4
        while o < O:
            for i in range(H):
                a0[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_02 = w[o + 0, c, 0, 2]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_02 * x02
                out[n, o + 0, i] = a0
            o += 1


@njit(fastmath=True, cache=True, nogil=True)
def wgrad_1x3(xp, g, gw):
    N = xp.shape[0]
    C = xp.shape[1]
    O = g.shape[1]
    H = g.shape[2]
    W = g.shape[3]
    zero = gw.dtype.type(0)
    for c in range(C):
        o = 0
        while o + 2 <= O:
            s0_00 = zero
            s0_01 = zero
            s0_02 = zero
            s1_00 = zero
            s1_01 = zero
            s1_02 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    g1 = g[n, o + 1, i]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_02 += gv0 * x02
                        gv1 = g1[j]
                        s1_00 += gv1 * x00
                        s1_01 += gv1 * x01
                        s1_02 += gv1 * x02
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 0, 2] = s0_02
            gw[o + 1, c, 0, 0] = s1_00
            gw[o + 1, c, 0, 1] = s1_01
            gw[o + 1, c, 0, 2] = s1_02
            o += 2
        while o < O:
            s0_00 = zero
            s0_01 = zero
            s0_02 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    r0 = xp[n, c, i + 0]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_02 += gv0 * x02
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 0, 2] = s0_02
            o += 1

@njit(fastmath=True, cache=True, nogil=True)
def corr_2x1(xp, w, out):
    N = xp.shape[0]
    C = xp.shape[1]
    O = w.shape[0]
    H = out.shape[2]
    W = out.shape[3]
    a0 = np.empty(W, out.dtype)
    a1 = np.empty(W, out.dtype)
    a2 = np.empty(W, out.dtype)
    a3 = np.empty(W, out.dtype)
    for n in range(N):
        o = 0
        while o + 4 <= O:
            for i in range(H):
                a0[:] = 0
                a1[:] = 0
                a2[:] = 0
                a3[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_10 = w[o + 0, c, 1, 0]
                    w1_00 = w[o + 1, c, 0, 0]
                    w1_10 = w[o + 1, c, 1, 0]
                    w2_00 = w[o + 2, c, 0, 0]
                    w2_10 = w[o + 2, c, 1, 0]
                    w3_00 = w[o + 3, c, 0, 0]
                    w3_10 = w[o + 3, c, 1, 0]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x10 = r1[j + 0]
                        a0[j] += w0_00 * x00 + w0_10 * x10
                        a1[j] += w1_00 * x00 + w1_10 * x10
                        a2[j] += w2_00 * x00 + w2_10 * x10
                        a3[j] += w3_00 * x00 + w3_10 * x10
                out[n, o + 0, i] = a0
                out[n, o + 1, i] = a1
                out[n, o + 2, i] = a2
                out[n, o + 3, i] = a3
            o += 4
        while o < O:
            for i in range(H):
                a0[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_10 = w[o + 0, c, 1, 0]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x10 = r1[j + 0]
                        a0[j] += w0_00 * x00 + w0_10 * x10
                out[n, o + 0, i] = a0
            o += 1


@njit(fastmath=True, cache=True, nogil=True)
def wgrad_2x1(xp, g, gw):
    N = xp.shape[0]
    C = xp.shape[1]
    O = g.shape[1]
    H = g.shape[2]
    W = g.shape[3]
    zero = gw.dtype.type(0)
    for c in range(C):
        o = 0
        while o + 2 <= O:
            s0_00 = zero
            s0_10 = zero
            s1_00 = zero
            s1_10 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    g1 = g[n, o + 1, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x10 = r1[j + 0]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_10 += gv0 * x10
                        gv1 = g1[j]
                        s1_00 += gv1 * x00
                        s1_10 += gv1 * x10
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 1, c, 0, 0] = s1_00
            gw[o + 1, c, 1, 0] = s1_10
            o += 2
        while o < O:
            s0_00 = zero
            s0_10 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x10 = r1[j + 0]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_10 += gv0 * x10
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 1, 0] = s0_10
            o += 1

@njit(fastmath=True, cache=True, nogil=True)
def corr_2x2(xp, w, out):
    N = xp.shape[0]
    C = xp.shape[1]
    O = w.shape[0]
    H = out.shape[2]
    W = out.shape[3]
    a0 = np.empty(W, out.dtype)
    a1 = np.empty(W, out.dtype)
    a2 = np.empty(W, out.dtype)
    a3 = np.empty(W, out.dtype)
    for n in range(N):
        o = 0
        while o + 4 <= O:
            for i in range(H):
                a0[:] = 0
                a1[:] = 0
                a2[:] = 0
                a3[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_11 = w[o + 0, c, 1, 1]
                    w1_00 = w[o + 1, c, 0, 0]
                    w1_01 = w[o + 1, c, 0, 1]
                    w1_10 = w[o + 1, c, 1, 0]
                    w1_11 = w[o + 1, c, 1, 1]
                    w2_00 = w[o + 2, c, 0, 0]
                    w2_01 = w[o + 2, c, 0, 1]
                    w2_10 = w[o + 2, c, 1, 0]
                    w2_11 = w[o + 2, c, 1, 1]
                    w3_00 = w[o + 3, c, 0, 0]
                    w3_01 = w[o + 3, c, 0, 1]
                    w3_10 = w[o + 3, c, 1, 0]
                    w3_11 = w[o + 3, c, 1, 1]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_10 * x10 + w0_11 * x11
                        a1[j] += w1_00 * x00 + w1_01 * x01 + w1_10 * x10 + w1_11 * x11
                        a2[j] += w2_00 * x00 + w2_01 * x01 + w2_10 * x10 + w2_11 * x11
                        a3[j] += w3_00 * x00 + w3_01 * x01 + w3_10 * x10 + w3_11 * x11
                out[n, o + 0, i] = a0
                out[n, o + 1, i] = a1
                out[n, o + 2, i] = a2
                out[n, o + 3, i] = a3
            o += 4
        while o < O:
            for i in range(H):
                a0[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_11 = w[o + 0, c, 1, 1]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_10 * x10 + w0_11 * x11
                out[n, o + 0, i] = a0
            o += 1


@njit(fastmath=True, cache=True, nogil=True)
def wgrad_2x2(xp, g, gw):
    N = xp.shape[0]
    C = xp.shape[1]
    O = g.shape[1]
    H = g.shape[2]
    W = g.shape[3]
    zero = gw.dtype.type(0)
    for c in range(C):
        o = 0
        while o + 2 <= O:
            s0_00 = zero
            s0_01 = zero
            s0_10 = zero
            s0_11 = zero
            s1_00 = zero
            s1_01 = zero
            s1_10 = zero
            s1_11 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    g1 = g[n, o + 1, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_10 += gv0 * x10
                        s0_11 += gv0 * x11
                        gv1 = g1[j]
                        s1_00 += gv1 * x00
                        s1_01 += gv1 * x01
                        s1_10 += gv1 * x10
                        s1_11 += gv1 * x11
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 1, 1] = s0_11
            gw[o + 1, c, 0, 0] = s1_00
            gw[o + 1, c, 0, 1] = s1_01
            gw[o + 1, c, 1, 0] = s1_10
            gw[o + 1, c, 1, 1] = s1_11
            o += 2
        while o < O:
            s0_00 = zero
            s0_01 = zero
            s0_10 = zero
            s0_11 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_10 += gv0 * x10
                        s0_11 += gv0 * x11
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 1, 1] = s0_11
            o += 1

@njit(fastmath=True, cache=True, nogil=True)
def corr_2x3(xp, w, out):
    N = xp.shape[0]
    C = xp.shape[1]
    O = w.shape[0]
    H = out.shape[2]
    W = out.shape[3]
    a0 = np.empty(W, out.dtype)
    a1 = np.empty(W, out.dtype)
    a2 = np.empty(W, out.dtype)
    a3 = np.empty(W, out.dtype)
    for n in range(N):
        o = 0
        while o + 4 <= O:
            for i in range(H):
                a0[:] = 0
                a1[:] = 0
                a2[:] = 0
                a3[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_02 = w[o + 0, c, 0, 2]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_11 = w[o + 0, c, 1, 1]
                    w0_12 = w[o + 0, c, 1, 2]
                    w1_00 = w[o + 1, c, 0, 0]
                    w1_01 = w[o + 1, c, 0, 1]
                    w1_02 = w[o + 1, c, 0, 2]
                    w1_10 = w[o + 1, c, 1, 0]
                    w1_11 = w[o + 1, c, 1, 1]
                    w1_12 = w[o + 1, c, 1, 2]
                    w2_00 = w[o + 2, c, 0, 0]
                    w2_01 = w[o + 2, c, 0, 1]
                    w2_02 = w[o + 2, c, 0, 2]
                    w2_10 = w[o + 2, c, 1, 0]
                    w2_11 = w[o + 2, c, 1, 1]
                    w2_12 = w[o + 2, c, 1, 2]
                    w3_00 = w[o + 3, c, 0, 0]
                    w3_01 = w[o + 3, c, 0, 1]
                    w3_02 = w[o + 3, c, 0, 2]
                    w3_10 = w[o + 3, c, 1, 0]
                    w3_11 = w[o + 3, c, 1, 1]
                    w3_12 = w[o + 3, c, 1, 2]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x12 = r1[j + 2]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_02 * x02 + w0_10 * x10 + w0_11 * x11 + w0_12 * x12
                        a1[j] += w1_00 * x00 + w1_01 * x01 + w1_02 * x02 + w1_10 * x10 + w1_11 * x11 + w1_12 * x12
                        a2[j] += w2_00 * x00 + w2_01 * x01 + w2_02 * x02 + w2_10 * x10 + w2_11 * x11 + w2_12 * x12
                        a3[j] += w3_00 * x00 + w3_01 * x01 + w3_02 * x02 + w3_10 * x10 + w3_11 * x11 + w3_12 * x12
                out[n, o + 0, i] = a0
                out[n, o + 1, i] = a1
                out[n, o + 2, i] = a2
                out[n, o + 3, i] = a3
            o += 4
        while o < O:
            for i in range(H):
                a0[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_02 = w[o + 0, c, 0, 2]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_11 = w[o + 0, c, 1, 1]
                    w0_12 = w[o + 0, c, 1, 2]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x12 = r1[j + 2]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_02 * x02 + w0_10 * x10 + w0_11 * x11 + w0_12 * x12
                out[n, o + 0, i] = a0
            o += 1


@njit(fastmath=True, cache=True, nogil=True)
def wgrad_2x3(xp, g, gw):
    N = xp.shape[0]
    C = xp.shape[1]
    O = g.shape[1]
    H = g.shape[2]
    W = g.shape[3]
    zero = gw.dtype.type(0)
    for c in range(C):
        o = 0
        while o + 2 <= O:
            s0_00 = zero
            s0_01 = zero
            s0_02 = zero
            s0_10 = zero
            s0_11 = zero
            s0_12 = zero
            s1_00 = zero
            s1_01 = zero
            s1_02 = zero
            s1_10 = zero
            s1_11 = zero
            s1_12 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    g1 = g[n, o + 1, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x12 = r1[j + 2]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_02 += gv0 * x02
                        s0_10 += gv0 * x10
                        s0_11 += gv0 * x11
                        s0_12 += gv0 * x12
                        gv1 = g1[j]
                        s1_00 += gv1 * x00
                        s1_01 += gv1 * x01
                        s1_02 += gv1 * x02
                        s1_10 += gv1 * x10
                        s1_11 += gv1 * x11
                        s1_12 += gv1 * x12
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 0, 2] = s0_02
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 1, 1] = s0_11
            gw[o + 0, c, 1, 2] = s0_12
            gw[o + 1, c, 0, 0] = s1_00
            gw[o + 1, c, 0, 1] = s1_01
            gw[o + 1, c, 0, 2] = s1_02
            gw[o + 1, c, 1, 0] = s1_10
            gw[o + 1, c, 1, 1] = s1_11
            gw[o + 1, c, 1, 2] = s1_12
            o += 2
        while o < O:
            s0_00 = zero
            s0_01 = zero
            s0_02 = zero
            s0_10 = zero
            s0_11 = zero
            s0_12 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x12 = r1[j + 2]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_02 += gv0 * x02
                        s0_10 += gv0 * x10
                        s0_11 += gv0 * x11
                        s0_12 += gv0 * x12
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 0, 2] = s0_02
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 1, 1] = s0_11
            gw[o + 0, c, 1, 2] = s0_12
            o += 1

@njit(fastmath=True, cache=True, nogil=True)
def corr_3x1(xp, w, out):
    N = xp.shape[0]
    C = xp.shape[1]
    O = w.shape[0]
    H = out.shape[2]
    W = out.shape[3]
    a0 = np.empty(W, out.dtype)
    a1 = np.empty(W, out.dtype)
    a2 = np.empty(W, out.dtype)
    a3 = np.empty(W, out.dtype)
    for n in range(N):
        o = 0
        while o + 4 <= O:
            for i in range(H):
                a0[:] = 0
                a1[:] = 0
                a2[:] = 0
                a3[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_20 = w[o + 0, c, 2, 0]
                    w1_00 = w[o + 1, c, 0, 0]
                    w1_10 = w[o + 1, c, 1, 0]
                    w1_20 = w[o + 1, c, 2, 0]
                    w2_00 = w[o + 2, c, 0, 0]
                    w2_10 = w[o + 2, c, 1, 0]
                    w2_20 = w[o + 2, c, 2, 0]
                    w3_00 = w[o + 3, c, 0, 0]
                    w3_10 = w[o + 3, c, 1, 0]
                    w3_20 = w[o + 3, c, 2, 0]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x10 = r1[j + 0]
                        x20 = r2[j + 0]
                        a0[j] += w0_00 * x00 + w0_10 * x10 + w0_20 * x20
                        a1[j] += w1_00 * x00 + w1_10 * x10 + w1_20 * x20
                        a2[j] += w2_00 * x00 + w2_10 * x10 + w2_20 * x20
                        a3[j] += w3_00 * x00 + w3_10 * x10 + w3_20 * x20
                out[n, o + 0, i] = a0
                out[n, o + 1, i] = a1
                out[n, o + 2, i] = a2
                out[n, o + 3, i] = a3
            o += 4
        while o < O:
            for i in range(H):
                a0[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_20 = w[o + 0, c, 2, 0]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x10 = r1[j + 0]
                        x20 = r2[j + 0]
                        a0[j] += w0_00 * x00 + w0_10 * x10 + w0_20 * x20
                out[n, o + 0, i] = a0
            o += 1


@njit(fastmath=True, cache=True, nogil=True)
def wgrad_3x1(xp, g, gw):
    N = xp.shape[0]
    C = xp.shape[1]
    O = g.shape[1]
    H = g.shape[2]
    W = g.shape[3]
    zero = gw.dtype.type(0)
    for c in range(C):
        o = 0
        while o + 2 <= O:
            s0_00 = zero
            s0_10 = zero
            s0_20 = zero
            s1_00 = zero
            s1_10 = zero
            s1_20 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    g1 = g[n, o + 1, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x10 = r1[j + 0]
                        x20 = r2[j + 0]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_10 += gv0 * x10
                        s0_20 += gv0 * x20
                        gv1 = g1[j]
                        s1_00 += gv1 * x00
                        s1_10 += gv1 * x10
                        s1_20 += gv1 * x20
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 2, 0] = s0_20
            gw[o + 1, c, 0, 0] = s1_00
            gw[o + 1, c, 1, 0] = s1_10
            gw[o + 1, c, 2, 0] = s1_20
            o += 2
        while o < O:
            s0_00 = zero
            s0_10 = zero
            s0_20 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x10 = r1[j + 0]
                        x20 = r2[j + 0]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_10 += gv0 * x10
                        s0_20 += gv0 * x20
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 2, 0] = s0_20
            o += 1

@njit(fastmath=True, cache=True, nogil=True)
def corr_3x2(xp, w, out):
    N = xp.shape[0]
    C = xp.shape[1]
    O = w.shape[0]
    H = out.shape[2]
    W = out.shape[3]
    a0 = np.empty(W, out.dtype)
    a1 = np.empty(W, out.dtype)
    a2 = np.empty(W, out.dtype)
    a3 = np.empty(W, out.dtype)
    for n in range(N):
        o = 0
        while o + 4 <= O:
            for i in range(H):
                a0[:] = 0
                a1[:] = 0
                a2[:] = 0
                a3[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_11 = w[o + 0, c, 1, 1]
                    w0_20 = w[o + 0, c, 2, 0]
                    w0_21 = w[o + 0, c, 2, 1]
                    w1_00 = w[o + 1, c, 0, 0]
                    w1_01 = w[o + 1, c, 0, 1]
                    w1_10 = w[o + 1, c, 1, 0]
                    w1_11 = w[o + 1, c, 1, 1]
                    w1_20 = w[o + 1, c, 2, 0]
                    w1_21 = w[o + 1, c, 2, 1]
                    w2_00 = w[o + 2, c, 0, 0]
                    w2_01 = w[o + 2, c, 0, 1]
                    w2_10 = w[o + 2, c, 1, 0]
                    w2_11 = w[o + 2, c, 1, 1]
                    w2_20 = w[o + 2, c, 2, 0]
                    w2_21 = w[o + 2, c, 2, 1]
                    w3_00 = w[o + 3, c, 0, 0]
                    w3_01 = w[o + 3, c, 0, 1]
                    w3_10 = w[o + 3, c, 1, 0]
                    w3_11 = w[o + 3, c, 1, 1]
                    w3_20 = w[o + 3, c, 2, 0]
                    w3_21 = w[o + 3, c, 2, 1]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x20 = r2[j + 0]
                        x21 = r2[j + 1]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_10 * x10 + w0_11 * x11 + w0_20 * x20 + w0_21 * x21
                        a1[j] += w1_00 * x00 + w1_01 * x01 + w1_10 * x10 + w1_11 * x11 + w1_20 * x20 + w1_21 * x21
                        a2[j] += w2_00 * x00 + w2_01 * x01 + w2_10 * x10 + w2_11 * x11 + w2_20 * x20 + w2_21 * x21
                        a3[j] += w3_00 * x00 + w3_01 * x01 + w3_10 * x10 + w3_11 * x11 + w3_20 * x20 + w3_21 * x21
                out[n, o + 0, i] = a0
                out[n, o + 1, i] = a1
                out[n, o + 2, i] = a2
                out[n, o + 3, i] = a3
            o += 4
        while o < O:
            for i in range(H):
                a0[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_11 = w[o + 0, c, 1, 1]
                    w0_20 = w[o + 0, c, 2, 0]
                    w0_21 = w[o + 0, c, 2, 1]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x20 = r2[j + 0]
                        x21 = r2[j + 1]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_10 * x10 + w0_11 * x11 + w0_20 * x20 + w0_21 * x21
                out[n, o + 0, i] = a0
            o += 1


@njit(fastmath=True, cache=True, nogil=True)
def wgrad_3x2(xp, g, gw):
    N = xp.shape[0]
    C = xp.shape[1]
    O = g.shape[1]
    H = g.shape[2]
    W = g.shape[3]
    zero = gw.dtype.type(0)
    for c in range(C):
        o = 0
        while o + 2 <= O:
            s0_00 = zero
            s0_01 = zero
            s0_10 = zero
            s0_11 = zero
            s0_20 = zero
            s0_21 = zero
            s1_00 = zero
            s1_01 = zero
            s1_10 = zero
            s1_11 = zero
            s1_20 = zero
            s1_21 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    g1 = g[n, o + 1, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x20 = r2[j + 0]
                        x21 = r2[j + 1]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_10 += gv0 * x10
                        s0_11 += gv0 * x11
                        s0_20 += gv0 * x20
                        s0_21 += gv0 * x21
                        gv1 = g1[j]
                        s1_00 += gv1 * x00
                        s1_01 += gv1 * x01
                        s1_10 += gv1 * x10
                        s1_11 += gv1 * x11
                        s1_20 += gv1 * x20
                        s1_21 += gv1 * x21
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 1, 1] = s0_11
            gw[o + 0, c, 2, 0] = s0_20
            gw[o + 0, c, 2, 1] = s0_21
            gw[o + 1, c, 0, 0] = s1_00
            gw[o + 1, c, 0, 1] = s1_01
            gw[o + 1, c, 1, 0] = s1_10
            gw[o + 1, c, 1, 1] = s1_11
            gw[o + 1, c, 2, 0] = s1_20
            gw[o + 1, c, 2, 1] = s1_21
            o += 2
        while o < O:
            s0_00 = zero
            s0_01 = zero
            s0_10 = zero
            s0_11 = zero
            s0_20 = zero
            s0_21 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x20 = r2[j + 0]
                        x21 = r2[j + 1]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_10 += gv0 * x10
                        s0_11 += gv0 * x11
                        s0_20 += gv0 * x20
                        s0_21 += gv0 * x21
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 1, 1] = s0_11
            gw[o + 0, c, 2, 0] = s0_20
            gw[o + 0, c, 2, 1] = s0_21
            o += 1

@njit(fastmath=True, cache=True, nogil=True)
def corr_3x3(xp, w, out):
    N = xp.shape[0]
    C = xp.shape[1]
    O = w.shape[0]
    H = out.shape[2]
    W = out.shape[3]
    a0 = np.empty(W, out.dtype)
    a1 = np.empty(W, out.dtype)
    a2 = np.empty(W, out.dtype)
    a3 = np.empty(W, out.dtype)
    for n in range(N):
        o = 0
        while o + 4 <= O:
            for i in range(H):
                a0[:] = 0
                a1[:] = 0
                a2[:] = 0
                a3[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_02 = w[o + 0, c, 0, 2]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_11 = w[o + 0, c, 1, 1]
                    w0_12 = w[o + 0, c, 1, 2]
                    w0_20 = w[o + 0, c, 2, 0]
                    w0_21 = w[o + 0, c, 2, 1]
                    w0_22 = w[o + 0, c, 2, 2]
                    w1_00 = w[o + 1, c, 0, 0]
                    w1_01 = w[o + 1, c, 0, 1]
                    w1_02 = w[o + 1, c, 0, 2]
                    w1_10 = w[o + 1, c, 1, 0]
                    w1_11 = w[o + 1, c, 1, 1]
                    w1_12 = w[o + 1, c, 1, 2]
                    w1_20 = w[o + 1, c, 2, 0]
                    w1_21 = w[o + 1, c, 2, 1]
                    w1_22 = w[o + 1, c, 2, 2]
                    w2_00 = w[o + 2, c, 0, 0]
                    w2_01 = w[o + 2, c, 0, 1]
                    w2_02 = w[o + 2, c, 0, 2]
                    w2_10 = w[o + 2, c, 1, 0]
                    w2_11 = w[o + 2, c, 1, 1]
                    w2_12 = w[o + 2, c, 1, 2]
                    w2_20 = w[o + 2, c, 2, 0]
                    w2_21 = w[o + 2, c, 2, 1]
                    w2_22 = w[o + 2, c, 2, 2]
                    w3_00 = w[o + 3, c, 0, 0]
                    w3_01 = w[o + 3, c, 0, 1]
                    w3_02 = w[o + 3, c, 0, 2]
                    w3_10 = w[o + 3, c, 1, 0]
                    w3_11 = w[o + 3, c, 1, 1]
                    w3_12 = w[o + 3, c, 1, 2]
                    w3_20 = w[o + 3, c, 2, 0]
                    w3_21 = w[o + 3, c, 2, 1]
                    w3_22 = w[o + 3, c, 2, 2]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x12 = r1[j + 2]
                        x20 = r2[j + 0]
                        x21 = r2[j + 1]
                        x22 = r2[j + 2]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_02 * x02 + w0_10 * x10 + w0_11 * x11 + w0_12 * x12 + w0_20 * x20 + w0_21 * x21 + w0_22 * x22
                        a1[j] += w1_00 * x00 + w1_01 * x01 + w1_02 * x02 + w1_10 * x10 + w1_11 * x11 + w1_12 * x12 + w1_20 * x20 + w1_21 * x21 + w1_22 * x22
                        a2[j] += w2_00 * x00 + w2_01 * x01 + w2_02 * x02 + w2_10 * x10 + w2_11 * x11 + w2_12 * x12 + w2_20 * x20 + w2_21 * x21 + w2_22 * x22
                        a3[j] += w3_00 * x00 + w3_01 * x01 + w3_02 * x02 + w3_10 * x10 + w3_11 * x11 + w3_12 * x12 + w3_20 * x20 + w3_21 * x21 + w3_22 * x22
                out[n, o + 0, i] = a0
                out[n, o + 1, i] = a1
                out[n, o + 2, i] = a2
                out[n, o + 3, i] = a3
            o += 4
        while o < O:
            for i in range(H):
                a0[:] = 0
                for c in range(C):
                    w0_00 = w[o + 0, c, 0, 0]
                    w0_01 = w[o + 0, c, 0, 1]
                    w0_02 = w[o + 0, c, 0, 2]
                    w0_10 = w[o + 0, c, 1, 0]
                    w0_11 = w[o + 0, c, 1, 1]
                    w0_12 = w[o + 0, c, 1, 2]
                    w0_20 = w[o + 0, c, 2, 0]
                    w0_21 = w[o + 0, c, 2, 1]
                    w0_22 = w[o + 0, c, 2, 2]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x12 = r1[j + 2]
                        x20 = r2[j + 0]
                        x21 = r2[j + 1]
                        x22 = r2[j + 2]
                        a0[j] += w0_00 * x00 + w0_01 * x01 + w0_02 * x02 + w0_10 * x10 + w0_11 * x11 + w0_12 * x12 + w0_20 * x20 + w0_21 * x21 + w0_22 * x22
                out[n, o + 0, i] = a0
            o += 1


@njit(fastmath=True, cache=True, nogil=True)
def wgrad_3x3(xp, g, gw):
    N = xp.shape[0]
    C = xp.shape[1]
    O = g.shape[1]
    H = g.shape[2]
    W = g.shape[3]
    zero = gw.dtype.type(0)
    for c in range(C):
        o = 0
        while o + 2 <= O:
            s0_00 = zero
            s0_01 = zero
            s0_02 = zero
            s0_10 = zero
            s0_11 = zero
            s0_12 = zero
            s0_20 = zero
            s0_21 = zero
            s0_22 = zero
            s1_00 = zero
            s1_01 = zero
            s1_02 = zero
            s1_10 = zero
            s1_11 = zero
            s1_12 = zero
            s1_20 = zero
            s1_21 = zero
            s1_22 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    g1 = g[n, o + 1, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x12 = r1[j + 2]
                        x20 = r2[j + 0]
                        x21 = r2[j + 1]
                        x22 = r2[j + 2]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_02 += gv0 * x02
                        s0_10 += gv0 * x10
                        s0_11 += gv0 * x11
                        s0_12 += gv0 * x12
                        s0_20 += gv0 * x20
                        s0_21 += gv0 * x21
                        s0_22 += gv0 * x22
                        gv1 = g1[j]
                        s1_00 += gv1 * x00
                        s1_01 += gv1 * x01
                        s1_02 += gv1 * x02
                        s1_10 += gv1 * x10
                        s1_11 += gv1 * x11
                        s1_12 += gv1 * x12
                        s1_20 += gv1 * x20
                        s1_21 += gv1 * x21
                        s1_22 += gv1 * x22
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 0, 2] = s0_02
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 1, 1] = s0_11
            gw[o + 0, c, 1, 2] = s0_12
            gw[o + 0, c, 2, 0] = s0_20
            gw[o + 0, c, 2, 1] = s0_21
            gw[o + 0, c, 2, 2] = s0_22
            gw[o + 1, c, 0, 0] = s1_00
            gw[o + 1, c, 0, 1] = s1_01
            gw[o + 1, c, 0, 2] = s1_02
            gw[o + 1, c, 1, 0] = s1_10
            gw[o + 1, c, 1, 1] = s1_11
            gw[o + 1, c, 1, 2] = s1_12
            gw[o + 1, c, 2, 0] = s1_20
            gw[o + 1, c, 2, 1] = s1_21
            gw[o + 1, c, 2, 2] = s1_22
            o += 2
        while o < O:
            s0_00 = zero
            s0_01 = zero
            s0_02 = zero
            s0_10 = zero
            s0_11 = zero
            s0_12 = zero
            s0_20 = zero
            s0_21 = zero
            s0_22 = zero
            for n in range(N):
                for i in range(H):
                    g0 = g[n, o + 0, i]
                    r0 = xp[n, c, i + 0]
                    r1 = xp[n, c, i + 1]
                    r2 = xp[n, c, i + 2]
                    for j in range(W):
                        x00 = r0[j + 0]
                        x01 = r0[j + 1]
                        x02 = r0[j + 2]
                        x10 = r1[j + 0]
                        x11 = r1[j + 1]
                        x12 = r1[j + 2]
                        x20 = r2[j + 0]
                        x21 = r2[j + 1]
                        x22 = r2[j + 2]
                        gv0 = g0[j]
                        s0_00 += gv0 * x00
                        s0_01 += gv0 * x01
                        s0_02 += gv0 * x02
                        s0_10 += gv0 * x10
                        s0_11 += gv0 * x11
                        s0_12 += gv0 * x12
                        s0_20 += gv0 * x20
                        s0_21 += gv0 * x21
                        s0_22 += gv0 * x22
            gw[o + 0, c, 0, 0] = s0_00
            gw[o + 0, c, 0, 1] = s0_01
            gw[o + 0, c, 0, 2] = s0_02
            gw[o + 0, c, 1, 0] = s0_10
            gw[o + 0, c, 1, 1] = s0_11
            gw[o + 0, c, 1, 2] = s0_12
            gw[o + 0, c, 2, 0] = s0_20
            gw[o + 0, c, 2, 1] = s0_21
            gw[o + 0, c, 2, 2] = s0_22
            o += 1


KERNELS = {
    (1, 1): (corr_1x1, wgrad_1x1),
    (1, 2): (corr_1x2, wgrad_1x2),
    (1, 3): (corr_1x3, wgrad_1x3),
    (2, 1): (corr_2x1, wgrad_2x1),
    (2, 2): (corr_2x2, wgrad_2x2),
    (2, 3): (corr_2x3, wgrad_2x3),
    (3, 1): (corr_3x1, wgrad_3x1),
    (3, 2): (corr_3x2, wgrad_3x2),
    (3, 3): (corr_3x3, wgrad_3x3),
}
