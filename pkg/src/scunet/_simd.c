/* Float32 AVX-512 correlation kernels. GENERATED by tools/gen_kernels.py; do not edit.
 *
 * scunet_corr_f32:  out[n,o,i,j] = sum_{c,a,b} w[o,c,a,b] * xp[n,c,i+a,j+b]
 *                   needs O >= 4, H >= 4, W >= 16 (H, W = output extents)
 * scunet_wgrad_f32: gw[o,c,a,b] = sum_{n,i,j} g[n,o,i,j] * xp[n,c,i+a,j+b]
 *                   needs O >= 2 and a kernel of at most 3x3
 *
 * Edge tiles are shifted back to overlap their neighbour instead of being
 * masked; overlapping outputs are recomputed with the same operation order,
 * so they are bitwise identical. All arrays are C-contiguous.
 */
#define PY_SSIZE_T_CLEAN
#include <Python.h>
#include <stddef.h>
#include <stdlib.h>
#include <string.h>

#if defined(__AVX512F__)
#include <immintrin.h>
#define SCUNET_SIMD 1
#else
#define SCUNET_SIMD 0
#endif

int scunet_simd_available(void) { return SCUNET_SIMD; }

#if SCUNET_SIMD
static void corr_tile(const float *restrict xp, const float *restrict w, float *restrict out,
                      int C, int Hp, int Wp, int H, int W, int KH, int KW, int o0, int i, int j0)
{
    __m512 a00 = _mm512_setzero_ps();
    __m512 a01 = _mm512_setzero_ps();
    __m512 a02 = _mm512_setzero_ps();
    __m512 a03 = _mm512_setzero_ps();
    __m512 a10 = _mm512_setzero_ps();
    __m512 a11 = _mm512_setzero_ps();
    __m512 a12 = _mm512_setzero_ps();
    __m512 a13 = _mm512_setzero_ps();
    __m512 a20 = _mm512_setzero_ps();
    __m512 a21 = _mm512_setzero_ps();
    __m512 a22 = _mm512_setzero_ps();
    __m512 a23 = _mm512_setzero_ps();
    __m512 a30 = _mm512_setzero_ps();
    __m512 a31 = _mm512_setzero_ps();
    __m512 a32 = _mm512_setzero_ps();
    __m512 a33 = _mm512_setzero_ps();
    const size_t ws = (size_t)C * KH * KW;
    for (int c = 0; c < C; c++) {
        const float *xc = xp + ((size_t)c * Hp + i) * Wp + j0;
        const float *wc = w + (size_t)o0 * ws + (size_t)c * KH * KW;
        for (int a = 0; a < KH; a++)
            for (int b = 0; b < KW; b++) {
                const int t = a * KW + b;
                const float *xr = xc + (size_t)a * Wp + b;
                const __m512 w0 = _mm512_set1_ps(wc[0 * ws + t]);
                const __m512 w1 = _mm512_set1_ps(wc[1 * ws + t]);
                const __m512 w2 = _mm512_set1_ps(wc[2 * ws + t]);
                const __m512 w3 = _mm512_set1_ps(wc[3 * ws + t]);
                const __m512 x0 = _mm512_loadu_ps(xr + 0 * (size_t)Wp);
                a00 = _mm512_fmadd_ps(w0, x0, a00);
                a01 = _mm512_fmadd_ps(w1, x0, a01);
                a02 = _mm512_fmadd_ps(w2, x0, a02);
                a03 = _mm512_fmadd_ps(w3, x0, a03);
                const __m512 x1 = _mm512_loadu_ps(xr + 1 * (size_t)Wp);
                a10 = _mm512_fmadd_ps(w0, x1, a10);
                a11 = _mm512_fmadd_ps(w1, x1, a11);
                a12 = _mm512_fmadd_ps(w2, x1, a12);
                a13 = _mm512_fmadd_ps(w3, x1, a13);
                const __m512 x2 = _mm512_loadu_ps(xr + 2 * (size_t)Wp);
                a20 = _mm512_fmadd_ps(w0, x2, a20);
                a21 = _mm512_fmadd_ps(w1, x2, a21);
                a22 = _mm512_fmadd_ps(w2, x2, a22);
                a23 = _mm512_fmadd_ps(w3, x2, a23);
                const __m512 x3 = _mm512_loadu_ps(xr + 3 * (size_t)Wp);
                a30 = _mm512_fmadd_ps(w0, x3, a30);
                a31 = _mm512_fmadd_ps(w1, x3, a31);
                a32 = _mm512_fmadd_ps(w2, x3, a32);
                a33 = _mm512_fmadd_ps(w3, x3, a33);
            }
    }
    const size_t os = (size_t)H * W;
    float *p0 = out + ((size_t)o0 * H + i + 0) * W + j0;
    _mm512_storeu_ps(p0 + 0 * os, a00);
    _mm512_storeu_ps(p0 + 1 * os, a01);
    _mm512_storeu_ps(p0 + 2 * os, a02);
    _mm512_storeu_ps(p0 + 3 * os, a03);
    float *p1 = out + ((size_t)o0 * H + i + 1) * W + j0;
    _mm512_storeu_ps(p1 + 0 * os, a10);
    _mm512_storeu_ps(p1 + 1 * os, a11);
    _mm512_storeu_ps(p1 + 2 * os, a12);
    _mm512_storeu_ps(p1 + 3 * os, a13);
    float *p2 = out + ((size_t)o0 * H + i + 2) * W + j0;
    _mm512_storeu_ps(p2 + 0 * os, a20);
    _mm512_storeu_ps(p2 + 1 * os, a21);
    _mm512_storeu_ps(p2 + 2 * os, a22);
    _mm512_storeu_ps(p2 + 3 * os, a23);
    float *p3 = out + ((size_t)o0 * H + i + 3) * W + j0;
    _mm512_storeu_ps(p3 + 0 * os, a30);
    _mm512_storeu_ps(p3 + 1 * os, a31);
    _mm512_storeu_ps(p3 + 2 * os, a32);
    _mm512_storeu_ps(p3 + 3 * os, a33);
}

void scunet_corr_f32(const float *xp, const float *w, float *out,
                     int N, int C, int O, int Hp, int Wp, int KH, int KW)
{
    const int H = Hp - KH + 1, W = Wp - KW + 1;
    for (int n = 0; n < N; n++) {
        const float *xn = xp + (size_t)n * C * Hp * Wp;
        float *on = out + (size_t)n * O * H * W;
        for (int r = 0; r < H; r += 4) {
            const int i = r + 4 > H ? H - 4 : r;
            for (int o = 0; o < O; o += 4) {
                const int o0 = o + 4 > O ? O - 4 : o;
                for (int j = 0; j < W; j += 16)
                    corr_tile(xn, w, on, C, Hp, Wp, H, W, KH, KW, o0, i, j + 16 > W ? W - 16 : j);
            }
        }
    }
}

static void wgrad_1x1(const float *restrict xc, const float *restrict g0, const float *restrict g1,
                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)
{
    __m512 s0_00 = _mm512_load_ps(acc0 + 0);
    __m512 s1_00 = _mm512_load_ps(acc1 + 0);
    int i = i0;
    for (; i + 2 <= i1; i += 2)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 0) * W + j0);
            const __m512 G01 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 1) * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 0) * W + j0);
            const __m512 G11 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 1) * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G01, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G11, X, s1_00);
            }
        }
    if (i < i1)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00); }
        }
    _mm512_store_ps(acc0 + 0, s0_00);
    _mm512_store_ps(acc1 + 0, s1_00);
}

static void wgrad_1x2(const float *restrict xc, const float *restrict g0, const float *restrict g1,
                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)
{
    __m512 s0_00 = _mm512_load_ps(acc0 + 0);
    __m512 s0_01 = _mm512_load_ps(acc0 + 16);
    __m512 s1_00 = _mm512_load_ps(acc1 + 0);
    __m512 s1_01 = _mm512_load_ps(acc1 + 16);
    int i = i0;
    for (; i + 2 <= i1; i += 2)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 0) * W + j0);
            const __m512 G01 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 1) * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 0) * W + j0);
            const __m512 G11 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 1) * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G01, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G11, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G01, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G11, X, s1_01);
            }
        }
    if (i < i1)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01); }
        }
    _mm512_store_ps(acc0 + 0, s0_00);
    _mm512_store_ps(acc0 + 16, s0_01);
    _mm512_store_ps(acc1 + 0, s1_00);
    _mm512_store_ps(acc1 + 16, s1_01);
}

static void wgrad_1x3(const float *restrict xc, const float *restrict g0, const float *restrict g1,
                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)
{
    __m512 s0_00 = _mm512_load_ps(acc0 + 0);
    __m512 s0_01 = _mm512_load_ps(acc0 + 16);
    __m512 s0_02 = _mm512_load_ps(acc0 + 32);
    __m512 s1_00 = _mm512_load_ps(acc1 + 0);
    __m512 s1_01 = _mm512_load_ps(acc1 + 16);
    __m512 s1_02 = _mm512_load_ps(acc1 + 32);
    int i = i0;
    for (; i + 2 <= i1; i += 2)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 0) * W + j0);
            const __m512 G01 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 1) * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 0) * W + j0);
            const __m512 G11 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 1) * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 2);
              s0_02 = _mm512_fmadd_ps(G00, X, s0_02);
              s1_02 = _mm512_fmadd_ps(G10, X, s1_02);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G01, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G11, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G01, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G11, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 2);
              s0_02 = _mm512_fmadd_ps(G01, X, s0_02);
              s1_02 = _mm512_fmadd_ps(G11, X, s1_02);
            }
        }
    if (i < i1)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 2);
              s0_02 = _mm512_fmadd_ps(G00, X, s0_02);
              s1_02 = _mm512_fmadd_ps(G10, X, s1_02); }
        }
    _mm512_store_ps(acc0 + 0, s0_00);
    _mm512_store_ps(acc0 + 16, s0_01);
    _mm512_store_ps(acc0 + 32, s0_02);
    _mm512_store_ps(acc1 + 0, s1_00);
    _mm512_store_ps(acc1 + 16, s1_01);
    _mm512_store_ps(acc1 + 32, s1_02);
}

static void wgrad_2x1(const float *restrict xc, const float *restrict g0, const float *restrict g1,
                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)
{
    __m512 s0_00 = _mm512_load_ps(acc0 + 0);
    __m512 s0_10 = _mm512_load_ps(acc0 + 16);
    __m512 s1_00 = _mm512_load_ps(acc1 + 0);
    __m512 s1_10 = _mm512_load_ps(acc1 + 16);
    int i = i0;
    for (; i + 2 <= i1; i += 2)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 0) * W + j0);
            const __m512 G01 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 1) * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 0) * W + j0);
            const __m512 G11 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 1) * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s0_00 = _mm512_fmadd_ps(G01, X, s0_00);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10);
              s1_00 = _mm512_fmadd_ps(G11, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G01, X, s0_10);
              s1_10 = _mm512_fmadd_ps(G11, X, s1_10);
            }
        }
    if (i < i1)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10); }
        }
    _mm512_store_ps(acc0 + 0, s0_00);
    _mm512_store_ps(acc0 + 16, s0_10);
    _mm512_store_ps(acc1 + 0, s1_00);
    _mm512_store_ps(acc1 + 16, s1_10);
}

static void wgrad_2x2(const float *restrict xc, const float *restrict g0, const float *restrict g1,
                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)
{
    __m512 s0_00 = _mm512_load_ps(acc0 + 0);
    __m512 s0_01 = _mm512_load_ps(acc0 + 16);
    __m512 s0_10 = _mm512_load_ps(acc0 + 32);
    __m512 s0_11 = _mm512_load_ps(acc0 + 48);
    __m512 s1_00 = _mm512_load_ps(acc1 + 0);
    __m512 s1_01 = _mm512_load_ps(acc1 + 16);
    __m512 s1_10 = _mm512_load_ps(acc1 + 32);
    __m512 s1_11 = _mm512_load_ps(acc1 + 48);
    int i = i0;
    for (; i + 2 <= i1; i += 2)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 0) * W + j0);
            const __m512 G01 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 1) * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 0) * W + j0);
            const __m512 G11 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 1) * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s0_00 = _mm512_fmadd_ps(G01, X, s0_00);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10);
              s1_00 = _mm512_fmadd_ps(G11, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G00, X, s0_11);
              s0_01 = _mm512_fmadd_ps(G01, X, s0_01);
              s1_11 = _mm512_fmadd_ps(G10, X, s1_11);
              s1_01 = _mm512_fmadd_ps(G11, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G01, X, s0_10);
              s1_10 = _mm512_fmadd_ps(G11, X, s1_10);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G01, X, s0_11);
              s1_11 = _mm512_fmadd_ps(G11, X, s1_11);
            }
        }
    if (i < i1)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G00, X, s0_11);
              s1_11 = _mm512_fmadd_ps(G10, X, s1_11); }
        }
    _mm512_store_ps(acc0 + 0, s0_00);
    _mm512_store_ps(acc0 + 16, s0_01);
    _mm512_store_ps(acc0 + 32, s0_10);
    _mm512_store_ps(acc0 + 48, s0_11);
    _mm512_store_ps(acc1 + 0, s1_00);
    _mm512_store_ps(acc1 + 16, s1_01);
    _mm512_store_ps(acc1 + 32, s1_10);
    _mm512_store_ps(acc1 + 48, s1_11);
}

static void wgrad_2x3(const float *restrict xc, const float *restrict g0, const float *restrict g1,
                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)
{
    __m512 s0_00 = _mm512_load_ps(acc0 + 0);
    __m512 s0_01 = _mm512_load_ps(acc0 + 16);
    __m512 s0_02 = _mm512_load_ps(acc0 + 32);
    __m512 s0_10 = _mm512_load_ps(acc0 + 48);
    __m512 s0_11 = _mm512_load_ps(acc0 + 64);
    __m512 s0_12 = _mm512_load_ps(acc0 + 80);
    __m512 s1_00 = _mm512_load_ps(acc1 + 0);
    __m512 s1_01 = _mm512_load_ps(acc1 + 16);
    __m512 s1_02 = _mm512_load_ps(acc1 + 32);
    __m512 s1_10 = _mm512_load_ps(acc1 + 48);
    __m512 s1_11 = _mm512_load_ps(acc1 + 64);
    __m512 s1_12 = _mm512_load_ps(acc1 + 80);
    int i = i0;
    for (; i + 2 <= i1; i += 2)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 0) * W + j0);
            const __m512 G01 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 1) * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 0) * W + j0);
            const __m512 G11 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 1) * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 2);
              s0_02 = _mm512_fmadd_ps(G00, X, s0_02);
              s1_02 = _mm512_fmadd_ps(G10, X, s1_02);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s0_00 = _mm512_fmadd_ps(G01, X, s0_00);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10);
              s1_00 = _mm512_fmadd_ps(G11, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G00, X, s0_11);
              s0_01 = _mm512_fmadd_ps(G01, X, s0_01);
              s1_11 = _mm512_fmadd_ps(G10, X, s1_11);
              s1_01 = _mm512_fmadd_ps(G11, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 2);
              s0_12 = _mm512_fmadd_ps(G00, X, s0_12);
              s0_02 = _mm512_fmadd_ps(G01, X, s0_02);
              s1_12 = _mm512_fmadd_ps(G10, X, s1_12);
              s1_02 = _mm512_fmadd_ps(G11, X, s1_02);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G01, X, s0_10);
              s1_10 = _mm512_fmadd_ps(G11, X, s1_10);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G01, X, s0_11);
              s1_11 = _mm512_fmadd_ps(G11, X, s1_11);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 2);
              s0_12 = _mm512_fmadd_ps(G01, X, s0_12);
              s1_12 = _mm512_fmadd_ps(G11, X, s1_12);
            }
        }
    if (i < i1)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 2);
              s0_02 = _mm512_fmadd_ps(G00, X, s0_02);
              s1_02 = _mm512_fmadd_ps(G10, X, s1_02); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G00, X, s0_11);
              s1_11 = _mm512_fmadd_ps(G10, X, s1_11); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 2);
              s0_12 = _mm512_fmadd_ps(G00, X, s0_12);
              s1_12 = _mm512_fmadd_ps(G10, X, s1_12); }
        }
    _mm512_store_ps(acc0 + 0, s0_00);
    _mm512_store_ps(acc0 + 16, s0_01);
    _mm512_store_ps(acc0 + 32, s0_02);
    _mm512_store_ps(acc0 + 48, s0_10);
    _mm512_store_ps(acc0 + 64, s0_11);
    _mm512_store_ps(acc0 + 80, s0_12);
    _mm512_store_ps(acc1 + 0, s1_00);
    _mm512_store_ps(acc1 + 16, s1_01);
    _mm512_store_ps(acc1 + 32, s1_02);
    _mm512_store_ps(acc1 + 48, s1_10);
    _mm512_store_ps(acc1 + 64, s1_11);
    _mm512_store_ps(acc1 + 80, s1_12);
}

static void wgrad_3x1(const float *restrict xc, const float *restrict g0, const float *restrict g1,
                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)
{
    __m512 s0_00 = _mm512_load_ps(acc0 + 0);
    __m512 s0_10 = _mm512_load_ps(acc0 + 16);
    __m512 s0_20 = _mm512_load_ps(acc0 + 32);
    __m512 s1_00 = _mm512_load_ps(acc1 + 0);
    __m512 s1_10 = _mm512_load_ps(acc1 + 16);
    __m512 s1_20 = _mm512_load_ps(acc1 + 32);
    int i = i0;
    for (; i + 2 <= i1; i += 2)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 0) * W + j0);
            const __m512 G01 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 1) * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 0) * W + j0);
            const __m512 G11 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 1) * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s0_00 = _mm512_fmadd_ps(G01, X, s0_00);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10);
              s1_00 = _mm512_fmadd_ps(G11, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 0);
              s0_20 = _mm512_fmadd_ps(G00, X, s0_20);
              s0_10 = _mm512_fmadd_ps(G01, X, s0_10);
              s1_20 = _mm512_fmadd_ps(G10, X, s1_20);
              s1_10 = _mm512_fmadd_ps(G11, X, s1_10);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 3) * Wp + j0 + 0);
              s0_20 = _mm512_fmadd_ps(G01, X, s0_20);
              s1_20 = _mm512_fmadd_ps(G11, X, s1_20);
            }
        }
    if (i < i1)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 0);
              s0_20 = _mm512_fmadd_ps(G00, X, s0_20);
              s1_20 = _mm512_fmadd_ps(G10, X, s1_20); }
        }
    _mm512_store_ps(acc0 + 0, s0_00);
    _mm512_store_ps(acc0 + 16, s0_10);
    _mm512_store_ps(acc0 + 32, s0_20);
    _mm512_store_ps(acc1 + 0, s1_00);
    _mm512_store_ps(acc1 + 16, s1_10);
    _mm512_store_ps(acc1 + 32, s1_20);
}

static void wgrad_3x2(const float *restrict xc, const float *restrict g0, const float *restrict g1,
                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)
{
    __m512 s0_00 = _mm512_load_ps(acc0 + 0);
    __m512 s0_01 = _mm512_load_ps(acc0 + 16);
    __m512 s0_10 = _mm512_load_ps(acc0 + 32);
    __m512 s0_11 = _mm512_load_ps(acc0 + 48);
    __m512 s0_20 = _mm512_load_ps(acc0 + 64);
    __m512 s0_21 = _mm512_load_ps(acc0 + 80);
    __m512 s1_00 = _mm512_load_ps(acc1 + 0);
    __m512 s1_01 = _mm512_load_ps(acc1 + 16);
    __m512 s1_10 = _mm512_load_ps(acc1 + 32);
    __m512 s1_11 = _mm512_load_ps(acc1 + 48);
    __m512 s1_20 = _mm512_load_ps(acc1 + 64);
    __m512 s1_21 = _mm512_load_ps(acc1 + 80);
    int i = i0;
    for (; i + 2 <= i1; i += 2)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 0) * W + j0);
            const __m512 G01 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 1) * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 0) * W + j0);
            const __m512 G11 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 1) * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s0_00 = _mm512_fmadd_ps(G01, X, s0_00);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10);
              s1_00 = _mm512_fmadd_ps(G11, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G00, X, s0_11);
              s0_01 = _mm512_fmadd_ps(G01, X, s0_01);
              s1_11 = _mm512_fmadd_ps(G10, X, s1_11);
              s1_01 = _mm512_fmadd_ps(G11, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 0);
              s0_20 = _mm512_fmadd_ps(G00, X, s0_20);
              s0_10 = _mm512_fmadd_ps(G01, X, s0_10);
              s1_20 = _mm512_fmadd_ps(G10, X, s1_20);
              s1_10 = _mm512_fmadd_ps(G11, X, s1_10);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 1);
              s0_21 = _mm512_fmadd_ps(G00, X, s0_21);
              s0_11 = _mm512_fmadd_ps(G01, X, s0_11);
              s1_21 = _mm512_fmadd_ps(G10, X, s1_21);
              s1_11 = _mm512_fmadd_ps(G11, X, s1_11);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 3) * Wp + j0 + 0);
              s0_20 = _mm512_fmadd_ps(G01, X, s0_20);
              s1_20 = _mm512_fmadd_ps(G11, X, s1_20);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 3) * Wp + j0 + 1);
              s0_21 = _mm512_fmadd_ps(G01, X, s0_21);
              s1_21 = _mm512_fmadd_ps(G11, X, s1_21);
            }
        }
    if (i < i1)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G00, X, s0_11);
              s1_11 = _mm512_fmadd_ps(G10, X, s1_11); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 0);
              s0_20 = _mm512_fmadd_ps(G00, X, s0_20);
              s1_20 = _mm512_fmadd_ps(G10, X, s1_20); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 1);
              s0_21 = _mm512_fmadd_ps(G00, X, s0_21);
              s1_21 = _mm512_fmadd_ps(G10, X, s1_21); }
        }
    _mm512_store_ps(acc0 + 0, s0_00);
    _mm512_store_ps(acc0 + 16, s0_01);
    _mm512_store_ps(acc0 + 32, s0_10);
    _mm512_store_ps(acc0 + 48, s0_11);
    _mm512_store_ps(acc0 + 64, s0_20);
    _mm512_store_ps(acc0 + 80, s0_21);
    _mm512_store_ps(acc1 + 0, s1_00);
    _mm512_store_ps(acc1 + 16, s1_01);
    _mm512_store_ps(acc1 + 32, s1_10);
    _mm512_store_ps(acc1 + 48, s1_11);
    _mm512_store_ps(acc1 + 64, s1_20);
    _mm512_store_ps(acc1 + 80, s1_21);
}

static void wgrad_3x3(const float *restrict xc, const float *restrict g0, const float *restrict g1,
                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)
{
    __m512 s0_00 = _mm512_load_ps(acc0 + 0);
    __m512 s0_01 = _mm512_load_ps(acc0 + 16);
    __m512 s0_02 = _mm512_load_ps(acc0 + 32);
    __m512 s0_10 = _mm512_load_ps(acc0 + 48);
    __m512 s0_11 = _mm512_load_ps(acc0 + 64);
    __m512 s0_12 = _mm512_load_ps(acc0 + 80);
    __m512 s0_20 = _mm512_load_ps(acc0 + 96);
    __m512 s0_21 = _mm512_load_ps(acc0 + 112);
    __m512 s0_22 = _mm512_load_ps(acc0 + 128);
    __m512 s1_00 = _mm512_load_ps(acc1 + 0);
    __m512 s1_01 = _mm512_load_ps(acc1 + 16);
    __m512 s1_02 = _mm512_load_ps(acc1 + 32);
    __m512 s1_10 = _mm512_load_ps(acc1 + 48);
    __m512 s1_11 = _mm512_load_ps(acc1 + 64);
    __m512 s1_12 = _mm512_load_ps(acc1 + 80);
    __m512 s1_20 = _mm512_load_ps(acc1 + 96);
    __m512 s1_21 = _mm512_load_ps(acc1 + 112);
    __m512 s1_22 = _mm512_load_ps(acc1 + 128);
    int i = i0;
    for (; i + 2 <= i1; i += 2)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 0) * W + j0);
            const __m512 G01 = _mm512_maskz_loadu_ps(m, g0 + (size_t)(i + 1) * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 0) * W + j0);
            const __m512 G11 = _mm512_maskz_loadu_ps(m, g1 + (size_t)(i + 1) * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 2);
              s0_02 = _mm512_fmadd_ps(G00, X, s0_02);
              s1_02 = _mm512_fmadd_ps(G10, X, s1_02);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s0_00 = _mm512_fmadd_ps(G01, X, s0_00);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10);
              s1_00 = _mm512_fmadd_ps(G11, X, s1_00);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G00, X, s0_11);
              s0_01 = _mm512_fmadd_ps(G01, X, s0_01);
              s1_11 = _mm512_fmadd_ps(G10, X, s1_11);
              s1_01 = _mm512_fmadd_ps(G11, X, s1_01);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 2);
              s0_12 = _mm512_fmadd_ps(G00, X, s0_12);
              s0_02 = _mm512_fmadd_ps(G01, X, s0_02);
              s1_12 = _mm512_fmadd_ps(G10, X, s1_12);
              s1_02 = _mm512_fmadd_ps(G11, X, s1_02);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 0);
              s0_20 = _mm512_fmadd_ps(G00, X, s0_20);
              s0_10 = _mm512_fmadd_ps(G01, X, s0_10);
              s1_20 = _mm512_fmadd_ps(G10, X, s1_20);
              s1_10 = _mm512_fmadd_ps(G11, X, s1_10);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 1);
              s0_21 = _mm512_fmadd_ps(G00, X, s0_21);
              s0_11 = _mm512_fmadd_ps(G01, X, s0_11);
              s1_21 = _mm512_fmadd_ps(G10, X, s1_21);
              s1_11 = _mm512_fmadd_ps(G11, X, s1_11);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 2);
              s0_22 = _mm512_fmadd_ps(G00, X, s0_22);
              s0_12 = _mm512_fmadd_ps(G01, X, s0_12);
              s1_22 = _mm512_fmadd_ps(G10, X, s1_22);
              s1_12 = _mm512_fmadd_ps(G11, X, s1_12);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 3) * Wp + j0 + 0);
              s0_20 = _mm512_fmadd_ps(G01, X, s0_20);
              s1_20 = _mm512_fmadd_ps(G11, X, s1_20);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 3) * Wp + j0 + 1);
              s0_21 = _mm512_fmadd_ps(G01, X, s0_21);
              s1_21 = _mm512_fmadd_ps(G11, X, s1_21);
            }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 3) * Wp + j0 + 2);
              s0_22 = _mm512_fmadd_ps(G01, X, s0_22);
              s1_22 = _mm512_fmadd_ps(G11, X, s1_22);
            }
        }
    if (i < i1)
        for (int j0 = 0; j0 < W; j0 += 16) {
            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);
            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);
            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 0);
              s0_00 = _mm512_fmadd_ps(G00, X, s0_00);
              s1_00 = _mm512_fmadd_ps(G10, X, s1_00); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 1);
              s0_01 = _mm512_fmadd_ps(G00, X, s0_01);
              s1_01 = _mm512_fmadd_ps(G10, X, s1_01); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 0) * Wp + j0 + 2);
              s0_02 = _mm512_fmadd_ps(G00, X, s0_02);
              s1_02 = _mm512_fmadd_ps(G10, X, s1_02); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 0);
              s0_10 = _mm512_fmadd_ps(G00, X, s0_10);
              s1_10 = _mm512_fmadd_ps(G10, X, s1_10); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 1);
              s0_11 = _mm512_fmadd_ps(G00, X, s0_11);
              s1_11 = _mm512_fmadd_ps(G10, X, s1_11); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 1) * Wp + j0 + 2);
              s0_12 = _mm512_fmadd_ps(G00, X, s0_12);
              s1_12 = _mm512_fmadd_ps(G10, X, s1_12); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 0);
              s0_20 = _mm512_fmadd_ps(G00, X, s0_20);
              s1_20 = _mm512_fmadd_ps(G10, X, s1_20); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 1);
              s0_21 = _mm512_fmadd_ps(G00, X, s0_21);
              s1_21 = _mm512_fmadd_ps(G10, X, s1_21); }
            { const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + 2) * Wp + j0 + 2);
              s0_22 = _mm512_fmadd_ps(G00, X, s0_22);
              s1_22 = _mm512_fmadd_ps(G10, X, s1_22); }
        }
    _mm512_store_ps(acc0 + 0, s0_00);
    _mm512_store_ps(acc0 + 16, s0_01);
    _mm512_store_ps(acc0 + 32, s0_02);
    _mm512_store_ps(acc0 + 48, s0_10);
    _mm512_store_ps(acc0 + 64, s0_11);
    _mm512_store_ps(acc0 + 80, s0_12);
    _mm512_store_ps(acc0 + 96, s0_20);
    _mm512_store_ps(acc0 + 112, s0_21);
    _mm512_store_ps(acc0 + 128, s0_22);
    _mm512_store_ps(acc1 + 0, s1_00);
    _mm512_store_ps(acc1 + 16, s1_01);
    _mm512_store_ps(acc1 + 32, s1_02);
    _mm512_store_ps(acc1 + 48, s1_10);
    _mm512_store_ps(acc1 + 64, s1_11);
    _mm512_store_ps(acc1 + 80, s1_12);
    _mm512_store_ps(acc1 + 96, s1_20);
    _mm512_store_ps(acc1 + 112, s1_21);
    _mm512_store_ps(acc1 + 128, s1_22);
}

/* Rows are processed in blocks sized so that one block of x and g for
 * every channel stays in L2 while all (c, o-pair) combinations sweep it. */
int scunet_wgrad_f32(const float *xp, const float *g, float *gw,
                     int N, int C, int O, int Hp, int Wp, int H, int W, int KH, int KW)
{
    void (*f)(const float *, const float *, const float *, float *, float *, int, int, int, int) = 0;
    if (KH == 1 && KW == 1) f = wgrad_1x1;
    if (KH == 1 && KW == 2) f = wgrad_1x2;
    if (KH == 1 && KW == 3) f = wgrad_1x3;
    if (KH == 2 && KW == 1) f = wgrad_2x1;
    if (KH == 2 && KW == 2) f = wgrad_2x2;
    if (KH == 2 && KW == 3) f = wgrad_2x3;
    if (KH == 3 && KW == 1) f = wgrad_3x1;
    if (KH == 3 && KW == 2) f = wgrad_3x2;
    if (KH == 3 && KW == 3) f = wgrad_3x3;
    if (!f || O < 2) return 0;
    const int T = KH * KW;
    const size_t na = ((size_t)O * C + 1) * T * 16;
    float *acc = aligned_alloc(64, na * sizeof(float));
    if (!acc) return 0;
    memset(acc, 0, na * sizeof(float));
    float *spare = acc + (size_t)O * C * T * 16;  /* sink for the repeated channel of an odd O */
    const size_t row_bytes = ((size_t)C * Wp + (size_t)O * W) * sizeof(float);
    int R = (int)((512u * 1024u) / (row_bytes ? row_bytes : 1));
    R = R < 2 ? 2 : R & ~1;
    const size_t hw = (size_t)H * W;
    for (int n = 0; n < N; n++)
        for (int i0 = 0; i0 < H; i0 += R) {
            const int i1 = i0 + R < H ? i0 + R : H;
            for (int c = 0; c < C; c++) {
                const float *xc = xp + ((size_t)n * C + c) * Hp * Wp;
                for (int o = 0; o < O; o += 2) {
                    const int o0 = o + 2 > O ? O - 2 : o;
                    const float *g0 = g + ((size_t)n * O + o0) * hw;
                    float *a0 = o0 == o ? acc + ((size_t)o0 * C + c) * T * 16 : spare;
                    f(xc, g0, g0 + hw, a0, acc + ((size_t)(o0 + 1) * C + c) * T * 16, Wp, W, i0, i1);
                }
            }
        }
    for (size_t k = 0; k < (size_t)O * C * T; k++)
        gw[k] = _mm512_reduce_add_ps(_mm512_load_ps(acc + k * 16));
    free(acc);
    return 1;
}

#else
void scunet_corr_f32(const float *xp, const float *w, float *out, int N, int C, int O, int Hp, int Wp, int KH, int KW) {}
int scunet_wgrad_f32(const float *xp, const float *g, float *gw, int N, int C, int O, int Hp, int Wp, int H, int W, int KH, int KW) { return 0; }
#endif

static struct PyModuleDef module = {PyModuleDef_HEAD_INIT, "_simd", "Native float32 correlation kernels (loaded via ctypes).", -1, NULL};

PyMODINIT_FUNC PyInit__simd(void) { return PyModule_Create(&module); }
