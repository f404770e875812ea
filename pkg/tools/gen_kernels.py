"""Generate src/scunet/_corr_kernels.py (numba) and src/scunet/_simd.c (AVX-512).

Each small kernel size gets its own numba function with the taps unrolled and
the weights hoisted into scalars, so the inner loop over the width axis
vectorizes. The C file holds float32 kernels with explicit register tiles;
it is an optional extension and the numba kernels remain the fallback.
Run from the repository root:

    python tools/gen_kernels.py
"""
from pathlib import Path

SIZES = [(kh, kw) for kh in (1, 2, 3) for kw in (1, 2, 3)]

HEADER = '''"""Unrolled stride-1 correlation kernels. GENERATED by tools/gen_kernels.py; do not edit.

corr_KHxKW(xp, w, out):       out[n, o, i, j] = sum_{c, ki, kj} w[o, c, ki, kj] * xp[n, c, i + ki, j + kj]
wgrad_KHxKW(xp, g, gw):       gw[o, c, ki, kj] = sum_{n, i, j} g[n, o, i, j] * xp[n, c, i + ki, j + kj]

All arrays must be C-contiguous and share a dtype; `out` and `gw` are overwritten.
"""
import numpy as np
from numba import njit

'''


def taps(kh, kw):
    return [(a, b) for a in range(kh) for b in range(kw)]


def _corr_block(t, kh, nb, indent):
    """Lines computing `nb` consecutive output channels starting at o."""
    pad = " " * indent
    acc = [f"a{b}" for b in range(nb)]
    lines = [pad + "for i in range(H):"]
    lines += [pad + f"    {a}[:] = 0" for a in acc]
    lines.append(pad + "    for c in range(C):")
    for b in range(nb):
        for a_, b_ in t:
            lines.append(pad + f"        w{b}_{a_}{b_} = w[o + {b}, c, {a_}, {b_}]")
    for a_ in range(kh):
        lines.append(pad + f"        r{a_} = xp[n, c, i + {a_}]")
    lines.append(pad + "        for j in range(W):")
    for a_, b_ in t:
        lines.append(pad + f"            x{a_}{b_} = r{a_}[j + {b_}]")
    for b in range(nb):
        lines.append(pad + f"            a{b}[j] += " + " + ".join(f"w{b}_{a_}{b_} * x{a_}{b_}" for a_, b_ in t))
    for b in range(nb):
        lines.append(pad + f"    out[n, o + {b}, i] = a{b}")
    return lines


def gen_corr(kh, kw, block=4):
    t = taps(kh, kw)
    name = f"corr_{kh}x{kw}"
    lines = [
        "@njit(fastmath=True, cache=True, nogil=True)",
        f"def {name}(xp, w, out):",
        "    N = xp.shape[0]",
        "    C = xp.shape[1]",
        "    O = w.shape[0]",
        "    H = out.shape[2]",
        "    W = out.shape[3]",
    ]
    lines += [f"    a{b} = np.empty(W, out.dtype)" for b in range(block)]
    lines += [
        "    for n in range(N):",
        "        o = 0",
        f"        while o + {block} <= O:",
    ]
    lines += _corr_block(t, kh, block, 12)
    lines.append(f"            o += {block}")
    lines.append("        while o < O:")
    lines += _corr_block(t, kh, 1, 12)
    lines.append("            o += 1")
    return "\n".join(lines) + "\n"


def _wgrad_block(t, kh, nb, indent):
    pad = " " * indent
    lines = []
    for b in range(nb):
        for a_, b_ in t:
            lines.append(pad + f"s{b}_{a_}{b_} = zero")
    lines += [pad + "for n in range(N):", pad + "    for i in range(H):"]
    for b in range(nb):
        lines.append(pad + f"        g{b} = g[n, o + {b}, i]")
    for a_ in range(kh):
        lines.append(pad + f"        r{a_} = xp[n, c, i + {a_}]")
    lines.append(pad + "        for j in range(W):")
    for a_, b_ in t:
        lines.append(pad + f"            x{a_}{b_} = r{a_}[j + {b_}]")
    for b in range(nb):
        lines.append(pad + f"            gv{b} = g{b}[j]")
        for a_, b_ in t:
            lines.append(pad + f"            s{b}_{a_}{b_} += gv{b} * x{a_}{b_}")
    for b in range(nb):
        for a_, b_ in t:
            lines.append(pad + f"gw[o + {b}, c, {a_}, {b_}] = s{b}_{a_}{b_}")
    return lines


def gen_wgrad(kh, kw, block=2):
    t = taps(kh, kw)
    name = f"wgrad_{kh}x{kw}"
    lines = [
        "@njit(fastmath=True, cache=True, nogil=True)",
        f"def {name}(xp, g, gw):",
        "    N = xp.shape[0]",
        "    C = xp.shape[1]",
        "    O = g.shape[1]",
        "    H = g.shape[2]",
        "    W = g.shape[3]",
        "    zero = gw.dtype.type(0)",
        "    for c in range(C):",
        "        o = 0",
        f"        while o + {block} <= O:",
    ]
    lines += _wgrad_block(t, kh, block, 12)
    lines.append(f"            o += {block}")
    lines.append("        while o < O:")
    lines += _wgrad_block(t, kh, 1, 12)
    lines.append("            o += 1")
    return "\n".join(lines) + "\n"


C_HEADER = r"""/* Float32 AVX-512 correlation kernels. GENERATED by tools/gen_kernels.py; do not edit.
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
"""

C_FOOTER = r"""
#else
void scunet_corr_f32(const float *xp, const float *w, float *out, int N, int C, int O, int Hp, int Wp, int KH, int KW) {}
int scunet_wgrad_f32(const float *xp, const float *g, float *gw, int N, int C, int O, int Hp, int Wp, int H, int W, int KH, int KW) { return 0; }
#endif

static struct PyModuleDef module = {PyModuleDef_HEAD_INIT, "_simd", "Native float32 correlation kernels (loaded via ctypes).", -1, NULL};

PyMODINIT_FUNC PyInit__simd(void) { return PyModule_Create(&module); }
"""

CORR_ROWS = 4
CORR_OUT = 4


def gen_c_corr():
    rows, outs = range(CORR_ROWS), range(CORR_OUT)
    lines = [
        "static void corr_tile(const float *restrict xp, const float *restrict w, float *restrict out,",
        "                      int C, int Hp, int Wp, int H, int W, int KH, int KW, int o0, int i, int j0)",
        "{",
    ]
    lines += [f"    __m512 a{r}{q} = _mm512_setzero_ps();" for r in rows for q in outs]
    lines += [
        "    const size_t ws = (size_t)C * KH * KW;",
        "    for (int c = 0; c < C; c++) {",
        "        const float *xc = xp + ((size_t)c * Hp + i) * Wp + j0;",
        "        const float *wc = w + (size_t)o0 * ws + (size_t)c * KH * KW;",
        "        for (int a = 0; a < KH; a++)",
        "            for (int b = 0; b < KW; b++) {",
        "                const int t = a * KW + b;",
        "                const float *xr = xc + (size_t)a * Wp + b;",
    ]
    lines += [f"                const __m512 w{q} = _mm512_set1_ps(wc[{q} * ws + t]);" for q in outs]
    for r in rows:
        lines.append(f"                const __m512 x{r} = _mm512_loadu_ps(xr + {r} * (size_t)Wp);")
        lines += [f"                a{r}{q} = _mm512_fmadd_ps(w{q}, x{r}, a{r}{q});" for q in outs]
    lines += ["            }", "    }", "    const size_t os = (size_t)H * W;"]
    for r in rows:
        lines.append(f"    float *p{r} = out + ((size_t)o0 * H + i + {r}) * W + j0;")
        lines += [f"    _mm512_storeu_ps(p{r} + {q} * os, a{r}{q});" for q in outs]
    lines.append("}")
    lines += [
        "",
        "void scunet_corr_f32(const float *xp, const float *w, float *out,",
        "                     int N, int C, int O, int Hp, int Wp, int KH, int KW)",
        "{",
        "    const int H = Hp - KH + 1, W = Wp - KW + 1;",
        "    for (int n = 0; n < N; n++) {",
        "        const float *xn = xp + (size_t)n * C * Hp * Wp;",
        "        float *on = out + (size_t)n * O * H * W;",
        # one row block of x stays cache resident while every o-tile sweeps it
        f"        for (int r = 0; r < H; r += {CORR_ROWS}) {{",
        f"            const int i = r + {CORR_ROWS} > H ? H - {CORR_ROWS} : r;",
        f"            for (int o = 0; o < O; o += {CORR_OUT}) {{",
        f"                const int o0 = o + {CORR_OUT} > O ? O - {CORR_OUT} : o;",
        "                for (int j = 0; j < W; j += 16)",
        "                    corr_tile(xn, w, on, C, Hp, Wp, H, W, KH, KW, o0, i, j + 16 > W ? W - 16 : j);",
        "            }",
        "        }",
        "    }",
        "}",
    ]
    return "\n".join(lines) + "\n"


def gen_c_wgrad(kh, kw):
    """Two output channels x every tap in registers; two g rows share each x load.

    Handles rows [i0, i1) of one sample and adds into vector accumulators
    kept in memory, so the caller can block over rows.
    """
    t = taps(kh, kw)
    acc = [f"s{q}_{a}{b}" for q in (0, 1) for a, b in t]
    lines = [
        f"static void wgrad_{kh}x{kw}(const float *restrict xc, const float *restrict g0, const float *restrict g1,",
        "                       float *restrict acc0, float *restrict acc1, int Wp, int W, int i0, int i1)",
        "{",
    ]
    for q in (0, 1):
        lines += [f"    __m512 s{q}_{a}{b} = _mm512_load_ps(acc{q} + {16 * k});" for k, (a, b) in enumerate(t)]
    lines += [
        "    int i = i0;",
        "    for (; i + 2 <= i1; i += 2)",
        "        for (int j0 = 0; j0 < W; j0 += 16) {",
        "            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);",
    ]
    for q in (0, 1):
        for r in (0, 1):
            lines.append(f"            const __m512 G{q}{r} = _mm512_maskz_loadu_ps(m, g{q} + (size_t)(i + {r}) * W + j0);")
    for rr in range(kh + 1):
        for b in range(kw):
            lines.append(f"            {{ const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + {rr}) * Wp + j0 + {b});")
            for q in (0, 1):
                if rr < kh:
                    lines.append(f"              s{q}_{rr}{b} = _mm512_fmadd_ps(G{q}0, X, s{q}_{rr}{b});")
                if rr >= 1:
                    lines.append(f"              s{q}_{rr - 1}{b} = _mm512_fmadd_ps(G{q}1, X, s{q}_{rr - 1}{b});")
            lines.append("            }")
    lines += [
        "        }",
        "    if (i < i1)",
        "        for (int j0 = 0; j0 < W; j0 += 16) {",
        "            const __mmask16 m = W - j0 >= 16 ? (__mmask16)0xFFFF : (__mmask16)((1u << (W - j0)) - 1);",
        "            const __m512 G00 = _mm512_maskz_loadu_ps(m, g0 + (size_t)i * W + j0);",
        "            const __m512 G10 = _mm512_maskz_loadu_ps(m, g1 + (size_t)i * W + j0);",
    ]
    for a, b in t:
        lines.append(f"            {{ const __m512 X = _mm512_maskz_loadu_ps(m, xc + (size_t)(i + {a}) * Wp + j0 + {b});")
        lines.append(f"              s0_{a}{b} = _mm512_fmadd_ps(G00, X, s0_{a}{b});")
        lines.append(f"              s1_{a}{b} = _mm512_fmadd_ps(G10, X, s1_{a}{b}); }}")
    lines.append("        }")
    for q in (0, 1):
        lines += [f"    _mm512_store_ps(acc{q} + {16 * k}, s{q}_{a}{b});" for k, (a, b) in enumerate(t)]
    lines.append("}")
    return "\n".join(lines) + "\n"


def gen_c_wgrad_dispatch():
    lines = [
        "/* Rows are processed in blocks sized so that one block of x and g for",
        " * every channel stays in L2 while all (c, o-pair) combinations sweep it. */",
        "int scunet_wgrad_f32(const float *xp, const float *g, float *gw,",
        "                     int N, int C, int O, int Hp, int Wp, int H, int W, int KH, int KW)",
        "{",
        "    void (*f)(const float *, const float *, const float *, float *, float *, int, int, int, int) = 0;",
    ]
    for kh, kw in SIZES:
        lines.append(f"    if (KH == {kh} && KW == {kw}) f = wgrad_{kh}x{kw};")
    lines += [
        "    if (!f || O < 2) return 0;",
        "    const int T = KH * KW;",
        "    const size_t na = ((size_t)O * C + 1) * T * 16;",
        "    float *acc = aligned_alloc(64, na * sizeof(float));",
        "    if (!acc) return 0;",
        "    memset(acc, 0, na * sizeof(float));",
        "    float *spare = acc + (size_t)O * C * T * 16;  /* sink for the repeated channel of an odd O */",
        "    const size_t row_bytes = ((size_t)C * Wp + (size_t)O * W) * sizeof(float);",
        "    int R = (int)((512u * 1024u) / (row_bytes ? row_bytes : 1));",
        "    R = R < 2 ? 2 : R & ~1;",
        "    const size_t hw = (size_t)H * W;",
        "    for (int n = 0; n < N; n++)",
        "        for (int i0 = 0; i0 < H; i0 += R) {",
        "            const int i1 = i0 + R < H ? i0 + R : H;",
        "            for (int c = 0; c < C; c++) {",
        "                const float *xc = xp + ((size_t)n * C + c) * Hp * Wp;",
        "                for (int o = 0; o < O; o += 2) {",
        "                    const int o0 = o + 2 > O ? O - 2 : o;",
        "                    const float *g0 = g + ((size_t)n * O + o0) * hw;",
        "                    float *a0 = o0 == o ? acc + ((size_t)o0 * C + c) * T * 16 : spare;",
        "                    f(xc, g0, g0 + hw, a0, acc + ((size_t)(o0 + 1) * C + c) * T * 16, Wp, W, i0, i1);",
        "                }",
        "            }",
        "        }",
        "    for (size_t k = 0; k < (size_t)O * C * T; k++)",
        "        gw[k] = _mm512_reduce_add_ps(_mm512_load_ps(acc + k * 16));",
        "    free(acc);",
        "    return 1;",
        "}",
    ]
    return "\n".join(lines) + "\n"


def gen_c():
    parts = [C_HEADER, gen_c_corr()]
    parts += ["\n" + gen_c_wgrad(kh, kw) for kh, kw in SIZES]
    parts += ["\n" + gen_c_wgrad_dispatch(), C_FOOTER]
    return "".join(parts)


def main():
    root = Path(__file__).resolve().parents[1] / "src" / "scunet"
    (root / "_simd.c").write_text(gen_c())
    print(f"wrote {root / '_simd.c'}")
    parts = [HEADER]
    for kh, kw in SIZES:
        parts.append("\n" + gen_corr(kh, kw) + "\n\n" + gen_wgrad(kh, kw))
    table = ",\n".join(f"    ({kh}, {kw}): (corr_{kh}x{kw}, wgrad_{kh}x{kw})" for kh, kw in SIZES)
    parts.append(f"\n\nKERNELS = {{\n{table},\n}}\n")
    out = root / "_corr_kernels.py"
    out.write_text("".join(parts))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
