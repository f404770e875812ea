import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scunet import _conv
from scunet._corr_kernels import KERNELS
from scunet.errors import DimensionError, SpecError, UsageError
from scunet.functional import (
    BatchNormState,
    ConvSpec,
    batchnorm2d,
    batchnorm_relu,
    concat_channels,
    conv2d,
    conv_transpose2d,
    dropout,
    l1_loss,
    maxpool2d,
    relu,
    weighted_l1,
)
from scunet.gradcheck import grad_check
from scunet.tensor import Tensor


def conv_oracle(x, w, stride, pad):
    n, c, h, wd = x.shape
    o, _, kh, kw = w.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pad[0], pad[0]), (pad[1], pad[1])))
    ho = (h + 2 * pad[0] - kh) // stride[0] + 1
    wo = (wd + 2 * pad[1] - kw) // stride[1] + 1
    out = np.zeros((n, o, ho, wo))
    for i in range(ho):
        for j in range(wo):
            patch = xp[:, :, i * stride[0]:i * stride[0] + kh, j * stride[1]:j * stride[1] + kw]
            out[:, :, i, j] = np.einsum("ncab,ocab->no", patch, w)
    return out


def conv_t_oracle(x, w, stride, pad, opad):
    n, ci, h, wd = x.shape
    _, co, kh, kw = w.shape
    full = np.zeros((n, co, (h - 1) * stride[0] + kh + opad[0], (wd - 1) * stride[1] + kw + opad[1]))
    for i in range(h):
        for j in range(wd):
            full[:, :, i * stride[0]:i * stride[0] + kh, j * stride[1]:j * stride[1] + kw] += np.einsum(
                "nc,cdab->ndab", x[:, :, i, j], w
            )
    ho = (h - 1) * stride[0] - 2 * pad[0] + kh + opad[0]
    wo = (wd - 1) * stride[1] - 2 * pad[1] + kw + opad[1]
    return full[:, :, pad[0]:pad[0] + ho, pad[1]:pad[1] + wo]


CONV_CASES = [((3, 3), (1, 1), (1, 1)), ((5, 5), (2, 2), (2, 2)), ((1, 1), (1, 1), (0, 0)), ((2, 3), (1, 2), (0, 1))]


@pytest.mark.parametrize("kernel,stride,pad", CONV_CASES)
def test_conv2d_matches_loop_oracle(rng, kernel, stride, pad):
    x = rng.standard_normal((2, 3, 9, 11))
    w = rng.standard_normal((4, 3) + kernel)
    out = conv2d(Tensor(x), Tensor(w), spec=ConvSpec(kernel, stride, pad)).data
    np.testing.assert_allclose(out, conv_oracle(x, w, stride, pad), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize(
    "kernel,stride,pad,opad",
    [((3, 3), (1, 1), (1, 1), (0, 0)), ((5, 5), (2, 2), (2, 2), (1, 1)), ((4, 4), (2, 2), (0, 0), (0, 0)),
     ((3, 3), (1, 1), (3, 3), (0, 0)), ((3, 2), (3, 2), (1, 0), (2, 1))],
)
def test_conv_transpose2d_matches_loop_oracle(rng, kernel, stride, pad, opad):
    x = rng.standard_normal((2, 3, 5, 6))
    w = rng.standard_normal((3, 2) + kernel)
    out = conv_transpose2d(Tensor(x), Tensor(w), spec=ConvSpec(kernel, stride, pad, opad)).data
    np.testing.assert_allclose(out, conv_t_oracle(x, w, stride, pad, opad), rtol=1e-12, atol=1e-12)


def test_upsampling_spec_doubles_extent(rng):
    x = rng.standard_normal((1, 4, 16, 22))
    w = rng.standard_normal((4, 2, 5, 5))
    out = conv_transpose2d(Tensor(x), Tensor(w), spec=ConvSpec(5, 2, 2, 1))
    assert out.shape == (1, 2, 32, 44)


def test_conv2d_same_padding_shape():
    out = conv2d(Tensor(np.zeros((8, 1, 64, 64))), Tensor(np.zeros((16, 1, 3, 3))), spec=ConvSpec(3, 1, 1))
    assert out.shape == (8, 16, 64, 64)


def test_conv_errors():
    with pytest.raises(DimensionError, match="axis 1"):
        conv2d(Tensor(np.zeros((1, 2, 4, 4))), Tensor(np.zeros((3, 5, 3, 3))))
    with pytest.raises(SpecError):
        conv2d(Tensor(np.zeros((1, 1, 4, 4))), Tensor(np.zeros((1, 1, 2, 2))), spec=ConvSpec(2, 3, 0))
    with pytest.raises(SpecError):
        ConvSpec(3, 2, 1, 2)
    with pytest.raises(SpecError, match="axis 2"):
        conv2d(Tensor(np.zeros((1, 1, 7, 8))), Tensor(np.zeros((1, 1, 5, 5))), spec=ConvSpec(5, 2, 2, 1))


def test_output_padding_conv2d_is_exact_adjoint_of_upsampling(rng):
    spec = ConvSpec(5, 2, 2, 1)
    x = rng.standard_normal((2, 3, 12, 16))
    w = rng.standard_normal((4, 3, 5, 5))
    y = rng.standard_normal((2, 4, 6, 8))
    down = conv2d(Tensor(x), Tensor(w), spec=spec).data
    assert down.shape == (2, 4, 6, 8)
    # the same (4, 3, 5, 5) array read as (in, out, kh, kw) gives the adjoint map
    up = conv_transpose2d(Tensor(y), Tensor(w), spec=spec).data
    assert abs(np.vdot(down, y) - np.vdot(x, up)) < 1e-10 * abs(np.vdot(down, y))
    np.testing.assert_allclose(down, conv_oracle(x, w, (2, 2), (2, 2)), atol=1e-12)
    rep = grad_check(lambda t: (conv2d(t, Tensor(w), spec=spec) * Tensor(y[:1, :, :3, :4])).sum(), x[:1, :, :6, :8])
    assert rep.passed, rep.max_rel_error


@settings(max_examples=25, deadline=None)
@given(
    st.integers(1, 3), st.integers(1, 3), st.integers(1, 3),
    st.integers(1, 2), st.integers(1, 2), st.integers(0, 2), st.integers(0, 10**6),
)
def test_conv_pair_is_adjoint(kh, kw, c, sh, sw, p, seed):
    r = np.random.default_rng(seed)
    p = min(p, kh - 1, kw - 1)
    spec = ConvSpec((kh, kw), (sh, sw), (p, p))
    h, w = 3 * sh + kh, 2 * sw + kw + 3
    if (h + 2 * p - kh) % sh or (w + 2 * p - kw) % sw:
        h, w = h - (h + 2 * p - kh) % sh, w - (w + 2 * p - kw) % sw
    x = r.standard_normal((2, c, h, w))
    wt = r.standard_normal((3, c, kh, kw))
    y_shape = conv2d(Tensor(x), Tensor(wt), spec=spec).shape
    y = r.standard_normal(y_shape)
    lhs = np.vdot(conv2d(Tensor(x), Tensor(wt), spec=spec).data, y)
    xt = conv_transpose2d(Tensor(y), Tensor(wt), spec=spec).data
    rhs = np.vdot(x, xt[:, :, :h, :w])
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


@pytest.mark.parametrize("kh,kw", sorted(KERNELS))
def test_generated_kernels_match_einsum(rng, kh, kw):
    xp = rng.standard_normal((2, 3, 9 + kh, 20 + kw))
    w = rng.standard_normal((5, 3, kh, kw))
    ref = np.einsum(
        "nchwab,ocab->nohw", np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3)), w
    )
    np.testing.assert_allclose(_conv.corr(xp, w), ref, rtol=1e-12, atol=1e-12)
    g = rng.standard_normal(ref.shape)
    gref = np.einsum("nchwab,nohw->ocab", np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3)), g)
    np.testing.assert_allclose(_conv.corr_wgrad(xp, g, kh, kw), gref, rtol=1e-11, atol=1e-11)


@pytest.mark.skipif(not _conv.SIMD_AVAILABLE, reason="native float32 kernels not built")
@pytest.mark.parametrize("shape", [(2, 3, 4, 7, 19, 3, 3), (1, 5, 7, 9, 33, 3, 2), (3, 1, 4, 5, 17, 2, 1),
                                   (2, 4, 5, 6, 100, 1, 3), (1, 16, 5, 300, 180, 3, 3)])
def test_native_float32_kernels_agree_with_numba(rng, shape):
    n, c, o, h, w, kh, kw = shape
    xp = rng.standard_normal((n, c, h + kh - 1, w + kw - 1)).astype(np.float32)
    wt = rng.standard_normal((o, c, kh, kw)).astype(np.float32)
    g = rng.standard_normal((n, o, h, w)).astype(np.float32)
    ref = np.empty((n, o, h, w), np.float32)
    KERNELS[(kh, kw)][0](xp, wt, ref)
    np.testing.assert_array_equal(_conv.corr(xp, wt), ref)
    gref = np.empty((o, c, kh, kw), np.float32)
    KERNELS[(kh, kw)][1](xp, g, gref)
    np.testing.assert_allclose(_conv.corr_wgrad(xp, g, kh, kw), gref, rtol=1e-4, atol=1e-4 * np.abs(gref).max())


@pytest.mark.parametrize("kernel,pad", [((3, 3), (1, 1)), ((3, 2), (0, 1)), ((2, 2), (1, 1)), ((3, 3), (2, 0))])
def test_corr_input_grad_matches_scatter_oracle(rng, kernel, pad):
    # the last two cases pad by more than half the kernel and take the scatter branch
    kh, kw = kernel
    x = rng.standard_normal((2, 3, 6, 7))
    w = rng.standard_normal((4, 3, kh, kw))
    g = rng.standard_normal(_conv.corr(_conv._pad_hw(x, *pad), w).shape)
    full = np.zeros((2, 3, 6 + 2 * pad[0], 7 + 2 * pad[1]))
    for a in range(kh):
        for b in range(kw):
            full[:, :, a:a + g.shape[2], b:b + g.shape[3]] += np.einsum("nohw,oc->nchw", g, w[:, :, a, b])
    want = full[:, :, pad[0]:pad[0] + 6, pad[1]:pad[1] + 7]
    np.testing.assert_allclose(_conv.corr_input_grad(g, w, pad[0], pad[1], 6, 7), want, atol=1e-12)


def test_maxpool_first_index_tie_break():
    x = Tensor(np.ones((1, 1, 2, 4)), requires_grad=True)
    out = maxpool2d(x, 2)
    out.sum().backward()
    np.testing.assert_array_equal(out.data, [[[[1.0, 1.0]]]])
    np.testing.assert_array_equal(x.grad[0, 0], [[1, 0, 1, 0], [0, 0, 0, 0]])


def test_maxpool_general_window_matches_reshape_max(rng):
    x = rng.standard_normal((2, 3, 6, 9))
    out = maxpool2d(Tensor(x), 3).data
    np.testing.assert_array_equal(out, x.reshape(2, 3, 2, 3, 3, 3).max(axis=(3, 5)))
    with pytest.raises(SpecError):
        maxpool2d(Tensor(np.zeros((1, 1, 5, 4))), 2)


def test_maxpool_then_duplication_is_identity_on_coarse_grid(rng):
    x = rng.standard_normal((1, 2, 4, 6))
    pooled = maxpool2d(Tensor(x), 2).data
    up = pooled.repeat(2, axis=2).repeat(2, axis=3)
    np.testing.assert_array_equal(maxpool2d(Tensor(up), 2).data, pooled)


def test_batchnorm_train_normalizes_and_updates_running_stats(rng):
    x = rng.normal(3.0, 2.0, (4, 3, 5, 6))
    st_ = BatchNormState.create(3, np.float64)
    out = batchnorm2d(Tensor(x), st_, "train").data
    np.testing.assert_allclose(out.mean(axis=(0, 2, 3)), 0, atol=1e-5)
    np.testing.assert_allclose(out.var(axis=(0, 2, 3)), 1, atol=1e-5)
    np.testing.assert_allclose(st_.running_mean, 0.1 * x.mean(axis=(0, 2, 3)))
    np.testing.assert_allclose(st_.running_var, 0.9 + 0.1 * x.var(axis=(0, 2, 3), ddof=1))


def test_fused_batchnorm_relu_matches_composition(rng):
    x = rng.standard_normal((3, 4, 6, 8))
    g = rng.standard_normal(x.shape)
    for mode in ("train", "eval"):
        a, b = BatchNormState.create(4, np.float64), BatchNormState.create(4, np.float64)
        for s in (a, b):
            s.gamma.data[:] = [0.5, 1.5, -1.0, 2.0]
            s.beta.data[:] = [0.1, -0.2, 0.3, 0.0]
        xa, xb = Tensor(x, requires_grad=True), Tensor(x, requires_grad=True)
        ya = relu(batchnorm2d(xa, a, mode))
        yb = batchnorm_relu(xb, b, mode)
        np.testing.assert_allclose(yb.data, ya.data, atol=1e-12)
        (ya * Tensor(g)).sum().backward()
        (yb * Tensor(g)).sum().backward()
        np.testing.assert_allclose(xb.grad, xa.grad, atol=1e-10)
        np.testing.assert_allclose(b.gamma.grad, a.gamma.grad, atol=1e-10)
        np.testing.assert_allclose(b.running_var, a.running_var, rtol=1e-12)


def test_batchnorm_train_mean_gradient_matches_finite_differences(rng):
    st_ = BatchNormState.create(2, np.float64)
    st_.gamma.data[:] = [1.3, 0.7]
    w = rng.standard_normal((2, 2, 3, 3))
    rep = grad_check(lambda t: (batchnorm2d(t, st_, "train") * Tensor(w)).mean(), rng.standard_normal((2, 2, 3, 3)))
    assert rep.passed, rep.max_rel_error


def test_relu_dropout_concat():
    np.testing.assert_array_equal(relu(Tensor(np.array([-1.0, 0.0, 2.0]))).data, [0, 0, 2])
    x = Tensor(np.ones((1000, 10)))
    y = dropout(x, 0.4, "train", np.random.default_rng(0)).data
    assert set(np.unique(y)) <= {0.0, 1.0 / 0.6}
    assert abs((y == 0).mean() - 0.4) < 0.02
    assert dropout(x, 0.4, "eval") is x
    with pytest.raises(UsageError):
        dropout(x, 0.4, "train", None)
    with pytest.raises(UsageError):
        dropout(x, 1.0, "train", np.random.default_rng(0))
    a, b = Tensor(np.zeros((1, 2, 3, 3))), Tensor(np.ones((1, 1, 3, 3)))
    assert concat_channels(a, b).shape == (1, 3, 3, 3)
    with pytest.raises(DimensionError):
        concat_channels(a, Tensor(np.ones((1, 1, 3, 4))))


@pytest.mark.parametrize("p", [0.1, 0.25, 0.5])
def test_dropout_keep_rate_and_seed_determinism(p):
    x = Tensor(np.ones((200, 500), dtype=np.float32), requires_grad=True)
    y = dropout(x, p, "train", np.random.default_rng(7))
    assert y.data.dtype == np.float32
    # 1e5 Bernoulli draws: five standard deviations is below 0.008
    assert abs((y.data == 0).mean() - p) < 0.008
    np.testing.assert_array_equal(y.data, dropout(x, p, "train", np.random.default_rng(7)).data)
    assert not np.array_equal(y.data, dropout(x, p, "train", np.random.default_rng(8)).data)
    y.sum().backward()
    np.testing.assert_array_equal(x.grad, y.data)


def test_l1_loss_value_and_subgradient():
    p = Tensor(np.array([1.0, 2.0, 3.0, 4.0]), requires_grad=True)
    loss = l1_loss(p, np.array([0.0, 2.0, 5.0, 4.5]))
    assert loss.data == pytest.approx((1 + 0 + 2 + 0.5) / 4)
    loss.backward()
    np.testing.assert_array_equal(p.grad, [0.25, 0.0, -0.25, -0.25])
    with pytest.raises(DimensionError):
        l1_loss(p, np.zeros(3))


def test_weighted_l1_equals_sum_of_channel_losses(rng):
    pred = rng.standard_normal((3, 2, 4, 5))
    tgt = rng.standard_normal((3, 2, 4, 5))
    alpha = (0.707, 0.293)
    got = weighted_l1(Tensor(pred), tgt, alpha).data
    want = sum(a * l1_loss(Tensor(pred[:, c]), tgt[:, c]).data for c, a in enumerate(alpha))
    assert got == pytest.approx(want, rel=1e-14)
