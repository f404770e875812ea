"""Differentiable layer operations used by the U-Net.

All spatial tensors are NCHW. Each op computes its forward pass with numpy (or
the numba correlation kernels) and, when any input requires gradients,
records a closure producing the input gradients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _conv, _fused
from .errors import DimensionError, SpecError, UsageError
from .tensor import Tensor, as_array


def _pair(v, name):
    if isinstance(v, (int, np.integer)):
        return (int(v), int(v))
    v = tuple(int(a) for a in v)
    if len(v) != 2:
        raise SpecError(f"{name} must be an int or a pair, got {v}")
    return v


@dataclass(frozen=True)
class ConvSpec:
    kernel: tuple = (3, 3)
    stride: tuple = (1, 1)
    padding: tuple = (0, 0)
    output_padding: tuple = (0, 0)

    def __post_init__(self):
        for name in ("kernel", "stride", "padding", "output_padding"):
            object.__setattr__(self, name, _pair(getattr(self, name), name))
        if min(self.kernel) < 1 or min(self.stride) < 1:
            raise SpecError(f"kernel and stride extents must be >= 1, got {self.kernel}, {self.stride}")
        if min(self.padding) < 0 or min(self.output_padding) < 0:
            raise SpecError("padding and output_padding must be >= 0")
        if any(op >= s for op, s in zip(self.output_padding, self.stride)):
            raise SpecError(f"output_padding {self.output_padding} must be < stride {self.stride}")

    def conv_out(self, h, w):
        """Output extents of conv2d; raises SpecError when not integral.

        A non-zero output_padding drops that many trailing rows/columns of the
        padded input, which makes conv2d the exact adjoint of conv_transpose2d
        with the same spec.
        """
        out = []
        for axis, (n, k, s, p, op) in enumerate(
            zip((h, w), self.kernel, self.stride, self.padding, self.output_padding)
        ):
            span = n + 2 * p - k - op
            if span < 0 or span % s:
                raise SpecError(
                    f"axis {axis + 2}: (size {n} + 2*{p} - {k} - {op}) / {s} is not a non-negative integer"
                )
            out.append(span // s + 1)
        return tuple(out)

    def transpose_out(self, h, w):
        out = tuple(
            (n - 1) * s - 2 * p + k + op
            for n, k, s, p, op in zip((h, w), self.kernel, self.stride, self.padding, self.output_padding)
        )
        if min(out) < 1:
            raise SpecError(f"transposed convolution output {out} is empty")
        return out


def _check_4d(x, name):
    if x.ndim != 4:
        raise DimensionError(f"{name} must be 4-D NCHW, got shape {x.shape}")


def _check_weight(weight, spec, channel_axis, in_channels, op):
    _check_4d(weight, f"{op} weight")
    if weight.shape[channel_axis] != in_channels:
        raise DimensionError(
            f"{op}: input axis 1 (channels) is {in_channels} but weight axis {channel_axis} is "
            f"{weight.shape[channel_axis]}"
        )
    if spec is None:
        return ConvSpec(kernel=weight.shape[2:])
    if tuple(weight.shape[2:]) != spec.kernel:
        raise DimensionError(f"{op}: weight kernel axes 2-3 are {weight.shape[2:]}, spec says {spec.kernel}")
    return spec


def _check_bias(bias, n, op):
    if bias is not None and as_array(bias).shape != (n,):
        raise DimensionError(f"{op}: bias must have shape ({n},), got {as_array(bias).shape}")


def conv2d(x, weight, bias=None, spec=None):
    """2-D cross-correlation. weight is (out_ch, in_ch, kh, kw)."""
    _check_4d(x, "conv2d input")
    spec = _check_weight(weight, spec, 1, x.shape[1], "conv2d")
    _check_bias(bias, weight.shape[0], "conv2d")
    h, w = x.shape[2:]
    spec.conv_out(h, w)
    (ph, pw), stride = spec.padding, spec.stride
    oh, ow = spec.output_padding

    xd, wd = as_array(x), as_array(weight)
    xp = _conv._pad_hw(xd, ph, pw)
    if oh or ow:
        xp = xp[:, :, : xp.shape[2] - oh, : xp.shape[3] - ow]
    out = _conv.strided_corr(xp, wd, stride)
    if bias is not None:
        out += as_array(bias).astype(out.dtype, copy=False)[None, :, None, None]

    def backward(g):
        gx = gw = gb = None
        if isinstance(x, Tensor) and x.requires_grad and stride == (1, 1) and not (oh or ow):
            gx = _conv.corr_input_grad(g, wd, ph, pw, h, w)
        elif isinstance(x, Tensor) and x.requires_grad:
            gxp = _conv.scatter_full(g, wd, stride)
            short_h, short_w = max(0, ph + h - gxp.shape[2]), max(0, pw + w - gxp.shape[3])
            if short_h or short_w:
                gxp = np.pad(gxp, ((0, 0), (0, 0), (0, short_h), (0, short_w)))
            gx = gxp[:, :, ph:ph + h, pw:pw + w]
        if isinstance(weight, Tensor) and weight.requires_grad:
            gw = _conv.strided_corr_wgrad(xp, g, spec.kernel, stride).astype(wd.dtype, copy=False)
        if isinstance(bias, Tensor) and bias.requires_grad:
            gb = g.sum(axis=(0, 2, 3)).astype(bias.dtype, copy=False)
        return gx, gw, gb

    return Tensor.from_op(out, (x, weight, bias) if bias is not None else (x, weight), backward)


def conv_transpose2d(x, weight, bias=None, spec=None):
    """Transposed convolution; weight is (in_ch, out_ch, kh, kw).

    Output extent per axis: (n - 1) * stride - 2 * padding + kernel + output_padding.
    """
    _check_4d(x, "conv_transpose2d input")
    spec = _check_weight(weight, spec, 0, x.shape[1], "conv_transpose2d")
    _check_bias(bias, weight.shape[1], "conv_transpose2d")
    h, w = x.shape[2:]
    ho, wo = spec.transpose_out(h, w)
    (ph, pw), stride = spec.padding, spec.stride

    xd, wd = as_array(x), as_array(weight)
    kh, kw = spec.kernel
    if stride == (1, 1) and ph <= kh - 1 and pw <= kw - 1:
        return _conv_transpose_stride1(x, weight, bias, spec)
    z = _conv.scatter_full(xd, wd, stride)
    zh, zw = z.shape[2:]
    extra_h, extra_w = max(0, ph + ho - zh), max(0, pw + wo - zw)
    if extra_h or extra_w:
        z = np.pad(z, ((0, 0), (0, 0), (0, extra_h), (0, extra_w)))
    out = np.ascontiguousarray(z[:, :, ph:ph + ho, pw:pw + wo])
    if bias is not None:
        out += as_array(bias).astype(out.dtype, copy=False)[None, :, None, None]

    def backward(g):
        gx = gw = gb = None
        gz = np.zeros((g.shape[0], g.shape[1], zh + extra_h, zw + extra_w), dtype=g.dtype)
        gz[:, :, ph:ph + ho, pw:pw + wo] = g
        gz = gz[:, :, :zh, :zw]
        if isinstance(x, Tensor) and x.requires_grad:
            gx = _conv.strided_corr(gz, wd, stride)
        if isinstance(weight, Tensor) and weight.requires_grad:
            gw = _conv.scatter_full_wgrad(xd, gz, spec.kernel, stride).astype(wd.dtype, copy=False)
        if isinstance(bias, Tensor) and bias.requires_grad:
            gb = g.sum(axis=(0, 2, 3)).astype(bias.dtype, copy=False)
        return gx, gw, gb

    return Tensor.from_op(out, (x, weight, bias) if bias is not None else (x, weight), backward)


def _conv_transpose_stride1(x, weight, bias, spec):
    # stride-1 transposed conv == correlation with the flipped, channel-swapped
    # kernel and padding k - 1 - p (output_padding is necessarily 0 here)
    (ph, pw), (kh, kw) = spec.padding, spec.kernel
    xd, wd = as_array(x), as_array(weight)
    wf = np.ascontiguousarray(wd[:, :, ::-1, ::-1].transpose(1, 0, 2, 3))
    qh, qw = kh - 1 - ph, kw - 1 - pw
    xp = _conv._pad_hw(xd, qh, qw)
    out = _conv.corr(xp, wf)
    if bias is not None:
        out += as_array(bias).astype(out.dtype, copy=False)[None, :, None, None]
    h, w = xd.shape[2:]

    def backward(g):
        gx = gw = gb = None
        if isinstance(x, Tensor) and x.requires_grad:
            gx = _conv.corr_input_grad(g, wf, qh, qw, h, w)
        if isinstance(weight, Tensor) and weight.requires_grad:
            gwf = _conv.corr_wgrad(xp, g, kh, kw)
            gw = np.ascontiguousarray(gwf.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1]).astype(wd.dtype, copy=False)
        if isinstance(bias, Tensor) and bias.requires_grad:
            gb = g.sum(axis=(0, 2, 3)).astype(bias.dtype, copy=False)
        return gx, gw, gb

    return Tensor.from_op(out, (x, weight, bias) if bias is not None else (x, weight), backward)


def maxpool2d(x, window=2):
    """Non-overlapping max pooling; ties resolve to the first element in row-major order."""
    _check_4d(x, "maxpool2d input")
    k = int(window)
    n, c, h, w = x.shape
    if h % k or w % k:
        raise SpecError(f"maxpool2d: spatial extents {(h, w)} are not divisible by window {k}")
    xd = as_array(x)
    if k == 2:
        xc = np.ascontiguousarray(xd)
        out = np.empty((n, c, h // 2, w // 2), dtype=xd.dtype)
        arg2 = np.empty(out.shape, dtype=np.int8)
        _fused.maxpool2_forward(xc, out, arg2)

        def backward2(g):
            gx = np.zeros((n, c, h, w), dtype=g.dtype)
            _fused.maxpool2_backward(np.ascontiguousarray(g), arg2, gx)
            return (gx,)

        return Tensor.from_op(out, (x,), backward2)
    blocks = xd.reshape(n, c, h // k, k, w // k, k).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h // k, w // k, k * k)
    arg = blocks.argmax(axis=-1)
    out = np.take_along_axis(blocks, arg[..., None], axis=-1)[..., 0]

    def backward(g):
        gb = np.zeros(blocks.shape, dtype=g.dtype)
        np.put_along_axis(gb, arg[..., None], g[..., None], axis=-1)
        gx = gb.reshape(n, c, h // k, w // k, k, k).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h, w)
        return (gx,)

    return Tensor.from_op(out, (x,), backward)


@dataclass
class BatchNormState:
    gamma: Tensor
    beta: Tensor
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.1
    eps: float = 1e-5
    mode: str = "train"

    def __post_init__(self):
        if not 0.0 < self.momentum < 1.0:
            raise SpecError(f"momentum must be in (0, 1), got {self.momentum}")
        if self.eps <= 0:
            raise SpecError("eps must be positive")
        if np.any(self.running_var < 0):
            raise SpecError("running_var must be non-negative")
        if self.mode not in ("train", "eval"):
            raise UsageError(f"mode must be 'train' or 'eval', got {self.mode!r}")

    @classmethod
    def create(cls, channels, dtype=np.float32, **kw):
        return cls(
            gamma=Tensor(np.ones(channels, dtype=dtype), requires_grad=True),
            beta=Tensor(np.zeros(channels, dtype=dtype), requires_grad=True),
            running_mean=np.zeros(channels, dtype=dtype),
            running_var=np.ones(channels, dtype=dtype),
            **kw,
        )

    @property
    def channels(self):
        return self.gamma.shape[0]


def batchnorm2d(x, state, mode=None):
    """Per-channel batch normalization over (N, H, W).

    Train mode normalizes with batch statistics and folds them into the
    running estimates (unbiased variance); eval mode uses the running estimates.
    """
    _check_4d(x, "batchnorm2d input")
    mode = mode or state.mode
    if x.shape[1] != state.channels:
        raise DimensionError(f"batchnorm2d: input axis 1 (channels) is {x.shape[1]}, state has {state.channels}")
    xd = as_array(x)
    gamma, beta = state.gamma, state.beta
    gd = as_array(gamma).astype(xd.dtype, copy=False)[None, :, None, None]
    bd = as_array(beta).astype(xd.dtype, copy=False)[None, :, None, None]
    eps = state.eps

    if mode == "train":
        m = xd.shape[0] * xd.shape[2] * xd.shape[3]
        mean = xd.mean(axis=(0, 2, 3))
        centered = xd - mean[None, :, None, None]
        var = np.mean(centered * centered, axis=(0, 2, 3))
        inv_std = 1.0 / np.sqrt(var + eps)
        xhat = centered * inv_std[None, :, None, None]
        mom = state.momentum
        unbiased = var * (m / max(m - 1, 1))
        state.running_mean = ((1 - mom) * state.running_mean + mom * mean).astype(state.running_mean.dtype)
        state.running_var = ((1 - mom) * state.running_var + mom * unbiased).astype(state.running_var.dtype)
        out = xhat * gd + bd

        def backward(g):
            dgamma = np.sum(g * xhat, axis=(0, 2, 3))
            dbeta = g.sum(axis=(0, 2, 3))
            dxhat = g * gd
            gx = None
            if isinstance(x, Tensor) and x.requires_grad:
                gx = (inv_std / m)[None, :, None, None] * (
                    m * dxhat
                    - (dbeta * gd[0, :, 0, 0])[None, :, None, None]
                    - xhat * (dgamma * gd[0, :, 0, 0])[None, :, None, None]
                )
            return gx, dgamma.astype(gamma.dtype), dbeta.astype(beta.dtype)

    elif mode == "eval":
        inv_std = (1.0 / np.sqrt(state.running_var.astype(xd.dtype) + eps))[None, :, None, None]
        xhat = (xd - state.running_mean.astype(xd.dtype)[None, :, None, None]) * inv_std
        out = xhat * gd + bd

        def backward(g):
            gx = g * gd * inv_std if isinstance(x, Tensor) and x.requires_grad else None
            return gx, np.sum(g * xhat, axis=(0, 2, 3)).astype(gamma.dtype), g.sum(axis=(0, 2, 3)).astype(beta.dtype)

    else:
        raise UsageError(f"mode must be 'train' or 'eval', got {mode!r}")

    return Tensor.from_op(out.astype(xd.dtype, copy=False), (x, gamma, beta), backward)


def batchnorm_relu(x, state, mode=None):
    """relu(batchnorm2d(x, state, mode)) as one fused op (same math, fewer passes)."""
    _check_4d(x, "batchnorm_relu input")
    mode = mode or state.mode
    if x.shape[1] != state.channels:
        raise DimensionError(f"batchnorm_relu: input axis 1 (channels) is {x.shape[1]}, state has {state.channels}")
    xd = np.ascontiguousarray(as_array(x))
    gamma, beta = state.gamma, state.beta
    if mode == "train":
        mean, var = _fused.channel_moments(xd)
        m = xd.shape[0] * xd.shape[2] * xd.shape[3]
        mom = state.momentum
        unbiased = var * (m / max(m - 1, 1))
        state.running_mean = ((1 - mom) * state.running_mean + mom * mean).astype(state.running_mean.dtype)
        state.running_var = ((1 - mom) * state.running_var + mom * unbiased).astype(state.running_var.dtype)
    elif mode == "eval":
        mean = state.running_mean.astype(np.float64)
        var = state.running_var.astype(np.float64)
    else:
        raise UsageError(f"mode must be 'train' or 'eval', got {mode!r}")
    inv_std = 1.0 / np.sqrt(var + state.eps)
    gd = as_array(gamma).astype(np.float64)
    scale = (gd * inv_std).astype(xd.dtype)
    shift = (as_array(beta) - mean * gd * inv_std).astype(xd.dtype)
    out = np.empty_like(xd)
    _fused.affine_relu(xd, scale, shift, out)
    train = mode == "train"

    def backward(g):
        gx = np.empty_like(xd)
        dgamma, dbeta = _fused.bn_relu_backward(
            np.ascontiguousarray(g), xd, out, mean, inv_std, gd, train, gx
        )
        if not (isinstance(x, Tensor) and x.requires_grad):
            gx = None
        return gx, dgamma.astype(gamma.dtype), dbeta.astype(beta.dtype)

    return Tensor.from_op(out, (x, gamma, beta), backward)


def relu(x):
    xd = as_array(x)
    out = np.maximum(xd, 0)
    return Tensor.from_op(out, (x,), lambda g: (np.where(out > 0, g, 0).astype(g.dtype, copy=False),))


def dropout(x, p=0.4, mode="train", rng=None):
    """Inverted dropout: survivors are scaled by 1/(1-p); eval mode is the identity."""
    if not 0.0 <= p < 1.0:
        raise UsageError(f"dropout probability must be in [0, 1), got {p}")
    if mode == "eval" or p == 0.0:
        return x
    if mode != "train":
        raise UsageError(f"mode must be 'train' or 'eval', got {mode!r}")
    if rng is None:
        raise UsageError("train-mode dropout needs an explicit numpy Generator")
    xd = as_array(x)
    mask = (_uniform24(rng, xd.size) >= np.uint32(math.ceil(p * 2**24))).reshape(xd.shape)
    mask = mask * xd.dtype.type(1.0 / (1.0 - p))
    return Tensor.from_op(xd * mask, (x,), lambda g: (g * mask,))


def _uniform24(rng, n):
    """n uniform integers in [0, 2**24) from the generator's raw 64-bit stream.

    Comparing against ceil(p * 2**24) keeps an element with probability
    exactly 1 - ceil(p * 2**24) / 2**24, the resolution of a float32 uniform.
    """
    raw = rng.bit_generator.random_raw((n + 1) // 2).view(np.uint32)[:n]
    return raw >> np.uint32(8)


def concat_channels(a, b):
    """Stack two NCHW tensors along the channel axis."""
    _check_4d(a, "concat_channels lhs")
    _check_4d(b, "concat_channels rhs")
    for axis in (0, 2, 3):
        if a.shape[axis] != b.shape[axis]:
            raise DimensionError(f"concat_channels: axis {axis} differs ({a.shape[axis]} vs {b.shape[axis]})")
    ca = a.shape[1]
    out = np.concatenate([as_array(a), as_array(b)], axis=1)
    return Tensor.from_op(out, (a, b), lambda g: (g[:, :ca], g[:, ca:]))


def l1_loss(pred, target):
    """Mean absolute error over every element; the subgradient at 0 is 0."""
    if tuple(pred.shape) != tuple(np.shape(as_array(target))):
        raise DimensionError(f"l1_loss: pred shape {pred.shape} != target shape {np.shape(as_array(target))}")
    pd = as_array(pred)
    diff = pd - as_array(target).astype(pd.dtype, copy=False)
    n = diff.size
    out = np.asarray(np.abs(diff).mean(), dtype=pd.dtype)

    def backward(g):
        return (np.sign(diff) * (g / n),)

    return Tensor.from_op(out, (pred,), backward)


def weighted_l1(pred, target, alpha):
    """sum_c alpha[c] * mean |pred[:, c] - target[:, c]| over an N x C x ... tensor.

    Equivalent to summing per-channel l1_loss terms, in one pass.
    """
    alpha = np.asarray(alpha, dtype=np.float64).reshape(-1)
    tshape = tuple(np.shape(as_array(target)))
    if tuple(pred.shape) != tshape:
        raise DimensionError(f"weighted_l1: pred shape {pred.shape} != target shape {tshape}")
    if pred.ndim < 2 or pred.shape[1] != alpha.size:
        raise DimensionError(
            f"weighted_l1: axis 1 has {pred.shape[1] if pred.ndim > 1 else None} channels, "
            f"{alpha.size} weights given"
        )
    pd = as_array(pred)
    diff = pd - as_array(target).astype(pd.dtype, copy=False)
    axes = (0,) + tuple(range(2, diff.ndim))
    per = np.abs(diff).mean(axis=axes, dtype=np.float64)
    out = np.asarray(float(alpha @ per), dtype=pd.dtype)
    count = diff.size // alpha.size
    bshape = (1, alpha.size) + (1,) * (diff.ndim - 2)

    def backward(g):
        coef = (alpha * (float(g) / count)).astype(pd.dtype).reshape(bshape)
        return (np.sign(diff) * coef,)

    return Tensor.from_op(out, (pred,), backward)
