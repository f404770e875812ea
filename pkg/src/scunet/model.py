"""Spectrogram-Channels U-Net.

Encoder level i: `convs_per_block` x (conv 3x3 pad 1 -> batchnorm -> ReLU),
then 2x2 max pooling. A bottleneck block of the same recipe sits below the
deepest pool. Decoder level i: transposed conv 5x5 stride 2 pad 2
(output_padding 1) -> batchnorm -> ReLU -> dropout, concatenation with the
encoder output of the same size, then a 3x3 pad 1 transposed conv ->
batchnorm -> ReLU. A final 1x1 convolution and ReLU emit one non-negative
magnitude spectrogram per source.

Convolutions that feed a batchnorm carry no bias (the batchnorm shift
subsumes it); only the final 1x1 convolution has one.

Channel widths: encoder level i has base * 2**i channels, the bottleneck
base * 2**depth, and each decoder level halves back down.
"""
from __future__ import annotations

import dataclasses
import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, UsageError
from .functional import (
    BatchNormState,
    ConvSpec,
    batchnorm_relu,
    concat_channels,
    conv2d,
    conv_transpose2d,
    dropout,
    maxpool2d,
    relu,
)
from .tensor import Tensor, no_grad

ENC_SPEC = ConvSpec(kernel=3, stride=1, padding=1)
UP_SPEC = ConvSpec(kernel=5, stride=2, padding=2, output_padding=1)
DEC_SPEC = ConvSpec(kernel=3, stride=1, padding=1)


@dataclass(frozen=True)
class UNetConfig:
    depth: int = 5
    base_channels: int = 16
    out_channels: int = 2
    in_channels: int = 1
    input_bins: int = 1024
    dropout_p: float = 0.4
    convs_per_block: int = 2
    # raw STFT magnitudes are multiplied by this before entering the network
    input_scale: float = 0.25

    def __post_init__(self):
        for name in ("depth", "base_channels", "out_channels", "in_channels", "input_bins", "convs_per_block"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ConfigError(f"dropout_p must be in [0, 1), got {self.dropout_p}")
        if not (math.isfinite(self.input_scale) and self.input_scale > 0):
            raise ConfigError(f"input_scale must be finite and positive, got {self.input_scale}")
        if self.input_bins % self.multiple:
            raise ConfigError(
                f"input_bins={self.input_bins} must be divisible by 2**depth={self.multiple}"
            )

    @property
    def multiple(self):
        return 2 ** self.depth

    def padded_frames(self, frames):
        m = self.multiple
        return -(-frames // m) * m

    def encoder_channels(self):
        return [self.base_channels * 2 ** i for i in range(self.depth)]

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown UNetConfig keys: {sorted(unknown)}")
        return cls(**d)


class Conv:
    def __init__(self, cin, cout, spec, transposed, rng, dtype, bias=True):
        kh, kw = spec.kernel
        shape = (cin, cout, kh, kw) if transposed else (cout, cin, kh, kw)
        fan_in = cin * kh * kw / (spec.stride[0] * spec.stride[1] if transposed else 1)
        bound = np.sqrt(6.0 / fan_in)
        self.weight = Tensor(rng.uniform(-bound, bound, shape).astype(dtype), requires_grad=True)
        self.bias = Tensor(np.zeros(cout, dtype=dtype), requires_grad=True) if bias else None
        self.spec = spec
        self.transposed = transposed

    def __call__(self, x):
        op = conv_transpose2d if self.transposed else conv2d
        return op(x, self.weight, self.bias, self.spec)


class UNetModel:
    def __init__(self, cfg, layers):
        self.cfg = cfg
        self.layers = layers
        self.meta = {}

    # --- parameter / buffer access ------------------------------------------
    def named_parameters(self):
        out = OrderedDict()
        for name, layer in self.layers.items():
            if isinstance(layer, Conv):
                out[f"{name}.weight"] = layer.weight
                if layer.bias is not None:
                    out[f"{name}.bias"] = layer.bias
            else:
                out[f"{name}.gamma"] = layer.gamma
                out[f"{name}.beta"] = layer.beta
        return out

    def parameters(self):
        return list(self.named_parameters().values())

    def named_buffers(self):
        out = OrderedDict()
        for name, layer in self.layers.items():
            if isinstance(layer, BatchNormState):
                out[f"{name}.running_mean"] = layer.running_mean
                out[f"{name}.running_var"] = layer.running_var
        return out

    def set_buffer(self, name, value):
        layer, attr = name.rsplit(".", 1)
        setattr(self.layers[layer], attr, value)

    def parameter_count(self):
        return int(sum(p.size for p in self.parameters()))

    def zero_grad(self):
        for p in self.parameters():
            p.grad = None

    @property
    def dtype(self):
        return self.layers["final"].weight.dtype

    def astype(self, dtype):
        """Cast parameters and running statistics in place (e.g. float64 for checks)."""
        for p in self.parameters():
            p.data = p.data.astype(dtype)
            p.grad = None
        for name, buf in self.named_buffers().items():
            self.set_buffer(name, buf.astype(dtype))
        return self

    # --- forward ---------------------------------------------------------------
    def _block(self, x, prefix, count, mode):
        for j in range(count):
            x = self.layers[f"{prefix}.conv{j}"](x)
            x = batchnorm_relu(x, self.layers[f"{prefix}.bn{j}"], mode)
        return x

    def forward(self, x, mode="eval", rng=None, skip_scale=None):
        """Map N x in_channels x H x W to N x out_channels x H x W (non-negative).

        `skip_scale`, if given, maps a decoder level to a factor applied to its
        skip connection (used only to test that the skips are wired in).
        """
        cfg = self.cfg
        if mode not in ("train", "eval"):
            raise UsageError(f"mode must be 'train' or 'eval', got {mode!r}")
        if not isinstance(x, Tensor):
            x = Tensor(np.asarray(x, dtype=self.dtype))
        if x.ndim != 4:
            raise DimensionError(f"forward expects N x C x H x W, got shape {x.shape}")
        if x.shape[1] != cfg.in_channels:
            raise DimensionError(f"axis 1 (channels) is {x.shape[1]}, model expects {cfg.in_channels}")
        for axis in (2, 3):
            if x.shape[axis] % cfg.multiple:
                raise DimensionError(
                    f"axis {axis} extent {x.shape[axis]} is not divisible by 2**depth={cfg.multiple}"
                )
        if mode == "train" and cfg.dropout_p > 0 and rng is None:
            raise UsageError("train-mode forward needs an rng for dropout")

        skips = []
        for i in range(cfg.depth):
            x = self._block(x, f"enc{i}", cfg.convs_per_block, mode)
            skips.append(x)
            x = maxpool2d(x, 2)
        x = self._block(x, "mid", cfg.convs_per_block, mode)
        for i in reversed(range(cfg.depth)):
            x = batchnorm_relu(self.layers[f"dec{i}.up"](x), self.layers[f"dec{i}.up_bn"], mode)
            x = dropout(x, cfg.dropout_p, mode, rng)
            skip = skips[i]
            if skip_scale and i in skip_scale:
                skip = skip * float(skip_scale[i])
            x = concat_channels(x, skip)
            x = batchnorm_relu(self.layers[f"dec{i}.conv"](x), self.layers[f"dec{i}.bn"], mode)
        return relu(self.layers["final"](x))

    __call__ = forward

    def predict(self, x):
        """Eval-mode forward without recording a graph; returns a numpy array."""
        with no_grad():
            return self.forward(x, mode="eval").data


def build_unet(cfg=UNetConfig(), seed=0, dtype=np.float32):
    """Instantiate a U-Net with seed-deterministic fan-in-scaled uniform weights."""
    rng = np.random.default_rng(seed)
    layers = OrderedDict()
    chans = cfg.encoder_channels()
    cin = cfg.in_channels
    for i, c in enumerate(chans):
        for j in range(cfg.convs_per_block):
            layers[f"enc{i}.conv{j}"] = Conv(cin if j == 0 else c, c, ENC_SPEC, False, rng, dtype, bias=False)
            layers[f"enc{i}.bn{j}"] = BatchNormState.create(c, dtype)
        cin = c
    mid = cfg.base_channels * 2 ** cfg.depth
    for j in range(cfg.convs_per_block):
        layers[f"mid.conv{j}"] = Conv(cin if j == 0 else mid, mid, ENC_SPEC, False, rng, dtype, bias=False)
        layers[f"mid.bn{j}"] = BatchNormState.create(mid, dtype)
    cin = mid
    for i in reversed(range(cfg.depth)):
        c = chans[i]
        layers[f"dec{i}.up"] = Conv(cin, c, UP_SPEC, True, rng, dtype, bias=False)
        layers[f"dec{i}.up_bn"] = BatchNormState.create(c, dtype)
        layers[f"dec{i}.conv"] = Conv(2 * c, c, DEC_SPEC, True, rng, dtype, bias=False)
        layers[f"dec{i}.bn"] = BatchNormState.create(c, dtype)
        cin = c
    layers["final"] = Conv(cin, cfg.out_channels, ConvSpec(kernel=1), False, rng, dtype)
    return UNetModel(cfg, layers)


def forward(model, mixture_mag, mode="eval", rng=None):
    return model.forward(mixture_mag, mode=mode, rng=rng)


# --- spectrogram <-> network layout ------------------------------------------
def prepare_input(mag, cfg):
    """(N, bins, frames) or (bins, frames) magnitudes -> N x 1 x input_bins x padded frames.

    Rows beyond `input_bins` (the Nyquist bin for a 2048-point STFT) are dropped;
    frames are zero-padded up to a multiple of 2**depth.
    """
    mag = np.asarray(mag)
    if mag.ndim == 2:
        mag = mag[None]
    if mag.ndim != 3:
        raise DimensionError(f"expected (N, bins, frames) magnitudes, got shape {mag.shape}")
    if mag.shape[1] < cfg.input_bins:
        raise DimensionError(f"axis 1 has {mag.shape[1]} bins, model needs at least {cfg.input_bins}")
    frames = mag.shape[2]
    out = np.zeros((mag.shape[0], 1, cfg.input_bins, cfg.padded_frames(frames)), dtype=mag.dtype)
    out[:, 0, :, :frames] = mag[:, : cfg.input_bins]
    return out


def restore_output(out, frames, bins):
    """Inverse of prepare_input for network outputs: crop frames, re-append zero rows."""
    out = np.asarray(out)
    n, c, h, _ = out.shape
    full = np.zeros((n, c, bins, frames), dtype=out.dtype)
    full[:, :, :h] = out[:, :, :, :frames]
    return full
