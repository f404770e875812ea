import numpy as np
import pytest

from scunet.errors import ConfigError, DimensionError, UsageError
from scunet.model import UNetConfig, build_unet, prepare_input, restore_output
from scunet.separation import ModelSeparator
from scunet.tensor import Tensor


def small(depth=2, out=2, **kw):
    return build_unet(UNetConfig(depth=depth, base_channels=4, out_channels=out, input_bins=64, **kw), seed=3)


def test_forward_shape_and_sign(rng):
    m = small()
    x = rng.uniform(0, 1, (2, 1, 64, 24)).astype(np.float32)
    out = m.predict(x)
    assert out.shape == (2, 2, 64, 24)
    assert out.min() >= 0


def test_out_channels_only_change_the_final_layer():
    a, b = small(out=2), small(out=4)
    pa, pb = a.named_parameters(), b.named_parameters()
    diff = [k for k in pa if pa[k].shape != pb[k].shape]
    assert diff == ["final.weight", "final.bias"]


def test_encoder_decoder_channel_layout():
    m = build_unet(UNetConfig(depth=3, base_channels=8), seed=0)
    L = m.layers
    assert L["enc0.conv0"].weight.shape == (8, 1, 3, 3)
    assert L["enc2.conv1"].weight.shape == (32, 32, 3, 3)
    assert L["mid.conv0"].weight.shape == (64, 32, 3, 3)
    assert L["dec2.up"].weight.shape == (64, 32, 5, 5)  # transposed: (in, out, kh, kw)
    assert L["dec0.conv"].weight.shape == (16, 8, 3, 3)
    assert L["final"].weight.shape == (2, 8, 1, 1)


def test_skip_connections_are_wired(rng):
    m = small()
    x = rng.uniform(0, 1, (1, 1, 64, 16)).astype(np.float32)
    base = m.forward(x, mode="eval").data
    for level in (0, 1):
        scaled = m.forward(x, mode="eval", skip_scale={level: 0.0}).data
        assert not np.allclose(base, scaled)


def test_eval_is_deterministic_and_train_uses_dropout(rng):
    m = small()
    x = rng.uniform(0, 1, (2, 1, 64, 16)).astype(np.float32)
    np.testing.assert_array_equal(m.predict(x), m.predict(x))
    a = m.forward(x, mode="train", rng=np.random.default_rng(0)).data
    b = m.forward(x, mode="train", rng=np.random.default_rng(1)).data
    assert not np.array_equal(a, b)
    with pytest.raises(UsageError):
        m.forward(x, mode="train")


def test_forward_validates_input():
    m = small()
    with pytest.raises(DimensionError, match="axis 3"):
        m.predict(np.zeros((1, 1, 64, 10), np.float32))
    with pytest.raises(DimensionError, match="axis 1"):
        m.predict(np.zeros((1, 2, 64, 16), np.float32))
    with pytest.raises(ConfigError):
        UNetConfig(depth=3, input_bins=100)
    with pytest.raises(ConfigError):
        UNetConfig(dropout_p=1.0)


def test_seeded_build_is_reproducible():
    a, b = small(), small()
    for (ka, pa), (kb, pb) in zip(a.named_parameters().items(), b.named_parameters().items()):
        assert ka == kb
        np.testing.assert_array_equal(pa.data, pb.data)


def test_prepare_and_restore_layout():
    cfg = UNetConfig(depth=3, input_bins=1024)
    mag = np.arange(1025 * 173, dtype=np.float32).reshape(1025, 173)
    x = prepare_input(mag, cfg)
    assert x.shape == (1, 1, 1024, 176)
    np.testing.assert_array_equal(x[0, 0, :, :173], mag[:1024])
    assert not x[..., 173:].any()
    back = restore_output(np.repeat(x, 2, axis=1), 173, 1025)
    assert back.shape == (1, 2, 1025, 173)
    np.testing.assert_array_equal(back[0, 1, :1024], mag[:1024])
    assert not back[..., 1024, :].any()


def test_parameter_gradients_flow_to_every_tensor(rng):
    m = small()
    x = Tensor(rng.uniform(0, 1, (2, 1, 64, 16)).astype(np.float32))
    m.forward(x, mode="train", rng=np.random.default_rng(0)).sum().backward()
    for name, p in m.named_parameters().items():
        assert p.grad is not None and p.grad.shape == p.shape, name


def test_input_scale_is_validated():
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ConfigError):
            UNetConfig(input_scale=bad)


def test_separator_applies_and_undoes_input_scale(rng):
    # a network fed s * |X| with input_scale 1 must match one fed |X| with input_scale s
    base = dict(depth=2, base_channels=4, input_bins=64)
    scaled = ModelSeparator(build_unet(UNetConfig(input_scale=0.5, **base), seed=3), ("a", "b"))
    unit = ModelSeparator(build_unet(UNetConfig(input_scale=1.0, **base), seed=3), ("a", "b"))
    mag = rng.uniform(0, 4, (65, 13))
    out = scaled.magnitudes(mag, 0, 0)
    assert out.shape == (2, 65, 13) and not out[:, 64].any()
    np.testing.assert_allclose(out * 0.5, unit.magnitudes(mag * 0.5, 0, 0), rtol=1e-6, atol=1e-7)
