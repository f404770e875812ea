import struct

import numpy as np
import pytest

from scunet.checkpoint import MAGIC, encode_checkpoint, load_checkpoint, read_header, save_checkpoint
from scunet.errors import FormatError, StorageError
from scunet.model import UNetConfig, build_unet
from scunet.optim import AdamState, adam_step


@pytest.fixture
def trained(tmp_path):
    m = build_unet(UNetConfig(depth=2, base_channels=4, input_bins=64, input_scale=0.5), seed=5)
    opt = AdamState(learning_rate=3e-4, weight_decay=1e-6)
    params = m.parameters()
    adam_step(params, [np.ones_like(p.data) for p in params], opt)
    m.layers["enc0.bn0"].running_mean[:] = 0.25
    return m, opt


def test_round_trip_restores_everything(tmp_path, trained):
    m, opt = trained
    path = save_checkpoint(m, opt, tmp_path / "x.ckpt", meta={"preset": "M4"}) or tmp_path / "x.ckpt"
    m2, opt2 = load_checkpoint(path)
    assert m2.cfg == m.cfg and m2.meta == {"preset": "M4"}
    assert m2.cfg.input_scale == 0.5
    for (k, a), (_, b) in zip(m.named_parameters().items(), m2.named_parameters().items()):
        np.testing.assert_array_equal(a.data, b.data, err_msg=k)
    for k, v in m.named_buffers().items():
        np.testing.assert_array_equal(v, m2.named_buffers()[k])
    assert opt2.step_count == 1 and opt2.learning_rate == 3e-4
    for a, b in zip(opt.m + opt.v, opt2.m + opt2.v):
        np.testing.assert_array_equal(a, b)
    assert read_header(path)[1] == {"preset": "M4"}
    # re-encoding a loaded checkpoint reproduces the bytes
    assert encode_checkpoint(m2, opt2, m2.meta) == (tmp_path / "x.ckpt").read_bytes()


def test_corruption_is_detected(tmp_path, trained):
    m, opt = trained
    good = encode_checkpoint(m, opt)
    p = tmp_path / "bad.ckpt"
    cases = {
        "magic": b"XXXXXX" + good[6:],
        "version": MAGIC + struct.pack("<I", 99) + good[10:],
        "crc": good[:-5] + bytes([good[-5] ^ 1]) + good[-4:],
        "truncated": good[: len(good) // 2],
        "trailing": good + b"\x00",
    }
    for what, blob in cases.items():
        p.write_bytes(blob)
        with pytest.raises(FormatError):
            load_checkpoint(p)
    with pytest.raises(StorageError):
        load_checkpoint(tmp_path / "absent.ckpt")


def test_save_is_atomic_on_failure(tmp_path, trained):
    m, opt = trained
    target = tmp_path / "keep.ckpt"
    save_checkpoint(m, opt, target)
    before = target.read_bytes()
    (tmp_path / "plain").write_text("a file, not a directory")
    with pytest.raises(StorageError):
        save_checkpoint(m, opt, tmp_path / "plain" / "x.ckpt")
    assert target.read_bytes() == before
