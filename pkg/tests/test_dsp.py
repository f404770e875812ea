import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scunet.dsp import (
    AudioClip,
    StftConfig,
    combine,
    downmix_to_mono,
    hann,
    istft,
    magnitude_phase,
    reconstruct,
    segment,
    snr_db,
    stft,
)
from scunet.errors import DataError, DimensionError, SpecError


def test_stft_shape_for_two_second_chunk():
    spec = stft(AudioClip(np.zeros(88200)), StftConfig())
    assert spec.shape == (1025, 173)


def test_hann_is_periodic():
    w = hann(8)
    assert w[0] == 0 and w[4] == pytest.approx(1.0)
    np.testing.assert_allclose(w, np.hanning(9)[:-1])


def test_stft_matches_direct_dft_of_one_frame(rng):
    x = rng.standard_normal(4096)
    cfg = StftConfig(256, 64)
    spec = stft(x, cfg)
    padded = np.pad(x, 128, mode="reflect")
    frame = padded[64 * 5:64 * 5 + 256] * hann(256)
    k = np.arange(129)[:, None]
    direct = (frame[None, :] * np.exp(-2j * np.pi * k * np.arange(256)[None, :] / 256)).sum(axis=1)
    np.testing.assert_allclose(spec[:, 5], direct, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(256, 64), (512, 128), (1024, 256), (2048, 512)]))
def test_roundtrip_interior_is_near_exact(seed, wh):
    cfg = StftConfig(*wh)
    x = np.random.default_rng(seed).uniform(-1, 1, 6000)
    y = istft(stft(x, cfg), cfg, len(x)).samples
    assert snr_db(x, y) > 100


def test_magnitude_phase_properties(rng):
    spec = stft(rng.standard_normal(3000), StftConfig(256, 64))
    pair = magnitude_phase(spec)
    assert (pair.magnitude >= 0).all()
    assert pair.phase.max() <= np.pi and pair.phase.min() > -np.pi
    np.testing.assert_allclose(combine(pair.magnitude, pair.phase), spec, atol=1e-12)


def test_reconstruct_with_true_magnitude_recovers_signal(rng):
    cfg = StftConfig(512, 128)
    x = rng.standard_normal(8000)
    pair = magnitude_phase(stft(x, cfg))
    y = reconstruct(pair.magnitude, pair.phase, cfg, len(x))
    assert snr_db(x, y) > 100
    with pytest.raises(DimensionError):
        reconstruct(pair.magnitude[:, :-1], pair.phase, cfg)


def test_segment_pads_tail_with_zeros():
    clip = AudioClip(np.ones(5), sample_rate=2)
    chunks = segment(clip, 2.0)
    assert [len(c) for c in chunks] == [4, 4]
    np.testing.assert_array_equal(chunks[1].samples, [1, 0, 0, 0])


def test_downmix_and_clip_validation():
    a, b = AudioClip(np.array([1.0, -1.0])), AudioClip(np.array([0.0, 1.0]))
    np.testing.assert_array_equal(downmix_to_mono(a, b).samples, [0.5, 0.0])
    np.testing.assert_array_equal(downmix_to_mono(a, a).samples, a.samples)
    with pytest.raises(DataError):
        downmix_to_mono(a, AudioClip(np.zeros(3)))
    with pytest.raises(DataError):
        AudioClip(np.array([np.nan]))
    with pytest.raises(SpecError):
        StftConfig(1000, 250)
    with pytest.raises(SpecError):
        StftConfig(1024, 2048)
