import logging
import struct

import numpy as np
import pytest

from scunet.data import (
    DatasetManifest,
    TrackStems,
    load_track,
    read_mono,
    read_wav,
    scan_dataset,
    synth_toy_dataset,
    write_track,
    write_wav,
)
from scunet.dsp import AudioClip, stft
from scunet.errors import DataError, FormatError, StorageError, UsageError


def wav_bytes(samples, tag=1, bits=16, rate=44100, extensible=False):
    samples = np.asarray(samples)
    channels = samples.shape[1] if samples.ndim == 2 else 1
    if tag == 3:
        data = samples.astype("<f4").tobytes()
    elif bits == 16:
        data = samples.astype("<i2").tobytes()
    else:
        v = samples.astype("<i4").reshape(-1)
        data = b"".join(int(s & 0xFFFFFF).to_bytes(3, "little") for s in v)
    align = channels * bits // 8
    if extensible:
        fmt = struct.pack("<HHIIHHHHI", 0xFFFE, channels, rate, rate * align, align, bits, 22, bits, 0)
        fmt += struct.pack("<H", tag) + b"\x00" * 14
    else:
        fmt = struct.pack("<HHIIHH", tag, channels, rate, rate * align, align, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", len(data)) + data
    return b"RIFF" + struct.pack("<I", len(body)) + body


def test_pcm16_normalization(tmp_path):
    p = tmp_path / "a.wav"
    p.write_bytes(wav_bytes([-32768, 0, 16384, 32767]))
    (clip,) = read_wav(p)
    np.testing.assert_array_equal(clip.samples, [-1.0, 0.0, 0.5, 32767 / 32768])


def test_pcm24_and_extensible(tmp_path):
    p = tmp_path / "b.wav"
    p.write_bytes(wav_bytes([-(2 ** 23), 2 ** 22, 0], bits=24, extensible=True))
    (clip,) = read_wav(p)
    np.testing.assert_array_equal(clip.samples, [-1.0, 0.5, 0.0])


def test_float_round_trip_is_bit_exact(tmp_path, rng):
    x = rng.uniform(-1, 1, 1000).astype(np.float32).astype(np.float64)
    write_wav(tmp_path / "f.wav", AudioClip(x, 22050))
    (clip,) = read_wav(tmp_path / "f.wav")
    assert clip.sample_rate == 22050
    np.testing.assert_array_equal(clip.samples, x)


def test_pcm16_path_exact_to_one_lsb(tmp_path, rng):
    x = rng.uniform(-1, 1, 500)
    p = tmp_path / "q.wav"
    p.write_bytes(wav_bytes(np.clip(np.round(x * 32768), -32768, 32767).astype(np.int16)))
    (clip,) = read_wav(p)
    assert np.max(np.abs(clip.samples - x)) <= 1 / 32768 + 1e-12


def test_stereo_gives_two_clips_and_mono_downmix(tmp_path):
    p = tmp_path / "s.wav"
    p.write_bytes(wav_bytes(np.array([[16384, 0], [0, -16384]])))
    left, right = read_wav(p)
    assert len(left) == len(right) == 2
    np.testing.assert_array_equal(read_mono(p).samples, [0.25, -0.25])


def test_codec_and_truncation_errors(tmp_path):
    p = tmp_path / "c.wav"
    p.write_bytes(wav_bytes([0, 1], tag=6, bits=8).replace(struct.pack("<HH", 2, 2), struct.pack("<HH", 1, 1), 0))
    with pytest.raises(FormatError, match="0x0006"):
        read_wav(p)
    good = wav_bytes(np.arange(100))
    p.write_bytes(good[:-50])
    with pytest.raises(FormatError, match="truncated"):
        read_wav(p)
    p.write_bytes(b"not a wav")
    with pytest.raises(FormatError):
        read_wav(p)
    with pytest.raises(StorageError):
        read_wav(tmp_path / "missing.wav")


def test_sample_rate_is_enforced(tmp_path):
    write_wav(tmp_path / "r.wav", AudioClip(np.zeros(10), 22050))
    with pytest.raises(DataError, match="22050"):
        read_mono(tmp_path / "r.wav")


@pytest.mark.parametrize("n_sources", [2, 4])
def test_synthetic_data_is_additive_and_deterministic(n_sources):
    a = synth_toy_dataset(7, 2, n_sources, 2.0)
    b = synth_toy_dataset(7, 2, n_sources, 2.0)
    for ta, tb in zip(a, b):
        np.testing.assert_array_equal(ta.mixture.samples, tb.mixture.samples)
        total = sum(c.samples for c in ta.stems.values())
        assert np.max(np.abs(ta.mixture.samples - total)) < 1e-12
        assert np.max(np.abs(ta.mixture.samples)) == pytest.approx(0.9)
    if n_sources == 4:
        assert a[0].additivity_error() < 1e-12
        assert set(a[0].stems) == {"vocals", "drums", "bass", "other"}
    else:
        assert set(a[0].stems) == {"vocals", "accompaniment"}
    with pytest.raises(UsageError):
        synth_toy_dataset(0, 1, 3)
    with pytest.raises(UsageError):
        synth_toy_dataset(0, 1, 2, 1.5)


def test_two_source_accompaniment_is_four_source_instrument_sum():
    two = synth_toy_dataset(3, 1, 2, 2.0)[0]
    four = synth_toy_dataset(3, 1, 4, 2.0)[0]
    acc = four.stem("drums").samples + four.stem("bass").samples + four.stem("other").samples
    np.testing.assert_array_equal(two.stem("accompaniment").samples, acc)


def test_synthetic_sources_occupy_their_bands():
    t = synth_toy_dataset(1, 1, 4, 2.0)[0]
    freqs = np.fft.rfftfreq(2048, 1 / 44100)

    def centroid(src):
        mag = np.abs(stft(t.stem(src))).sum(axis=1)
        return float((freqs * mag).sum() / mag.sum())

    assert centroid("bass") < 150 < 200 < centroid("vocals") < 1100 < centroid("other") < 4500 < centroid("drums")


def test_dataset_round_trip_and_manifest(tmp_path, caplog):
    tracks = synth_toy_dataset(0, 2, 4, 2.0)
    for t in tracks:
        write_track(tmp_path, "train", t)
    write_track(tmp_path, "test", tracks[0])
    (tmp_path / "train" / "broken").mkdir()
    with caplog.at_level(logging.WARNING):
        m = scan_dataset(tmp_path)
    assert [e.name for e in m.tracks("train")] == ["toy000", "toy001"]
    assert m.skipped == [("train", "broken", "missing mixture.wav")]
    assert "both splits" in caplog.text
    assert scan_dataset(tmp_path).to_text() == m.to_text()
    m.write(tmp_path / "manifest.tsv")
    again = DatasetManifest.read(tmp_path / "manifest.tsv")
    assert again.to_text() == m.to_text()
    loaded = load_track(m.tracks("train")[0], ("vocals", "accompaniment"))
    acc = sum(tracks[0].stem(s).samples.astype(np.float32).astype(np.float64) for s in ("drums", "bass", "other"))
    np.testing.assert_allclose(loaded.stem("accompaniment").samples, acc, atol=1e-12)
    with pytest.raises(DataError):
        load_track(m.tracks("train")[0], ("karaoke",))


def test_track_validation():
    mix = AudioClip(np.zeros(10))
    with pytest.raises(DataError):
        TrackStems("t", mix, {"vocals": AudioClip(np.zeros(9))})
    with pytest.raises(DataError):
        TrackStems("t", mix, {"piano": AudioClip(np.zeros(10))})
    with pytest.raises(DataError, match="missing stem"):
        TrackStems("t", mix).stem("vocals")
    with pytest.raises(StorageError):
        scan_dataset("/nonexistent/root")
