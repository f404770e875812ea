"""Waveform <-> spectrogram conversions.

The front end follows the usual separation recipe: mono 44.1 kHz audio cut
into 2 s chunks, a centered Hann STFT (2048 / 512), and a magnitude/phase
split. Reconstruction reuses the mixture phase with the estimated magnitude.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DimensionError, NumericError, SpecError

SAMPLE_RATE = 44100


@dataclass
class AudioClip:
    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if self.sample_rate <= 0:
            raise DataError(f"sample rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise DataError("audio samples must be finite")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self):
        return len(self) / self.sample_rate


@dataclass(frozen=True)
class StftConfig:
    window_size: int = 2048
    hop: int = 512
    center: bool = True

    def __post_init__(self):
        n = self.window_size
        if n < 2 or n & (n - 1):
            raise SpecError(f"window_size must be a power of two >= 2, got {n}")
        if not 1 <= self.hop <= n:
            raise SpecError(f"hop must be in [1, window_size], got {self.hop}")

    @property
    def bins(self):
        return self.window_size // 2 + 1

    def frames(self, n_samples):
        if self.center:
            return 1 + n_samples // self.hop
        return 1 + max(0, n_samples - self.window_size) // self.hop


@dataclass
class SpectrogramPair:
    magnitude: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        if self.magnitude.shape != self.phase.shape:
            raise DimensionError(f"magnitude {self.magnitude.shape} and phase {self.phase.shape} differ")
        if np.any(self.magnitude < 0):
            raise NumericError("magnitude must be non-negative")

    @property
    def shape(self):
        return self.magnitude.shape


def hann(n):
    """Periodic Hann window (the DFT-even variant used for analysis)."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def _samples(clip):
    return clip.samples if isinstance(clip, AudioClip) else np.asarray(clip, dtype=np.float64).reshape(-1)


def downmix_to_mono(left, right):
    if left.sample_rate != right.sample_rate:
        raise DataError(f"channel rates differ: {left.sample_rate} vs {right.sample_rate}")
    if len(left) != len(right):
        raise DataError(f"channel lengths differ: {len(left)} vs {len(right)}")
    return AudioClip(0.5 * (left.samples + right.samples), left.sample_rate)


def segment(clip, seconds=2.0):
    """Cut into consecutive non-overlapping chunks; the tail is zero-padded."""
    size = int(round(seconds * clip.sample_rate))
    if size < 1:
        raise SpecError(f"segment length must be at least one sample, got {seconds} s")
    x = clip.samples
    if x.size == 0:
        raise DataError("cannot segment an empty clip")
    count = -(-x.size // size)
    padded = np.zeros(count * size)
    padded[: x.size] = x
    return [AudioClip(padded[i * size:(i + 1) * size], clip.sample_rate) for i in range(count)]


def stft(clip, cfg=StftConfig()):
    """Complex STFT, shape (window_size // 2 + 1, frames).

    Centered framing reflect-pads window_size // 2 samples on both sides, so a
    signal of L samples yields 1 + L // hop frames.
    """
    x = _samples(clip)
    if x.size < 1:
        raise DataError("stft needs at least one sample")
    n = cfg.window_size
    if cfg.center:
        pad = n // 2
        mode = "reflect" if x.size > 1 else "constant"
        x = np.pad(x, pad, mode=mode)
    if x.size < n:
        x = np.pad(x, (0, n - x.size))
    frames = np.lib.stride_tricks.sliding_window_view(x, n)[:: cfg.hop]
    return np.fft.rfft(frames * hann(n), axis=1).T


def istft(spec, cfg=StftConfig(), out_len=None):
    """Inverse of :func:`stft` by windowed overlap-add.

    The overlap-add is divided by the summed squared window wherever that sum
    exceeds 1e-12; positions with no window support are left at zero.
    """
    spec = np.asarray(spec)
    n, hop = cfg.window_size, cfg.hop
    if spec.ndim != 2 or spec.shape[0] != cfg.bins:
        raise DimensionError(f"spectrogram axis 0 must have {cfg.bins} bins, got shape {spec.shape}")
    n_frames = spec.shape[1]
    win = hann(n)
    frames = np.fft.irfft(spec.T, n=n, axis=1) * win
    total = n + hop * (n_frames - 1)
    y = np.zeros(total)
    wsum = np.zeros(total)
    wsq = win * win
    for t in range(n_frames):
        y[t * hop:t * hop + n] += frames[t]
        wsum[t * hop:t * hop + n] += wsq
    start = n // 2 if cfg.center else 0
    if out_len is None:
        out_len = hop * (n_frames - 1) if cfg.center else total
    y, wsum = y[start:start + out_len], wsum[start:start + out_len]
    ok = wsum > 1e-12
    if y.size and not ok.any():
        raise NumericError("window sum vanishes over the whole output; cannot normalize")
    y[ok] /= wsum[ok]
    y[~ok] = 0.0
    if y.size < out_len:
        y = np.pad(y, (0, out_len - y.size))
    return AudioClip(y)


def magnitude_phase(spec):
    mag = np.abs(spec)
    phase = np.angle(spec)
    phase[mag == 0] = 0.0
    phase[phase <= -np.pi] = np.pi  # keep the range half-open: (-pi, pi]
    return SpectrogramPair(mag, phase)


def combine(magnitude, phase):
    magnitude, phase = np.asarray(magnitude), np.asarray(phase)
    if magnitude.shape != phase.shape:
        raise DimensionError(f"magnitude {magnitude.shape} and phase {phase.shape} differ")
    return magnitude * np.exp(1j * phase)


def reconstruct(estimated_mag, mixture_phase, cfg=StftConfig(), out_len=None, sample_rate=SAMPLE_RATE):
    """Waveform from an estimated magnitude and the mixture's phase."""
    estimated_mag = np.asarray(estimated_mag)
    if estimated_mag.shape != np.shape(mixture_phase):
        raise DimensionError(
            f"estimated magnitude {estimated_mag.shape} and mixture phase {np.shape(mixture_phase)} differ"
        )
    clip = istft(combine(estimated_mag, mixture_phase), cfg, out_len)
    clip.sample_rate = sample_rate
    return clip


def snr_db(reference, estimate):
    """Plain SNR, used by round-trip checks."""
    ref, est = _samples(reference), _samples(estimate)
    err = np.sum((ref - est) ** 2)
    if err == 0:
        return np.inf
    return 10.0 * np.log10(np.sum(ref ** 2) / err)
