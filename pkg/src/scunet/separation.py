"""Windowed separation: mixture waveform -> one waveform per source.

A separator maps a mixture magnitude spectrogram (bins x frames, raw STFT
units) to per-source magnitudes; each estimate is resynthesized with the
mixture phase. Long inputs are processed in independent fixed-length windows.
"""
from __future__ import annotations

import numpy as np

from .dsp import AudioClip, StftConfig, magnitude_phase, reconstruct, stft
from .errors import DataError, DimensionError
from .model import prepare_input, restore_output
from .training import residual_subtract

WINDOW_SECONDS = 20.0


class ModelSeparator:
    """Runs a trained U-Net in eval mode; handles scaling and bin/frame padding."""

    def __init__(self, model, sources, stft_cfg=StftConfig()):
        if model.cfg.out_channels != len(sources):
            raise DimensionError(f"model emits {model.cfg.out_channels} channels for sources {tuple(sources)}")
        self.model, self.sources, self.stft_cfg = model, tuple(sources), stft_cfg

    def magnitudes(self, mix_mag, start, stop):
        scale = self.model.cfg.input_scale
        bins, frames = mix_mag.shape
        x = prepare_input((mix_mag * scale).astype(self.model.dtype), self.model.cfg)
        out = restore_output(self.model.predict(x), frames, bins)[0]
        return out.astype(np.float64) / scale


class OracleSeparator:
    """Returns the true source magnitudes: the upper bound of mixture-phase resynthesis."""

    def __init__(self, track, sources, stft_cfg=StftConfig()):
        self.track, self.sources, self.stft_cfg = track, tuple(sources), stft_cfg

    def magnitudes(self, mix_mag, start, stop):
        return np.stack([
            np.abs(stft(self.track.stem(s).samples[start:stop], self.stft_cfg)) for s in self.sources
        ])


class ZeroSeparator:
    def __init__(self, sources):
        self.sources = tuple(sources)

    def magnitudes(self, mix_mag, start, stop):
        return np.zeros((len(self.sources),) + mix_mag.shape)


def window_bounds(n_samples, sample_rate, window_s=WINDOW_SECONDS):
    size = int(round(window_s * sample_rate))
    if size < 1:
        raise DataError(f"window of {window_s} s is shorter than one sample")
    return [(s, min(s + size, n_samples)) for s in range(0, n_samples, size)]


def separate_window(separator, segment, start, stop, stft_cfg=StftConfig(), residual=None):
    """Estimate every source of one window; returns {source: AudioClip}."""
    pair = magnitude_phase(stft(segment, stft_cfg))
    mags = separator.magnitudes(pair.magnitude, start, stop)
    est = {
        src: reconstruct(np.maximum(mags[i], 0.0), pair.phase, stft_cfg, len(segment), segment.sample_rate)
        for i, src in enumerate(separator.sources)
    }
    if residual is not None:
        derived, base = residual
        est[derived] = residual_subtract(segment, est[base])
    return est


def separate(separator, mixture, stft_cfg=StftConfig(), residual=None, window_s=WINDOW_SECONDS):
    """Separate a whole clip window by window and stitch the windows back together."""
    parts = {s: [] for s in separator.sources}
    for start, stop in window_bounds(len(mixture), mixture.sample_rate, window_s):
        seg = AudioClip(mixture.samples[start:stop], mixture.sample_rate)
        for src, clip in separate_window(separator, seg, start, stop, stft_cfg, residual).items():
            parts[src].append(clip.samples)
    return {s: AudioClip(np.concatenate(p), mixture.sample_rate) for s, p in parts.items()}
