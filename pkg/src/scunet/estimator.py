"""scikit-learn style wrapper around the training and separation pipeline."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .data import TrackStems
from .dsp import SAMPLE_RATE, AudioClip, StftConfig, magnitude_phase, stft
from .errors import ConfigError
from .evaluation import EvalConfig, aggregate, evaluate_track
from .model import UNetConfig, build_unet
from .separation import ModelSeparator, separate
from .training import PRESETS, TrainConfig, build_chunks, compute_balancing_weights, train
from .validation import check_stems, check_waveforms


class SpectrogramChannelsSeparator(BaseEstimator):
    """Multi-channel U-Net source separator.

    ``fit(X, Y)`` takes mixtures X of shape (clips, samples) and stems Y of
    shape (clips, sources, samples) ordered as the preset's sources.
    ``predict`` returns separated waveforms, ``transform`` the estimated
    magnitude spectrograms, and ``score`` the median per-second SDR averaged
    over sources.
    """

    def __init__(
        self,
        preset="M3",
        depth=5,
        base_channels=16,
        convs_per_block=2,
        dropout=0.4,
        input_scale=0.25,
        batch_size=8,
        epochs=(20, 20),
        learning_rates=(1e-3, 1e-4),
        weight_decay=1e-6,
        max_steps=None,
        balance=False,
        seed=0,
        sample_rate=SAMPLE_RATE,
        window_size=2048,
        hop=512,
    ):
        self.preset = preset
        self.depth = depth
        self.base_channels = base_channels
        self.convs_per_block = convs_per_block
        self.dropout = dropout
        self.input_scale = input_scale
        self.batch_size = batch_size
        self.epochs = epochs
        self.learning_rates = learning_rates
        self.weight_decay = weight_decay
        self.max_steps = max_steps
        self.balance = balance
        self.seed = seed
        self.sample_rate = sample_rate
        self.window_size = window_size
        self.hop = hop

    def _preset(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {sorted(PRESETS)}")
        return PRESETS[self.preset]

    def _stft(self):
        return StftConfig(self.window_size, self.hop)

    def fit(self, X, Y):
        preset = self._preset()
        X = check_waveforms(X)
        Y = check_stems(Y, X.shape[0], len(preset.sources), X.shape[1])
        if len(self.epochs) != len(self.learning_rates):
            raise ConfigError("epochs and learning_rates must have the same length")
        tracks = [
            TrackStems(
                f"clip{i}",
                AudioClip(X[i], self.sample_rate),
                {s: AudioClip(Y[i, k], self.sample_rate) for k, s in enumerate(preset.sources)},
            )
            for i in range(X.shape[0])
        ]
        weights = compute_balancing_weights(tracks, preset.sources) if self.balance else preset.weights
        cfg = UNetConfig(
            depth=self.depth,
            base_channels=self.base_channels,
            out_channels=len(preset.sources),
            dropout_p=self.dropout,
            convs_per_block=self.convs_per_block,
            input_scale=self.input_scale,
        )
        model = build_unet(cfg, seed=self.seed)
        tcfg = TrainConfig(
            batch_size=self.batch_size,
            phases=tuple(zip(self.epochs, self.learning_rates)),
            weight_decay=self.weight_decay,
            seed=self.seed,
            preset=self.preset,
            max_steps=self.max_steps,
        )
        result = train(build_chunks(tracks, preset.sources, self._stft()), model, tcfg, weights)
        self.model_ = model
        self.weights_ = weights
        self.sources_ = preset.sources
        self.loss_trace_ = result.trace
        self.n_samples_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Estimated magnitude spectrograms, shape (clips, sources, bins, frames)."""
        check_is_fitted(self, "model_")
        X = check_waveforms(X)
        sep = ModelSeparator(self.model_, self.sources_, self._stft())
        out = []
        for x in X:
            mag = magnitude_phase(stft(x, self._stft())).magnitude
            out.append(sep.magnitudes(mag, 0, x.size))
        return np.stack(out)

    def predict(self, X):
        """Separated waveforms, shape (clips, sources, samples)."""
        check_is_fitted(self, "model_")
        X = check_waveforms(X)
        sep = ModelSeparator(self.model_, self.sources_, self._stft())
        residual = self._preset().residual
        out = []
        for x in X:
            est = separate(sep, AudioClip(x, self.sample_rate), self._stft(), residual)
            out.append(np.stack([est[s].samples for s in self.sources_]))
        return np.stack(out)

    def score(self, X, Y):
        """Mean over sources of the median per-second SDR (dB)."""
        check_is_fitted(self, "model_")
        X = check_waveforms(X)
        Y = check_stems(Y, X.shape[0], len(self.sources_), X.shape[1])
        cfg = EvalConfig(self.sources_, self._preset().residual, self._stft())
        pooled = {s: [] for s in self.sources_}
        for i in range(X.shape[0]):
            track = TrackStems(
                f"clip{i}",
                AudioClip(X[i], self.sample_rate),
                {s: AudioClip(Y[i, k], self.sample_rate) for k, s in enumerate(self.sources_)},
            )
            scores = evaluate_track(self.model_, track, cfg)
            for s in self.sources_:
                pooled[s] += scores.values[s]
        return float(np.mean([aggregate(pooled[s]).median for s in self.sources_]))
