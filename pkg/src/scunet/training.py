"""Balancing weights, the weighted loss, presets and the training loop."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .checkpoint import save_checkpoint
from .dsp import AudioClip, StftConfig, segment, stft
from .errors import ConfigError, DataError, DegenerateSourceError, DimensionError, NumericError, StorageError
from .functional import weighted_l1
from .model import prepare_input
from .optim import AdamState, adam_step
from .tensor import Tensor

TWO_SOURCES = ("vocals", "accompaniment")
FOUR_SOURCES = ("vocals", "drums", "bass", "other")


@dataclass(frozen=True)
class LossWeights:
    sources: tuple
    alpha: tuple

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if len(self.sources) != len(self.alpha) or not self.sources:
            raise ConfigError(f"{len(self.sources)} sources but {len(self.alpha)} weights")
        if len(set(self.sources)) != len(self.sources):
            raise ConfigError(f"duplicate source names in {self.sources}")
        if any(a < 0 or not math.isfinite(a) for a in self.alpha):
            raise ConfigError(f"weights must be finite and non-negative, got {self.alpha}")
        if abs(math.fsum(self.alpha) - 1.0) > 1e-9:
            raise ConfigError(f"weights must sum to 1, got {math.fsum(self.alpha)!r}")


@dataclass(frozen=True)
class Preset:
    """A named loss weighting; `residual` = (derived source, estimated source) or None.

    With a residual, the derived source is rebuilt at inference as
    mixture - estimate(estimated source) in the waveform domain.
    """

    name: str
    weights: LossWeights
    residual: tuple = None

    @property
    def sources(self):
        return self.weights.sources


PRESETS = {
    "M1": Preset("M1", LossWeights(TWO_SOURCES, (1.0, 0.0)), ("accompaniment", "vocals")),
    "M2": Preset("M2", LossWeights(TWO_SOURCES, (0.0, 1.0)), ("vocals", "accompaniment")),
    "M3": Preset("M3", LossWeights(TWO_SOURCES, (0.5, 0.5))),
    "M4": Preset("M4", LossWeights(TWO_SOURCES, (0.707, 0.293))),
    "M5": Preset("M5", LossWeights(FOUR_SOURCES, (0.25, 0.25, 0.25, 0.25))),
    "M6": Preset("M6", LossWeights(FOUR_SOURCES, (0.297, 0.262, 0.232, 0.209))),
}


def sources_for(count):
    if count == 2:
        return TWO_SOURCES
    if count == 4:
        return FOUR_SOURCES
    raise ConfigError(f"number of sources must be 2 or 4, got {count}")


def source_norms(tracks, sources, seconds=2.0):
    """Mean Euclidean norm of each source over its `seconds`-long waveform chunks."""
    if not tracks:
        raise ConfigError("cannot compute source norms of an empty dataset")
    norms = []
    for src in sources:
        chunk_norms = [np.linalg.norm(c.samples) for t in tracks for c in segment(t.stem(src), seconds)]
        norms.append(float(np.mean(chunk_norms)))
    return norms


def compute_balancing_weights(tracks, sources, seconds=2.0):
    """alpha_i proportional to 1 / (mean chunk norm of source i), normalized to sum to 1."""
    sources = tuple(sources)
    norms = source_norms(tracks, sources, seconds)
    for src, n in zip(sources, norms):
        if not n > 0:
            raise DegenerateSourceError(f"source {src!r} has zero mean norm; its weight is undefined")
    inv = [1.0 / n for n in norms]
    total = math.fsum(inv)
    return LossWeights(sources, tuple(v / total for v in inv))


def weighted_loss(outputs, targets, w):
    """sum_i alpha_i * l1_loss(outputs[:, i], targets[:, i])."""
    if outputs.ndim < 2 or outputs.shape[1] != len(w.alpha):
        raise DimensionError(
            f"outputs axis 1 has {outputs.shape[1] if outputs.ndim > 1 else None} channels, "
            f"weights cover {len(w.alpha)} sources"
        )
    return weighted_l1(outputs, targets, w.alpha)


def residual_subtract(mixture, estimate):
    if len(mixture) != len(estimate):
        raise DataError(f"residual_subtract: mixture has {len(mixture)} samples, estimate {len(estimate)}")
    if mixture.sample_rate != estimate.sample_rate:
        raise DataError(
            f"residual_subtract: sample rates differ ({mixture.sample_rate} vs {estimate.sample_rate})"
        )
    return AudioClip(mixture.samples - estimate.samples, mixture.sample_rate)


# --- training data --------------------------------------------------------------
@dataclass
class ChunkSet:
    """Raw STFT magnitudes: mixture (N, bins, frames), targets (N, C, bins, frames)."""

    mixture: np.ndarray
    targets: np.ndarray
    sources: tuple

    def __post_init__(self):
        if self.mixture.ndim != 3 or self.targets.ndim != 4:
            raise DimensionError(
                f"expected mixture (N, bins, frames) and targets (N, C, bins, frames), "
                f"got {self.mixture.shape} and {self.targets.shape}"
            )
        if self.targets.shape[0] != self.mixture.shape[0] or self.targets.shape[2:] != self.mixture.shape[1:]:
            raise DimensionError(f"targets {self.targets.shape} do not match mixture {self.mixture.shape}")
        if self.targets.shape[1] != len(self.sources):
            raise DimensionError(f"targets axis 1 has {self.targets.shape[1]} channels for sources {self.sources}")

    def __len__(self):
        return self.mixture.shape[0]

    @property
    def frames(self):
        return self.mixture.shape[2]


def build_chunks(tracks, sources, stft_cfg=StftConfig(), seconds=2.0, dtype=np.float32):
    """Cut every track into `seconds` chunks and take their STFT magnitudes."""
    sources = tuple(sources)
    mix, tgt = [], []
    for t in tracks:
        stems = [segment(t.stem(s), seconds) for s in sources]
        for k, chunk in enumerate(segment(t.mixture, seconds)):
            mix.append(np.abs(stft(chunk, stft_cfg)))
            tgt.append(np.stack([np.abs(stft(st[k], stft_cfg)) for st in stems]))
    if not mix:
        raise ConfigError("dataset produced no training chunks")
    return ChunkSet(np.asarray(mix, dtype=dtype), np.asarray(tgt, dtype=dtype), sources)


# --- loop -----------------------------------------------------------------------
@dataclass
class TrainConfig:
    batch_size: int = 8
    phases: tuple = ((20, 1e-3), (20, 1e-4))
    weight_decay: float = 1e-6
    seed: int = 0
    preset: str = "M3"
    max_steps: int = None
    stop_ratio: float = None
    checkpoint_every_epoch: bool = True

    def __post_init__(self):
        self.phases = tuple((int(e), float(lr)) for e, lr in self.phases)
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.phases:
            raise ConfigError("at least one training phase is required")
        for epochs, lr in self.phases:
            if epochs < 0:
                raise ConfigError(f"epoch counts must be >= 0, got {epochs}")
            if not lr > 0:
                raise ConfigError(f"learning rates must be positive, got {lr}")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.stop_ratio is not None and not 0 < self.stop_ratio < 1:
            raise ConfigError(f"stop_ratio must be in (0, 1), got {self.stop_ratio}")


@dataclass
class TrainResult:
    trace: list = field(default_factory=list)  # (step, loss, lr)
    checkpoints: list = field(default_factory=list)
    optimizer: AdamState = None

    @property
    def losses(self):
        return [loss for _, loss, _ in self.trace]


def format_trace_line(step, loss, lr):
    return f"{step} {loss!r} {lr!r}\n"


def read_trace(path):
    out = []
    for line in Path(path).read_text().splitlines():
        step, loss, lr = line.split()
        out.append((int(step), float(loss), float(lr)))
    return out


def train(chunks, model, cfg, weights, out_dir=None, optimizer=None, meta=None):
    """Two-phase Adam training over shuffled mini-batches of `chunks`.

    Writes ``loss_trace.txt`` (one "step loss lr" line per step) and, when
    enabled, ``epoch-NNN.ckpt`` after each epoch into `out_dir`.
    """
    if len(chunks) == 0:
        raise ConfigError("training set is empty")
    mcfg = model.cfg
    if tuple(weights.sources) != tuple(chunks.sources):
        raise ConfigError(f"weights cover {weights.sources}, chunks hold {chunks.sources}")
    if mcfg.out_channels != len(weights.alpha):
        raise ConfigError(f"model emits {mcfg.out_channels} channels, weights cover {len(weights.alpha)} sources")

    dtype = model.dtype
    scale = mcfg.input_scale
    x_all = prepare_input(chunks.mixture * scale, mcfg).astype(dtype, copy=False)
    bins, frames = mcfg.input_bins, chunks.frames
    y_all = np.ascontiguousarray(chunks.targets[:, :, :bins, :] * scale, dtype=dtype)
    rng = np.random.default_rng(cfg.seed)
    opt = optimizer or AdamState(learning_rate=cfg.phases[0][1], weight_decay=cfg.weight_decay)
    result = TrainResult(optimizer=opt)
    out_dir = Path(out_dir) if out_dir is not None else None
    trace_file = None
    if out_dir is not None:
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            trace_file = open(out_dir / "loss_trace.txt", "w")
        except OSError as exc:
            raise StorageError(f"cannot write into {out_dir}: {exc.strerror or exc}") from exc
    params = model.parameters()
    n = len(chunks)
    step = 0
    epoch = 0
    first = None
    try:
        for epochs, lr in cfg.phases:
            opt.learning_rate = lr
            for _ in range(epochs):
                epoch += 1
                order = rng.permutation(n)
                for start in range(0, n, cfg.batch_size):
                    idx = np.sort(order[start:start + cfg.batch_size])
                    out = model.forward(Tensor(x_all[idx]), mode="train", rng=rng)
                    if out.shape[3] != frames:
                        out = out[:, :, :, :frames]
                    loss = weighted_loss(out, y_all[idx], weights)
                    value = float(loss.data)
                    step += 1
                    if not math.isfinite(value):
                        raise NumericError(f"non-finite loss {value} at step {step} (epoch {epoch})")
                    loss.backward()
                    adam_step(params, [p.grad for p in params], opt)
                    result.trace.append((step, value, lr))
                    if trace_file is not None:
                        trace_file.write(format_trace_line(step, value, lr))
                        trace_file.flush()
                    first = value if first is None else first
                    if cfg.max_steps is not None and step >= cfg.max_steps:
                        break
                    if cfg.stop_ratio is not None and value <= cfg.stop_ratio * first:
                        break
                else:
                    if out_dir is not None and cfg.checkpoint_every_epoch:
                        path = out_dir / f"epoch-{epoch:03d}.ckpt"
                        save_checkpoint(model, opt, path, meta)
                        result.checkpoints.append(path)
                    continue
                break
            else:
                continue
            break
    finally:
        if trace_file is not None:
            trace_file.close()
    if out_dir is not None:
        path = out_dir / "final.ckpt"
        save_checkpoint(model, opt, path, meta)
        result.checkpoints.append(path)
    return result
