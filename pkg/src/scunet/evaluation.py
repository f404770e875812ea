"""SDR, the windowed per-second evaluation protocol, and report rendering."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dsp import AudioClip, StftConfig
from .errors import DataError, DimensionError, StorageError, UndefinedReferenceError, UsageError
from .separation import WINDOW_SECONDS, ModelSeparator, separate_window, window_bounds

CAP_DB = 100.0
STAT_LABELS = (("median", "Med."), ("mad", "MAD"), ("mean", "Mean"), ("sd", "SD"))


@dataclass(frozen=True)
class SdrResult:
    value_db: float
    target_energy: float
    error_energy: float

    @property
    def capped_db(self):
        return float(np.clip(self.value_db, -CAP_DB, CAP_DB))

    @property
    def is_capped(self):
        return not -CAP_DB < self.value_db < CAP_DB


def _samples(x):
    return x.samples if isinstance(x, AudioClip) else np.asarray(x, dtype=np.float64).reshape(-1)


def sdr(estimate, reference):
    """SDR with a time-invariant gain as the only allowed distortion.

    s_target is the projection of the estimate onto the reference and
    e = estimate - s_target. An all-zero estimate scores -inf.
    """
    est, ref = _samples(estimate), _samples(reference)
    if est.shape != ref.shape:
        raise DimensionError(f"estimate has {est.size} samples, reference {ref.size}")
    ref_energy = float(np.dot(ref, ref))
    if ref_energy == 0.0:
        raise UndefinedReferenceError("SDR is undefined for an all-zero reference")
    if not np.any(est):
        return SdrResult(-math.inf, 0.0, 0.0)
    target = (float(np.dot(est, ref)) / ref_energy) * ref
    err = est - target
    t_e, e_e = float(np.dot(target, target)), float(np.dot(err, err))
    if e_e == 0.0:
        return SdrResult(math.inf, t_e, 0.0)
    if t_e == 0.0:
        return SdrResult(-math.inf, 0.0, e_e)
    return SdrResult(10.0 * math.log10(t_e / e_e), t_e, e_e)


@dataclass
class EvalConfig:
    sources: tuple
    residual: tuple = None
    stft: StftConfig = field(default_factory=StftConfig)
    window_s: float = WINDOW_SECONDS
    slice_s: float = 1.0


@dataclass
class TrackScores:
    """Per-second SDR values (capped to +-100 dB) for each source of one track."""

    name: str
    values: dict
    skipped: dict
    capped: dict


def evaluate_track(model, track, cfg):
    """Score one track: separate in windows, then SDR on each aligned 1 s slice.

    `model` is a UNetModel or any object with ``sources`` and
    ``magnitudes(mix_mag, start, stop)``. Slices whose reference is silent are
    skipped and counted; a trailing partial slice is dropped.
    """
    sources = tuple(cfg.sources)
    sep = ModelSeparator(model, sources, cfg.stft) if hasattr(model, "layers") else model
    if tuple(sep.sources) != sources:
        raise DimensionError(f"separator emits {tuple(sep.sources)}, evaluation expects {sources}")
    rate = track.sample_rate
    if len(track) < cfg.slice_s * rate:
        raise DataError(f"track {track.name} is shorter than one {cfg.slice_s} s slice")
    refs = {s: track.stem(s).samples for s in sources}
    width = int(round(cfg.slice_s * rate))
    values = {s: [] for s in sources}
    skipped = dict.fromkeys(sources, 0)
    capped = dict.fromkeys(sources, 0)
    for start, stop in window_bounds(len(track), rate, cfg.window_s):
        seg = AudioClip(track.mixture.samples[start:stop], rate)
        est = separate_window(sep, seg, start, stop, cfg.stft, cfg.residual)
        for k in range((stop - start) // width):
            a, b = k * width, (k + 1) * width
            for s in sources:
                ref = refs[s][start + a:start + b]
                if not np.any(ref):
                    skipped[s] += 1
                    continue
                r = sdr(est[s].samples[a:b], ref)
                capped[s] += r.is_capped
                values[s].append(r.capped_db)
    return TrackScores(track.name, values, skipped, capped)


@dataclass(frozen=True)
class SdrStats:
    median: float
    mad: float
    mean: float
    sd: float
    count: int = 0
    capped: int = 0


def aggregate(values):
    """Median (midpoint for even counts), MAD about the median, mean, population SD.

    Infinite values are clipped to +-100 dB and counted in ``capped``.
    """
    x = np.asarray(list(values), dtype=np.float64)
    if x.size == 0:
        raise UsageError("cannot aggregate an empty list of SDR values")
    if np.isnan(x).any():
        raise UsageError("SDR values contain NaN")
    capped = int(np.sum(np.abs(x) >= CAP_DB))
    x = np.clip(x, -CAP_DB, CAP_DB)
    med = float(np.median(x))
    return SdrStats(med, float(np.median(np.abs(x - med))), float(np.mean(x)), float(np.std(x)), int(x.size), capped)


@dataclass
class EvalReport:
    tracks: list
    stats: dict

    @property
    def sources(self):
        return tuple(self.stats)

    def pooled(self, source):
        return [v for t in self.tracks for v in t.values[source]]

    def skipped(self, source):
        return sum(t.skipped[source] for t in self.tracks)


def evaluate_dataset(make_separator, tracks, cfg, jobs=1):
    """Evaluate tracks (in parallel threads when jobs > 1) and pool every second."""
    if not tracks:
        raise DataError("no tracks to evaluate")
    if jobs < 1:
        raise UsageError(f"jobs must be >= 1, got {jobs}")

    def one(track):
        return evaluate_track(make_separator(track), track, cfg)

    if jobs == 1:
        scores = [one(t) for t in tracks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(one, tracks))
    stats = {}
    for s in cfg.sources:
        pooled = [v for t in scores for v in t.values[s]]
        if not pooled:
            raise DataError(f"source {s!r}: every evaluated second has a silent reference")
        stats[s] = aggregate(pooled)
    return EvalReport(scores, stats)


def render_table(stats, skipped=None):
    sources = list(stats)
    width = max(8, *(len(s) for s in sources))
    lines = [" " * 6 + "".join(f"{s:>{width + 2}}" for s in sources)]
    for attr, label in STAT_LABELS:
        lines.append(f"{label:<6}" + "".join(f"{getattr(stats[s], attr):>{width + 2}.2f}" for s in sources))
    lines.append("capped: " + ", ".join(f"{s} {stats[s].capped}" for s in sources))
    if skipped is not None:
        lines.append("skipped (silent reference): " + ", ".join(f"{s} {skipped.get(s, 0)}" for s in sources))
    return "\n".join(lines) + "\n"


def emit_report(stats, path, skipped=None):
    """Write ``path`` as CSV (source,stat,value) and ``path`` with .txt as a table.

    Values use two decimals, so output bytes depend only on the statistics.
    """
    path = Path(path)
    rows = ["source,stat,value"]
    for s, st in stats.items():
        rows += [f"{s},{label},{getattr(st, attr):.2f}" for attr, label in STAT_LABELS]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(rows) + "\n")
        path.with_suffix(".txt").write_text(render_table(stats, skipped))
    except OSError as exc:
        raise StorageError(f"cannot write report {path}: {exc.strerror or exc}") from exc
    return path
