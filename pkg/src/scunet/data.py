"""Stem datasets on disk, WAV I/O and the synthetic toy generator.

On-disk layout: ``<root>/<split>/<track>/<stem>.wav`` with split in
{train, test} and stem in {mixture, vocals, drums, bass, other, accompaniment}.
"""
from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dsp import SAMPLE_RATE, AudioClip
from .errors import DataError, FormatError, StorageError, UsageError

log = logging.getLogger(__name__)

SPLITS = ("train", "test")
SOURCES = ("vocals", "drums", "bass", "other", "accompaniment")
INSTRUMENTS = ("drums", "bass", "other")
STEM_FILES = ("mixture",) + SOURCES

_PCM, _FLOAT, _EXTENSIBLE = 0x0001, 0x0003, 0xFFFE


# --- WAV ----------------------------------------------------------------------
def _read_bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise StorageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _chunks(buf, path):
    """Yield (chunk id, payload) pairs of a RIFF/WAVE byte string."""
    if len(buf) < 12 or buf[:4] != b"RIFF" or buf[8:12] != b"WAVE":
        raise FormatError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    while pos + 8 <= len(buf):
        cid, size = struct.unpack_from("<4sI", buf, pos)
        pos += 8
        if pos + size > len(buf):
            raise FormatError(f"{path}: truncated {cid.decode('latin-1')!r} chunk ({size} bytes declared, {len(buf) - pos} present)")
        yield cid, buf[pos:pos + size]
        pos += size + (size & 1)


def read_wav(path):
    """Decode a WAV file into one AudioClip per channel.

    Supports PCM 16/24-bit and 32-bit float (plain or WAVE_FORMAT_EXTENSIBLE).
    Integer samples are divided by 2**(bits - 1), so -32768 maps to -1.0.
    """
    buf = _read_bytes(path)
    fmt = data = None
    for cid, payload in _chunks(buf, path):
        if cid == b"fmt ":
            fmt = payload
        elif cid == b"data":
            data = payload
    if fmt is None or len(fmt) < 16:
        raise FormatError(f"{path}: missing or short fmt chunk")
    if data is None:
        raise FormatError(f"{path}: missing data chunk")
    tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", fmt)
    if tag == _EXTENSIBLE:
        if len(fmt) < 26:
            raise FormatError(f"{path}: extensible fmt chunk too short")
        tag = struct.unpack_from("<H", fmt, 24)[0]
    if channels < 1 or rate < 1:
        raise FormatError(f"{path}: invalid header ({channels} channels at {rate} Hz)")
    if (tag, bits) not in ((_PCM, 16), (_PCM, 24), (_FLOAT, 32)):
        raise FormatError(f"{path}: unsupported WAV codec tag 0x{tag:04X} with {bits}-bit samples")
    width = bits // 8
    if block_align != width * channels:
        raise FormatError(f"{path}: block align {block_align} does not match {channels} x {bits}-bit")
    frames = len(data) // block_align
    raw = data[: frames * block_align]
    if tag == _FLOAT:
        x = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    elif bits == 16:
        x = np.frombuffer(raw, dtype="<i2") / 32768.0
    else:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3)
        wide = np.zeros((b.shape[0], 4), dtype=np.uint8)
        wide[:, 1:] = b
        x = (wide.view("<i4").reshape(-1) >> 8) / 8388608.0
    x = x.reshape(frames, channels)
    return [AudioClip(x[:, c].copy(), rate) for c in range(channels)]


def write_wav(path, clip):
    """Write a mono 32-bit float WAV (samples are rounded to float32)."""
    data = np.asarray(clip.samples, dtype="<f4").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(data), b"WAVE",
        b"fmt ", 16, _FLOAT, 1, clip.sample_rate, clip.sample_rate * 4, 4, 32,
        b"data", len(data),
    )
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(header + data)
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_mono(path, sample_rate=SAMPLE_RATE):
    """Read a WAV, average its channels, and insist on `sample_rate`."""
    chans = read_wav(path)
    rate = chans[0].sample_rate
    if sample_rate is not None and rate != sample_rate:
        raise DataError(f"{path}: sample rate {rate} Hz, expected {sample_rate} Hz (no resampling)")
    if len(chans) == 1:
        return chans[0]
    return AudioClip(np.mean([c.samples for c in chans], axis=0), rate)


# --- tracks -------------------------------------------------------------------
@dataclass
class TrackStems:
    name: str
    mixture: AudioClip
    stems: dict = field(default_factory=dict)

    def __post_init__(self):
        n, rate = len(self.mixture), self.mixture.sample_rate
        for src, clip in self.stems.items():
            if src not in SOURCES:
                raise DataError(f"track {self.name}: unknown stem {src!r}")
            if len(clip) != n or clip.sample_rate != rate:
                raise DataError(
                    f"track {self.name}: stem {src} has {len(clip)} samples at {clip.sample_rate} Hz, "
                    f"mixture has {n} at {rate} Hz"
                )

    @property
    def sample_rate(self):
        return self.mixture.sample_rate

    def __len__(self):
        return len(self.mixture)

    def stem(self, source):
        try:
            return self.stems[source]
        except KeyError:
            raise DataError(f"track {self.name}: missing stem {source!r}") from None

    def additivity_error(self):
        """max |mixture - (vocals + drums + bass + other)|, or None without all four stems."""
        if not all(s in self.stems for s in ("vocals",) + INSTRUMENTS):
            return None
        acc = self.stems["drums"].samples + self.stems["bass"].samples + self.stems["other"].samples
        return float(np.max(np.abs(self.mixture.samples - (self.stems["vocals"].samples + acc)), initial=0.0))


@dataclass(frozen=True)
class TrackEntry:
    split: str
    name: str
    path: Path
    stems: tuple

    def file(self, stem):
        return self.path / f"{stem}.wav"


@dataclass
class DatasetManifest:
    root: Path
    entries: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def tracks(self, split):
        if split not in SPLITS:
            raise UsageError(f"split must be one of {SPLITS}, got {split!r}")
        return [e for e in self.entries if e.split == split]

    def to_text(self):
        return "".join(f"{e.split}\t{e.name}\t{','.join(e.stems)}\n" for e in self.entries)

    def write(self, path):
        try:
            Path(path).write_text(self.to_text())
        except OSError as exc:
            raise StorageError(f"cannot write manifest {path}: {exc.strerror or exc}") from exc

    @classmethod
    def read(cls, path, root=None):
        path = Path(path)
        root = Path(root) if root is not None else path.parent
        try:
            lines = path.read_text().splitlines()
        except OSError as exc:
            raise StorageError(f"cannot read manifest {path}: {exc.strerror or exc}") from exc
        entries = []
        for i, line in enumerate(lines, 1):
            parts = line.split("\t")
            if len(parts) != 3 or parts[0] not in SPLITS:
                raise FormatError(f"{path}:{i}: expected 'split<TAB>track<TAB>stems', got {line!r}")
            split, name, stems = parts
            entries.append(TrackEntry(split, name, root / split / name, tuple(s for s in stems.split(",") if s)))
        return cls(root, entries)


def scan_dataset(root):
    """Index ``<root>/<split>/<track>/*.wav``; tracks without mixture.wav are skipped."""
    root = Path(root)
    if not root.is_dir():
        raise StorageError(f"dataset root {root} is not a readable directory")
    manifest = DatasetManifest(root)
    for split in SPLITS:
        split_dir = root / split
        if not split_dir.is_dir():
            continue
        for track in sorted(p for p in split_dir.iterdir() if p.is_dir()):
            present = tuple(s for s in SOURCES if (track / f"{s}.wav").is_file())
            if not (track / "mixture.wav").is_file():
                manifest.skipped.append((split, track.name, "missing mixture.wav"))
                log.warning("skipping %s/%s: missing mixture.wav", split, track.name)
                continue
            manifest.entries.append(TrackEntry(split, track.name, track, present))
    names = {s: {e.name for e in manifest.entries if e.split == s} for s in SPLITS}
    overlap = names["train"] & names["test"]
    if overlap:
        log.warning("track names present in both splits: %s", ", ".join(sorted(overlap)))
    if not manifest.entries:
        log.warning("no tracks found under %s", root)
    return manifest


def load_track(entry, sources=None, sample_rate=SAMPLE_RATE):
    """Load the mixture and the requested stems (all available ones by default).

    A missing accompaniment.wav is rebuilt as drums + bass + other when those
    three stems exist.
    """
    wanted = tuple(entry.stems) if sources is None else tuple(sources)
    mixture = read_mono(entry.file("mixture"), sample_rate)
    stems = {}
    for src in wanted:
        if src in entry.stems:
            stems[src] = read_mono(entry.file(src), sample_rate)
        elif src == "accompaniment" and all(s in entry.stems for s in INSTRUMENTS):
            parts = [read_mono(entry.file(s), sample_rate).samples for s in INSTRUMENTS]
            stems[src] = AudioClip(parts[0] + parts[1] + parts[2], sample_rate)
        else:
            raise DataError(f"track {entry.split}/{entry.name}: missing stem {src!r}")
    return TrackStems(entry.name, mixture, stems)


def write_track(root, split, track):
    """Write a TrackStems in the folder layout; returns the track directory."""
    d = Path(root) / split / track.name
    write_wav(d / "mixture.wav", track.mixture)
    for src, clip in track.stems.items():
        write_wav(d / f"{src}.wav", clip)
    return d


# --- synthetic toy data ---------------------------------------------------------
def _band_noise(rng, n, sr, bands):
    """White noise shaped in the frequency domain by Gaussian bumps at (centre, width) Hz."""
    spec = np.fft.rfft(rng.standard_normal(n))
    f = np.fft.rfftfreq(n, 1.0 / sr)
    gain = np.zeros_like(f)
    for centre, width in bands:
        gain += np.exp(-0.5 * ((f - centre) / width) ** 2)
    y = np.fft.irfft(spec * gain, n)
    return y / (np.max(np.abs(y)) + 1e-12)


def _vocals(rng, t, sr):
    # deep vibrato makes each partial sweep across several STFT bins
    out = np.zeros_like(t)
    for _ in range(int(rng.integers(2, 5))):
        f = rng.uniform(250.0, 950.0)
        rate, depth = rng.uniform(4.0, 7.0), 0.04
        phase = 2 * np.pi * f * (t + depth * (1 - np.cos(2 * np.pi * rate * t)) / (2 * np.pi * rate))
        out += rng.uniform(0.1, 0.3) * np.sin(phase + rng.uniform(0, 2 * np.pi))
    envelope = 0.75 + 0.25 * np.sin(2 * np.pi * rng.uniform(0.3, 0.8) * t + rng.uniform(0, 2 * np.pi))
    return out * envelope


def _drums(rng, t, sr):
    n = t.size
    hits = np.zeros(n)
    step = int(0.25 * sr)
    decay = np.exp(-np.arange(step) / (0.03 * sr))
    for start in range(0, n, step):
        if rng.random() < 0.75:
            seg = min(step, n - start)
            hits[start:start + seg] = rng.uniform(0.5, 1.0) * decay[:seg]
    noise = _band_noise(rng, n, sr, [(9000.0, 4000.0)])
    return 0.4 * hits * noise


def _bass(rng, t, sr):
    notes = rng.uniform(50.0, 120.0, size=int(np.ceil(t[-1] + 1e-9)) + 1)
    freq = notes[np.minimum((t).astype(int), notes.size - 1)]
    phase = 2 * np.pi * np.cumsum(freq) / sr
    return 0.4 * np.sin(phase)


def _other(rng, t, sr):
    root = rng.uniform(1500.0, 2500.0)
    chord = [(root * r, 80.0) for r in (1.0, 1.25, 1.5)]
    return 0.25 * _band_noise(rng, t.size, sr, chord)


def synth_toy_dataset(seed, n_tracks, n_sources=2, duration_s=4.0, sample_rate=SAMPLE_RATE):
    """Deterministic synthetic stem tracks with mostly disjoint frequency supports.

    bass < 150 Hz, vocals 250-1000 Hz (sinusoids with 4% vibrato), other =
    noise chords around 1.5-4 kHz, drums = decaying broadband bursts centred
    near 9 kHz. Every stem is scaled by one common factor so the mixture peaks
    at 0.9, and the mixture is computed as vocals + (drums + bass + other)
    exactly.
    """
    if n_sources not in (2, 4):
        raise UsageError(f"n_sources must be 2 or 4, got {n_sources}")
    if duration_s < 2.0:
        raise UsageError(f"duration must be at least 2 s, got {duration_s}")
    if n_tracks < 1:
        raise UsageError(f"n_tracks must be >= 1, got {n_tracks}")
    n = int(round(duration_s * sample_rate))
    t = np.arange(n) / sample_rate
    tracks = []
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(n_tracks)):
        rng = np.random.default_rng(child)
        raw = {
            "vocals": _vocals(rng, t, sample_rate),
            "drums": _drums(rng, t, sample_rate),
            "bass": _bass(rng, t, sample_rate),
            "other": _other(rng, t, sample_rate),
        }
        peak = np.max(np.abs(raw["vocals"] + (raw["drums"] + raw["bass"] + raw["other"])))
        g = 0.9 / peak
        s = {k: g * v for k, v in raw.items()}
        acc = s["drums"] + s["bass"] + s["other"]
        mixture = s["vocals"] + acc
        if n_sources == 2:
            stems = {"vocals": s["vocals"], "accompaniment": acc}
        else:
            stems = {k: s[k] for k in ("vocals",) + INSTRUMENTS}
        tracks.append(
            TrackStems(
                f"toy{i:03d}",
                AudioClip(mixture, sample_rate),
                {k: AudioClip(v, sample_rate) for k, v in stems.items()},
            )
        )
    return tracks
