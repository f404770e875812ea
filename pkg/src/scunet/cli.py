"""Command-line entry point: ``scunet {weights,train,separate,evaluate,inspect,synth}``.

Settings resolve as: command-line flag > ``--config`` file > preset default.
Every command echoes the resolved configuration; commands that write into
``--out`` also persist it there as ``run_config.txt``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .checkpoint import load_checkpoint, read_header
from .data import load_track, read_mono, scan_dataset, synth_toy_dataset, write_track, write_wav
from .dsp import StftConfig
from .errors import ConfigError, DataError, ScunetError, StorageError, UsageError
from .evaluation import EvalConfig, emit_report, evaluate_dataset, render_table
from .model import UNetConfig, build_unet
from .separation import ModelSeparator, OracleSeparator, separate
from .training import PRESETS, LossWeights, TrainConfig, build_chunks, compute_balancing_weights, sources_for, train

log = logging.getLogger("scunet")


@dataclass
class RunConfig:
    preset: str = "M3"
    sources: int = 2
    dataset: str = None
    out: str = "scunet_out"
    seed: int = 0
    jobs: int = 1
    depth: int = 5
    base_channels: int = 16
    convs_per_block: int = 2
    dropout: float = 0.4
    input_scale: float = 0.25
    batch_size: int = 8
    epochs1: int = 20
    lr1: float = 1e-3
    epochs2: int = 20
    lr2: float = 1e-4
    weight_decay: float = 1e-6
    max_steps: int = None
    stop_ratio: float = None
    weights_file: str = None
    window_size: int = 2048
    hop: int = 512
    split: str = None

    def validate(self):
        if self.preset not in PRESETS and self.preset != "custom":
            raise ConfigError(f"unknown preset {self.preset!r}; choose M1..M6 or custom")
        if self.sources not in (2, 4):
            raise ConfigError(f"--sources must be 2 or 4, got {self.sources}")
        if self.preset in PRESETS and len(PRESETS[self.preset].sources) != self.sources:
            raise ConfigError(
                f"preset {self.preset} trains {len(PRESETS[self.preset].sources)} sources, --sources says {self.sources}"
            )
        if self.preset == "custom" and not self.weights_file:
            raise ConfigError("preset 'custom' needs weights_file (written by the weights command)")
        if self.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {self.jobs}")
        return self

    def to_text(self):
        return "".join(f"{f.name} = {_render(getattr(self, f.name))}\n" for f in dataclasses.fields(self))

    def stft(self):
        return StftConfig(self.window_size, self.hop)

    def model_config(self):
        return UNetConfig(
            depth=self.depth,
            base_channels=self.base_channels,
            out_channels=self.sources,
            dropout_p=self.dropout,
            convs_per_block=self.convs_per_block,
            input_scale=self.input_scale,
        )


def _render(v):
    return "none" if v is None else str(v)


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_TYPES = {"int": int, "float": float, "str": str}


def _coerce(key, raw):
    if key not in _FIELDS:
        raise ConfigError(f"unknown configuration key {key!r}")
    if raw is None or (isinstance(raw, str) and raw.lower() == "none"):
        return None
    kind = _FIELDS[key].type
    try:
        return _TYPES[kind](raw)
    except (KeyError, ValueError):
        raise ConfigError(f"configuration key {key!r}: cannot parse {raw!r} as {kind}") from None


def read_config_file(path):
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    out = {}
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected 'key = value', got {line!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _coerce(key, value)
    return out


def resolve_config(args):
    """Merge preset defaults, the config file and explicit flags (highest wins)."""
    explicit = {k: v for k, v in vars(args).items() if k in _FIELDS and v is not None}
    from_file = read_config_file(args.config) if getattr(args, "config", None) else {}
    merged = {**from_file, **explicit}
    preset = merged.get("preset")
    if "sources" not in merged:
        if preset in PRESETS:
            merged["sources"] = len(PRESETS[preset].sources)
    if preset is None:
        merged["preset"] = "M5" if merged.get("sources") == 4 else "M3"
    return RunConfig(**merged).validate()


def _echo(cfg, command):
    print(f"# scunet {command} resolved configuration")
    sys.stdout.write(cfg.to_text())
    sys.stdout.flush()


def _persist(cfg, out):
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "run_config.txt").write_text(cfg.to_text())
    except OSError as exc:
        raise StorageError(f"cannot write into {out}: {exc.strerror or exc}") from exc


def _require_dataset(cfg):
    if not cfg.dataset:
        raise UsageError("--dataset is required for this command")
    return scan_dataset(cfg.dataset)


def _load_split(cfg, split, sources):
    entries = _require_dataset(cfg).tracks(split)
    if not entries:
        raise DataError(f"no {split} tracks under {cfg.dataset}")
    return [load_track(e, sources) for e in entries]


def read_weights_file(path):
    sources, alpha = [], []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read weights file {path}: {exc.strerror or exc}") from None
    for line in lines:
        if line.strip():
            name, value = line.split()
            sources.append(name)
            alpha.append(float(value))
    return LossWeights(tuple(sources), tuple(alpha))


def _weights(cfg):
    if cfg.preset == "custom":
        w = read_weights_file(cfg.weights_file)
        if len(w.sources) != cfg.sources:
            raise ConfigError(f"weights file covers {len(w.sources)} sources, --sources says {cfg.sources}")
        return w, None
    p = PRESETS[cfg.preset]
    return p.weights, p.residual


# --- commands -----------------------------------------------------------------
def cmd_weights(cfg):
    sources = sources_for(cfg.sources)
    tracks = _load_split(cfg, "train", sources)
    w = compute_balancing_weights(tracks, sources)
    print(", ".join(f"{s} {a:.3f}" for s, a in zip(w.sources, w.alpha)))
    out = Path(cfg.out)
    _persist(cfg, out)
    (out / "weights.txt").write_text("".join(f"{s} {a!r}\n" for s, a in zip(w.sources, w.alpha)))
    return 0


def cmd_train(cfg):
    weights, residual = _weights(cfg)
    tracks = _load_split(cfg, cfg.split or "train", weights.sources)
    out = Path(cfg.out)
    _persist(cfg, out)
    chunks = build_chunks(tracks, weights.sources, cfg.stft())
    model = build_unet(cfg.model_config(), seed=cfg.seed)
    tcfg = TrainConfig(
        batch_size=cfg.batch_size,
        phases=((cfg.epochs1, cfg.lr1), (cfg.epochs2, cfg.lr2)),
        weight_decay=cfg.weight_decay,
        seed=cfg.seed,
        preset=cfg.preset,
        max_steps=cfg.max_steps,
        stop_ratio=cfg.stop_ratio,
    )
    meta = {
        "preset": cfg.preset,
        "sources": list(weights.sources),
        "alpha": list(weights.alpha),
        "residual": list(residual) if residual else None,
        "window_size": cfg.window_size,
        "hop": cfg.hop,
        "seed": cfg.seed,
    }
    result = train(chunks, model, tcfg, weights, out_dir=out, meta=meta)
    losses = result.losses
    if losses:
        print(f"trained {len(losses)} steps on {len(chunks)} chunks: loss {losses[0]:.6g} -> {losses[-1]:.6g}")
    print(f"wrote {len(result.checkpoints)} checkpoint(s) to {out}")
    return 0


def _checkpoint_setup(path):
    model, _ = load_checkpoint(path)
    meta = model.meta
    try:
        sources = tuple(meta["sources"])
        stft_cfg = StftConfig(int(meta.get("window_size", 2048)), int(meta.get("hop", 512)))
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: checkpoint metadata lacks {exc}") from None
    residual = tuple(meta["residual"]) if meta.get("residual") else None
    return model, sources, stft_cfg, residual


def cmd_separate(cfg, checkpoint, input_path):
    model, sources, stft_cfg, residual = _checkpoint_setup(checkpoint)
    mixture = read_mono(input_path)
    est = separate(ModelSeparator(model, sources, stft_cfg), mixture, stft_cfg, residual)
    out = Path(cfg.out)
    _persist(cfg, out)
    for src in sources:
        write_wav(out / f"{src}.wav", est[src])
        print(f"wrote {out / f'{src}.wav'}")
    return 0


def cmd_evaluate(cfg, checkpoint, oracle):
    split = cfg.split or "test"
    if oracle:
        sources, stft_cfg, residual = sources_for(cfg.sources), cfg.stft(), None

        def make(track):
            return OracleSeparator(track, sources, stft_cfg)
    else:
        if not checkpoint:
            raise UsageError("evaluate needs --checkpoint or --oracle-mag")
        model, sources, stft_cfg, residual = _checkpoint_setup(checkpoint)
        sep = ModelSeparator(model, sources, stft_cfg)

        def make(track):
            return sep
    tracks = _load_split(cfg, split, sources)
    report = evaluate_dataset(make, tracks, EvalConfig(sources, residual, stft_cfg), jobs=cfg.jobs)
    out = Path(cfg.out)
    _persist(cfg, out)
    skipped = {s: report.skipped(s) for s in sources}
    path = emit_report(report.stats, out / "report.csv", skipped)
    sys.stdout.write(render_table(report.stats, skipped))
    print(f"wrote {path}")
    return 0


def cmd_inspect(path):
    cfg, meta = read_header(path)
    model, opt = load_checkpoint(path)
    print(json.dumps({"model": cfg, "meta": meta}, sort_keys=True, indent=2))
    print(f"parameters: {model.parameter_count()}")
    print(f"optimizer steps: {opt.step_count if opt else 0}")
    for name, p in model.named_parameters().items():
        print(f"  {name:<24} {str(p.dtype):<8} {tuple(p.shape)}")
    return 0


def cmd_synth(cfg, n_train, n_test, duration):
    if not cfg.dataset:
        raise UsageError("synth needs --dataset (the directory to create)")
    tracks = synth_toy_dataset(cfg.seed, n_train + n_test, cfg.sources, duration)
    for i, t in enumerate(tracks):
        write_track(cfg.dataset, "train" if i < n_train else "test", t)
    scan_dataset(cfg.dataset).write(Path(cfg.dataset) / "manifest.tsv")
    print(f"wrote {n_train} train and {n_test} test tracks to {cfg.dataset}")
    return 0


# --- argument parsing -----------------------------------------------------------
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _shared(p):
    g = p.add_argument_group("shared options")
    g.add_argument("--config", help="flat 'key = value' file; flags override it")
    g.add_argument("--dataset", help="dataset root (<root>/{train,test}/<track>/<stem>.wav)")
    g.add_argument("--out", help="output directory (default: scunet_out)")
    g.add_argument("--seed", type=int, help="random seed (default: 0)")
    g.add_argument("--preset", choices=sorted(PRESETS) + ["custom"], help="loss weighting preset (default: M3)")
    g.add_argument("--depth", type=int, help="U-Net depth (default: 5)")
    g.add_argument("--base-channels", dest="base_channels", type=int, help="channels of the first level (default: 16)")
    g.add_argument("--sources", type=int, choices=(2, 4), help="2 = vocals/accompaniment, 4 = vocals/drums/bass/other")
    g.add_argument("--jobs", type=int, help="parallel tracks during evaluation (default: 1)")
    g.add_argument("--split", choices=("train", "test"), help="dataset split to use")


def build_parser():
    parser = _Parser(prog="scunet", description="Spectrogram-channels U-Net source separation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("weights", help="compute balancing weights from the training split")
    _shared(p)

    p = sub.add_parser("train", help="train a model")
    _shared(p)
    t = p.add_argument_group("training options")
    t.add_argument("--convs-per-block", dest="convs_per_block", type=int)
    t.add_argument("--dropout", type=float)
    t.add_argument("--input-scale", dest="input_scale", type=float,
                   help="factor applied to STFT magnitudes before the network (default: 0.25)")
    t.add_argument("--batch-size", dest="batch_size", type=int)
    t.add_argument("--epochs1", type=int, help="epochs of the first phase (default: 20)")
    t.add_argument("--lr1", type=float, help="learning rate of the first phase (default: 1e-3)")
    t.add_argument("--epochs2", type=int, help="epochs of the second phase (default: 20)")
    t.add_argument("--lr2", type=float, help="learning rate of the second phase (default: 1e-4)")
    t.add_argument("--weight-decay", dest="weight_decay", type=float)
    t.add_argument("--max-steps", dest="max_steps", type=int, help="stop after this many optimizer steps")
    t.add_argument("--stop-ratio", dest="stop_ratio", type=float, help="stop once loss <= ratio * first loss")
    t.add_argument("--weights-file", dest="weights_file", help="weights.txt for --preset custom")
    t.add_argument("--window-size", dest="window_size", type=int)
    t.add_argument("--hop", type=int)

    p = sub.add_parser("separate", help="separate a mixture WAV into one WAV per source")
    _shared(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", required=True, help="mixture WAV (44.1 kHz)")

    p = sub.add_parser("evaluate", help="per-second SDR report over a dataset split")
    _shared(p)
    p.add_argument("--checkpoint")
    p.add_argument("--oracle-mag", dest="oracle_mag", action="store_true",
                   help="score true source magnitudes with the mixture phase (upper bound)")

    p = sub.add_parser("inspect", help="print a checkpoint's configuration and tensors")
    p.add_argument("checkpoint")

    p = sub.add_parser("synth", help="write a synthetic toy dataset to --dataset")
    _shared(p)
    p.add_argument("--tracks", type=int, default=2, help="training tracks (default: 2)")
    p.add_argument("--test-tracks", dest="test_tracks", type=int, default=1, help="test tracks (default: 1)")
    p.add_argument("--duration", type=float, default=4.0, help="seconds per track (default: 4)")
    return parser


def run(argv):
    args = build_parser().parse_args(argv)
    if args.command == "inspect":
        return cmd_inspect(args.checkpoint)
    cfg = resolve_config(args)
    _echo(cfg, args.command)
    if args.command == "weights":
        return cmd_weights(cfg)
    if args.command == "train":
        return cmd_train(cfg)
    if args.command == "separate":
        return cmd_separate(cfg, args.checkpoint, args.input)
    if args.command == "evaluate":
        return cmd_evaluate(cfg, args.checkpoint, args.oracle_mag)
    return cmd_synth(cfg, args.tracks, args.test_tracks, args.duration)


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except ScunetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
