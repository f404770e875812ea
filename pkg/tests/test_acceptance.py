"""Headline acceptance criteria, one test each.

Every test carries an ``acceptance`` marker; the conftest hook prints one
PASS/FAIL/SKIP line per criterion at the end of the run. The overfit and
toy-separation criteria share one 200-step training run (about 4 minutes
on one core).
"""
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from scunet.checkpoint import save_checkpoint
from scunet.cli import main
from scunet.data import TrackStems, synth_toy_dataset, write_track
from scunet.dsp import AudioClip, StftConfig, istft, snr_db, stft
from scunet.evaluation import EvalConfig, aggregate, evaluate_track
from scunet.functional import BatchNormState, batchnorm2d, conv2d, conv_transpose2d, l1_loss, maxpool2d, relu
from scunet.gradcheck import grad_check
from scunet.model import ENC_SPEC, UP_SPEC, UNetConfig, build_unet, prepare_input
from scunet.separation import OracleSeparator
from scunet.tensor import Tensor
from scunet.training import (
    PRESETS,
    TWO_SOURCES,
    LossWeights,
    TrainConfig,
    build_chunks,
    compute_balancing_weights,
    train,
    weighted_loss,
)

SEEDS = range(20)


def _detail(request, text):
    request.node.user_properties.append(("detail", text))


def _report_medians(path):
    rows = [r.split(",") for r in Path(path).read_text().splitlines()[1:]]
    return {s: float(v) for s, stat, v in rows if stat == "Med."}


# --- gradient correctness -------------------------------------------------------
def _probe(rng, shape):
    """Random linear functional turning an array-valued op into a scalar."""
    r = Tensor(rng.standard_normal(shape))
    return lambda t: (t * r).sum()


def _away_from_zero(rng, shape, margin=1e-2):
    x = rng.standard_normal(shape)
    return np.where(np.abs(x) < margin, np.sign(x + 1e-300) * margin * 2, x)


def _gradcheck_cases(seed):
    rng = np.random.default_rng(seed)
    cases = {}

    w = rng.standard_normal((3, 2, 3, 3))
    x = rng.standard_normal((1, 2, 5, 6))
    p = _probe(rng, (1, 3, 5, 6))
    cases["conv2d"] = [
        (lambda t: p(conv2d(t, Tensor(w), spec=ENC_SPEC)), x),
        (lambda t: p(conv2d(Tensor(x), t, spec=ENC_SPEC)), w),
    ]
    w5 = rng.standard_normal((3, 2, 5, 5))
    x5 = rng.standard_normal((1, 2, 6, 8))
    p5 = _probe(rng, (1, 3, 3, 4))
    cases["conv2d"].append((lambda t: p5(conv2d(t, Tensor(w5), spec=UP_SPEC)), x5))

    wt = rng.standard_normal((2, 3, 5, 5))
    xt = rng.standard_normal((1, 2, 3, 4))
    pt = _probe(rng, (1, 3, 6, 8))
    cases["conv_transpose2d"] = [
        (lambda t: pt(conv_transpose2d(t, Tensor(wt), spec=UP_SPEC)), xt),
        (lambda t: pt(conv_transpose2d(Tensor(xt), t, spec=UP_SPEC)), wt),
    ]

    xm = rng.standard_normal((1, 2, 4, 6))
    pm = _probe(rng, (1, 2, 2, 3))
    cases["maxpool2d"] = [(lambda t: pm(maxpool2d(t, 2)), xm)]

    state = BatchNormState.create(3, np.float64)
    state.running_mean = rng.standard_normal(3)
    state.running_var = rng.uniform(0.5, 1.5, 3)
    state.gamma = Tensor(rng.standard_normal(3), requires_grad=True)
    state.beta = Tensor(rng.standard_normal(3), requires_grad=True)
    xb = rng.standard_normal((2, 3, 3, 4))
    pb = _probe(rng, xb.shape)
    cases["batchnorm2d (eval)"] = [(lambda t: pb(batchnorm2d(t, state, "eval")), xb)]

    # relu(conv(relu(x))) with every relu input kept clear of its kink
    wr = rng.standard_normal((2, 2, 3, 3))
    xr = _away_from_zero(rng, (1, 2, 5, 5))
    pre = conv2d(Tensor(np.maximum(xr, 0)), Tensor(wr), spec=ENC_SPEC).data
    shift = np.where(np.abs(pre) < 1e-2, 0.05, 0.0)
    pr = _probe(rng, pre.shape)
    cases["relu composition"] = [
        (lambda t: pr(relu(conv2d(relu(t), Tensor(wr), spec=ENC_SPEC) + Tensor(shift))), xr)
    ]

    pred = rng.standard_normal((2, 2, 3, 4))
    target = pred + _away_from_zero(rng, pred.shape)
    cases["l1_loss"] = [(lambda t: l1_loss(t, Tensor(target)), pred)]

    a = rng.uniform(0.1, 1.0)
    weights = LossWeights(TWO_SOURCES, (a / (1 + a), 1 / (1 + a)))
    cases["weighted_loss"] = [(lambda t: weighted_loss(t, Tensor(target), weights), pred)]
    return cases


@pytest.mark.acceptance("gradient correctness")
def test_gradients_match_finite_differences(request):
    t0 = time.perf_counter()
    worst = {}
    for seed in SEEDS:
        for op, checks in _gradcheck_cases(seed).items():
            for f, point in checks:
                rep = grad_check(f, point, tolerance=1e-4)
                worst[op] = max(worst.get(op, 0.0), rep.max_rel_error)
    elapsed = time.perf_counter() - t0
    _detail(request, f"7 ops x {len(SEEDS)} seeds, worst rel err {max(worst.values()):.1e}, {elapsed:.1f} s")
    assert len(worst) == 7
    assert all(err < 1e-4 for err in worst.values()), worst
    assert elapsed < 120


# --- adjointness ----------------------------------------------------------------
@pytest.mark.acceptance("adjointness")
def test_conv_pairs_are_adjoint(request):
    worst = 0.0
    for spec in (ENC_SPEC, UP_SPEC):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            x = rng.standard_normal((2, 3, 16, 12))
            w = rng.standard_normal((4, 3) + spec.kernel)
            y = rng.standard_normal(conv2d(Tensor(x), Tensor(w), spec=spec).shape)
            lhs = float(np.vdot(conv2d(Tensor(x), Tensor(w), spec=spec).data, y))
            rhs = float(np.vdot(x, conv_transpose2d(Tensor(y), Tensor(w), spec=spec).data))
            worst = max(worst, abs(lhs - rhs))
    _detail(request, f"3x3/1/1 and 5x5/2/2+op1, max |<Ax,y> - <x,A*y>| = {worst:.1e}")
    assert worst <= 1e-8


# --- dsp round trip ---------------------------------------------------------------
@pytest.mark.acceptance("dsp round trip")
def test_stft_round_trip_snr(request):
    cfg = StftConfig(2048, 512)
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    worst = np.inf
    for _ in range(100):
        clip = AudioClip(rng.uniform(-1, 1, 88200))
        back = istft(stft(clip, cfg), cfg, len(clip))
        inner = slice(cfg.window_size, len(clip) - cfg.window_size)
        worst = min(worst, snr_db(clip.samples[inner], back.samples[inner]))
    elapsed = time.perf_counter() - t0
    _detail(request, f"100 clips of 2 s, worst interior SNR {worst:.1f} dB, {elapsed:.1f} s")
    assert worst > 60
    assert elapsed < 30


# --- shape and sign contracts -----------------------------------------------------
@pytest.mark.acceptance("shape and sign contracts")
def test_forward_shapes_and_non_negativity(request):
    rng = np.random.default_rng(0)
    mags = rng.uniform(0, 1, (1, 1024, 176)).astype(np.float32)
    padded = {}
    for depth in (2, 3, 4, 5):
        for c in (2, 4):
            cfg = UNetConfig(depth=depth, out_channels=c)
            # frames are zero-padded to a multiple of 2**depth and cropped after
            x = prepare_input(mags, cfg)
            padded[depth] = x.shape[3]
            out = build_unet(cfg, seed=depth).predict(x)[:, :, :, :176]
            assert out.shape == (1, c, 1024, 176)
            assert np.all(out >= 0) and np.all(np.isfinite(out))
    _detail(request, "depths 2-5 x C in (2, 4); padded frame counts " + str(padded))


# --- overfit and toy separation ---------------------------------------------------
@pytest.fixture(scope="module")
def overfit_run(tmp_path_factory):
    tracks = synth_toy_dataset(0, 2, 2, 4.0)
    t0 = time.perf_counter()
    chunks = build_chunks(tracks, TWO_SOURCES)
    model = build_unet(UNetConfig(depth=2, base_channels=8), seed=0)
    cfg = TrainConfig(batch_size=4, phases=((200, 1e-3),), seed=0, max_steps=200, checkpoint_every_epoch=False)
    result = train(chunks, model, cfg, PRESETS["M3"].weights)
    elapsed = time.perf_counter() - t0
    root = tmp_path_factory.mktemp("overfit")
    ckpt = root / "model.ckpt"
    meta = {"preset": "M3", "sources": list(TWO_SOURCES), "residual": None, "window_size": 2048, "hop": 512}
    save_checkpoint(model, result.optimizer, ckpt, meta)
    dataset = root / "data"
    for t in tracks:
        write_track(dataset, "test", t)
    return {"chunks": len(chunks), "losses": result.losses, "elapsed": elapsed, "ckpt": ckpt, "dataset": dataset,
            "root": root}


@pytest.mark.acceptance("overfit")
def test_overfit_four_chunks(request, overfit_run):
    losses = overfit_run["losses"]
    ratio = min(losses) / losses[0]
    first = next((i + 1 for i, v in enumerate(losses) if v <= 0.1 * losses[0]), None)
    _detail(request, f"{len(losses)} steps, best loss {ratio:.3f} of initial (first <= 10% at step {first}), "
                     f"{overfit_run['elapsed']:.0f} s")
    assert overfit_run["chunks"] == 4
    assert len(losses) == 200
    assert ratio <= 0.10
    assert overfit_run["elapsed"] < 300


@pytest.mark.acceptance("toy separation quality")
def test_toy_separation_sdr(request, overfit_run):
    root, dataset = overfit_run["root"], str(overfit_run["dataset"])
    assert main(["evaluate", "--dataset", dataset, "--checkpoint", str(overfit_run["ckpt"]),
                 "--out", str(root / "ev_model")]) == 0
    assert main(["evaluate", "--dataset", dataset, "--oracle-mag", "--out", str(root / "ev_oracle")]) == 0
    model = _report_medians(root / "ev_model" / "report.csv")
    oracle = _report_medians(root / "ev_oracle" / "report.csv")
    _detail(request, "median SDR model " + ", ".join(f"{s} {v:.2f}" for s, v in model.items())
            + "; oracle " + ", ".join(f"{s} {v:.2f}" for s, v in oracle.items()))
    assert set(model) == set(oracle) == set(TWO_SOURCES)
    assert min(model.values()) >= 10
    assert min(oracle.values()) >= 20


# --- balancing weights --------------------------------------------------------------
def _norm_ratio_track(rng, name, ratio, chunks=3, rate=8000):
    n = 2 * rate
    parts = {}
    for src, target in (("vocals", 1.0), ("accompaniment", ratio)):
        blocks = [rng.standard_normal(n) for _ in range(chunks)]
        parts[src] = np.concatenate([b * (target / np.linalg.norm(b)) for b in blocks])
    stems = {s: AudioClip(v, rate) for s, v in parts.items()}
    return TrackStems(name, AudioClip(parts["vocals"] + parts["accompaniment"], rate), stems)


@pytest.mark.acceptance("balancing weights")
def test_balancing_weights_and_one_hot_presets(request):
    rng = np.random.default_rng(0)
    tracks = [_norm_ratio_track(rng, f"t{i}", 1 + math.sqrt(2)) for i in range(2)]
    w = compute_balancing_weights(tracks, TWO_SOURCES)
    assert abs(w.alpha[0] - 0.707) <= 0.001

    out = rng.uniform(0, 1, (2, 2, 8, 8))
    target = rng.uniform(0, 1, out.shape)
    for preset, ignored in (("M1", 1), ("M2", 0)):
        weights = PRESETS[preset].weights
        base = Tensor(out.copy(), requires_grad=True)
        loss = weighted_loss(base, target, weights)
        loss.backward()
        bumped = out.copy()
        bumped[:, ignored] += rng.standard_normal(bumped[:, ignored].shape) * 10
        assert float(weighted_loss(Tensor(bumped), target, weights).data) == float(loss.data)
        assert not np.any(base.grad[:, ignored])
    _detail(request, f"alpha_vocals = {w.alpha[0]:.5f} at norm ratio 2.414:1; M1/M2 invariant to the other channel")


# --- evaluation protocol --------------------------------------------------------------
@pytest.mark.acceptance("protocol fidelity")
def test_per_second_values_and_aggregate(request):
    track = synth_toy_dataset(3, 1, 2, 20.0)[0]
    cfg = EvalConfig(TWO_SOURCES)
    model = build_unet(UNetConfig(depth=2, base_channels=4), seed=0)
    counts = {}
    for name, sep in (("model", model), ("oracle", OracleSeparator(track, TWO_SOURCES))):
        scores = evaluate_track(sep, track, cfg)
        counts[name] = {s: len(v) for s, v in scores.values.items()}
        assert all(n == 20 for n in counts[name].values()), counts

    st = aggregate([2, 4, 4, 4, 5, 5, 7, 9])
    assert (st.median, st.mad, st.mean, st.sd) == (4.5, 0.5, 5.0, 2.0)
    st = aggregate([10.0, -1.0, 7.0])
    assert (st.median, st.mad) == (7.0, 3.0)
    assert st.mean == pytest.approx(16 / 3, rel=1e-15)
    assert st.sd == pytest.approx(math.sqrt(582 / 27), rel=1e-15)
    st = aggregate([math.inf, 1.0, 1.0])
    assert (st.median, st.mad, st.mean, st.capped) == (1.0, 0.0, 34.0, 1)
    _detail(request, "20 s track -> 20 values per source; median/MAD/mean/SD exact on hand lists")


# --- determinism ----------------------------------------------------------------------
def _cli_run(dataset, out):
    train_args = ["train", "--dataset", str(dataset), "--out", str(out), "--depth", "2", "--base-channels", "4",
                  "--batch-size", "1", "--epochs1", "1", "--epochs2", "1", "--seed", "7"]
    assert main(train_args) == 0
    assert main(["evaluate", "--dataset", str(dataset), "--checkpoint", str(out / "final.ckpt"),
                 "--out", str(out / "eval")]) == 0
    return {p.relative_to(out).as_posix(): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}


@pytest.mark.acceptance("determinism")
def test_fixed_seed_runs_are_bitwise_identical(request, tmp_path):
    data_a, data_b = tmp_path / "data_a", tmp_path / "data_b"
    for d in (data_a, data_b):
        assert main(["synth", "--dataset", str(d), "--tracks", "2", "--test-tracks", "1", "--duration", "2"]) == 0
    wavs = lambda d: {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*.wav"))}
    assert wavs(data_a) == wavs(data_b)
    a = _cli_run(data_a, tmp_path / "a")
    b = _cli_run(data_a, tmp_path / "b")
    assert {"loss_trace.txt", "final.ckpt", "epoch-001.ckpt", "eval/report.csv", "eval/report.txt"} <= set(a)
    assert a.keys() == b.keys()
    # run_config.txt echoes the (different) output directory
    compared = [name for name in a if not name.endswith("run_config.txt")]
    differing = [name for name in compared if a[name] != b[name]]
    _detail(request, f"{len(compared)} artifacts compared across two runs, {len(differing)} differ")
    assert not differing


# --- optional full-data report ----------------------------------------------------------
@pytest.mark.acceptance("full-data report (optional)")
def test_full_dataset_report(request, tmp_path):
    dataset, ckpt = os.environ.get("SCUNET_DATASET"), os.environ.get("SCUNET_CHECKPOINT")
    if not (dataset and ckpt):
        pytest.skip("set SCUNET_DATASET and SCUNET_CHECKPOINT to a decoded dataset and a fully trained model")
    assert main(["evaluate", "--dataset", dataset, "--checkpoint", ckpt, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "report.txt").read_text().splitlines()
    labels = [ln.split()[0] for ln in lines[1:5]]
    _detail(request, f"report rows {labels}")
    assert labels == ["Med.", "MAD", "Mean", "SD"]
