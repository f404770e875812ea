import math

import numpy as np
import pytest

from scunet.data import TrackStems
from scunet.dsp import AudioClip
from scunet.errors import DataError, DimensionError, UndefinedReferenceError, UsageError
from scunet.evaluation import (
    EvalConfig,
    aggregate,
    emit_report,
    evaluate_dataset,
    evaluate_track,
    render_table,
    sdr,
)
from scunet.separation import OracleSeparator, ZeroSeparator, separate, window_bounds


def test_sdr_is_gain_invariant(rng):
    ref = rng.standard_normal(1000)
    noise = rng.standard_normal(1000)
    base = sdr(ref + 0.1 * noise, ref).value_db
    # noise orthogonal part dominates; scaling the estimate does not change SDR
    assert sdr(3.0 * (ref + 0.1 * noise), ref).value_db == pytest.approx(base, abs=1e-9)
    assert base == pytest.approx(20.0, abs=1.0)


def test_sdr_edge_cases(rng):
    ref = rng.standard_normal(64)
    assert sdr(ref, ref).value_db == math.inf
    assert sdr(np.zeros(64), ref).value_db == -math.inf
    assert sdr(ref, ref).capped_db == 100.0 and sdr(ref, ref).is_capped
    with pytest.raises(UndefinedReferenceError):
        sdr(ref, np.zeros(64))
    with pytest.raises(DimensionError):
        sdr(ref, ref[:-1])


def test_aggregate_hand_checked_values():
    s = aggregate([1.0, 2.0, 3.0, 4.0, 100.0])
    assert (s.median, s.mad, s.mean) == (3.0, 1.0, 22.0)
    assert s.sd == pytest.approx(math.sqrt(((1 - 22) ** 2 + 400 + 361 + 324 + 78 ** 2) / 5))
    assert s.capped == 1
    even = aggregate([4.0, 1.0, 3.0, 2.0])
    assert even.median == 2.5 and even.mad == 1.0 and even.mean == 2.5
    assert even.sd == pytest.approx(math.sqrt(1.25))
    inf = aggregate([math.inf, 0.0, -math.inf])
    assert inf.median == 0.0 and inf.mean == 0.0 and inf.capped == 2
    with pytest.raises(UsageError):
        aggregate([])


def tone_track(seconds, rate=8000, silent_from=None):
    t = np.arange(int(seconds * rate)) / rate
    v = 0.3 * np.sin(2 * np.pi * 440 * t)
    a = 0.2 * np.sin(2 * np.pi * 110 * t) + 0.05 * np.sin(2 * np.pi * 2000 * t)
    if silent_from is not None:
        v[int(silent_from * rate):] = 0.0
    return TrackStems("tone", AudioClip(v + a, rate), {"vocals": AudioClip(v, rate), "accompaniment": AudioClip(a, rate)})


def test_one_value_per_second_and_silent_seconds_skipped():
    cfg = EvalConfig(("vocals", "accompaniment"), window_s=2.0)
    track = tone_track(5.5)
    scores = evaluate_track(OracleSeparator(track, cfg.sources, cfg.stft), track, cfg)
    assert [len(scores.values[s]) for s in cfg.sources] == [5, 5]
    assert min(scores.values["vocals"]) > 20
    silent = tone_track(4.0, silent_from=2.0)
    scores = evaluate_track(OracleSeparator(silent, cfg.sources, cfg.stft), silent, cfg)
    assert len(scores.values["vocals"]) == 2 and scores.skipped["vocals"] == 2


def test_residual_derivation_in_separation():
    track = tone_track(2.0)
    sep = OracleSeparator(track, ("vocals", "accompaniment"), EvalConfig(("vocals",)).stft)
    est = separate(sep, track.mixture, residual=("accompaniment", "vocals"))
    np.testing.assert_allclose(est["accompaniment"].samples, track.mixture.samples - est["vocals"].samples)


def test_window_bounds_cover_the_track():
    assert window_bounds(45, 10, 2.0) == [(0, 20), (20, 40), (40, 45)]


def test_dataset_report_and_files(tmp_path):
    tracks = [tone_track(3.0), tone_track(2.0)]
    cfg = EvalConfig(("vocals", "accompaniment"))
    rep = evaluate_dataset(lambda t: OracleSeparator(t, cfg.sources, cfg.stft), tracks, cfg, jobs=2)
    assert rep.stats["vocals"].count == 5
    path = emit_report(rep.stats, tmp_path / "report.csv", {s: rep.skipped(s) for s in cfg.sources})
    lines = path.read_text().splitlines()
    assert lines[0] == "source,stat,value" and len(lines) == 9
    assert lines[1].startswith("vocals,Med.,")
    table = (tmp_path / "report.txt").read_text()
    assert "Med." in table and "skipped" in table
    assert render_table(rep.stats) in table
    zero = evaluate_dataset(lambda t: ZeroSeparator(cfg.sources), tracks, cfg)
    assert zero.stats["vocals"].median == -100.0
    with pytest.raises(DataError):
        evaluate_dataset(lambda t: ZeroSeparator(cfg.sources), [], cfg)
