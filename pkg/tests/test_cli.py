import argparse

import pytest

from scunet.cli import RunConfig, main, read_config_file, resolve_config
from scunet.data import scan_dataset


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("ds")
    assert main(["synth", "--dataset", str(root), "--tracks", "2", "--test-tracks", "1", "--duration", "2"]) == 0
    return root


def test_synth_layout(dataset):
    m = scan_dataset(dataset)
    assert len(m.tracks("train")) == 2 and len(m.tracks("test")) == 1
    assert (dataset / "manifest.tsv").read_text() == m.to_text()


def test_weights_command(dataset, tmp_path, capsys):
    assert main(["weights", "--dataset", str(dataset), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.strip().splitlines()[-1].startswith("vocals 0.")
    assert (tmp_path / "weights.txt").read_text().startswith("vocals ")
    assert "preset = M3" in (tmp_path / "run_config.txt").read_text()


def test_train_inspect_separate_evaluate(dataset, tmp_path, capsys):
    run = tmp_path / "run"
    args = ["train", "--dataset", str(dataset), "--out", str(run), "--preset", "M1", "--depth", "2",
            "--base-channels", "4", "--batch-size", "2", "--epochs1", "1", "--epochs2", "1"]
    assert main(args) == 0
    assert (run / "final.ckpt").exists() and (run / "epoch-001.ckpt").exists()
    assert len((run / "loss_trace.txt").read_text().splitlines()) == 2
    assert main(["inspect", str(run / "final.ckpt")]) == 0
    out = capsys.readouterr().out
    assert '"preset": "M1"' in out and "optimizer steps: 2" in out
    sep = tmp_path / "sep"
    mix = dataset / "test" / "toy002" / "mixture.wav"
    assert main(["separate", "--checkpoint", str(run / "final.ckpt"), "--input", str(mix), "--out", str(sep)]) == 0
    assert (sep / "vocals.wav").exists() and (sep / "accompaniment.wav").exists()
    ev = tmp_path / "ev"
    assert main(["evaluate", "--dataset", str(dataset), "--checkpoint", str(run / "final.ckpt"), "--out", str(ev)]) == 0
    assert (ev / "report.csv").read_text().startswith("source,stat,value\nvocals,Med.,")


def test_oracle_evaluation_is_high(dataset, tmp_path):
    assert main(["evaluate", "--dataset", str(dataset), "--oracle-mag", "--out", str(tmp_path)]) == 0
    rows = [r.split(",") for r in (tmp_path / "report.csv").read_text().splitlines()[1:]]
    medians = {s: float(v) for s, stat, v in rows if stat == "Med."}
    assert set(medians) == {"vocals", "accompaniment"}
    assert min(medians.values()) > 20


def test_flag_beats_file_beats_preset(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# comment\ndepth = 3\nbatch-size = 4\nlr1 = 0.01\n")
    ns = argparse.Namespace(config=str(cfg_file), depth=2, batch_size=None, preset="M4", sources=None)
    cfg = resolve_config(ns)
    assert (cfg.depth, cfg.batch_size, cfg.lr1, cfg.preset, cfg.sources) == (2, 4, 0.01, "M4", 2)
    assert resolve_config(argparse.Namespace(config=None, sources=4)).preset == "M5"
    assert read_config_file(cfg_file)["batch_size"] == 4


def test_errors_map_to_exit_codes(tmp_path, capsys):
    assert main(["train", "--preset", "M9"]) == 1
    assert main(["train", "--preset", "M5", "--sources", "2"]) == 1
    assert main(["train", "--dataset", str(tmp_path / "nope")]) == 2
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"garbage")
    assert main(["inspect", str(bad)]) == 2
    assert main(["evaluate", "--dataset", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "error:" in err


def test_run_config_text_round_trip(tmp_path):
    cfg = RunConfig(preset="M6", sources=4, depth=3)
    (tmp_path / "c.txt").write_text(cfg.to_text())
    again = RunConfig(**read_config_file(tmp_path / "c.txt"))
    assert again == cfg
