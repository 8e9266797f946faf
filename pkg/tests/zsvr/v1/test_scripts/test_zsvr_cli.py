import json
import os

import pytest

from src.zsvr.v1.zsvr_cli import build_parser, main
from src.zsvr.v1.zsvr_mediaio import read_flo, read_frames, read_raw_tensor, read_report, write_frames
from src.zsvr.v1.zsvr_synthetic import degrade, synthesize_video

DEMO_ARGS = ["--frames", "6", "--size", "16", "--steps", "3", "--batch-size", "3"]


def _write_video(path, frames: int = 6, size: int = 16, seed: int = 0):
    hq = synthesize_video(num_frames=frames, size=size, seed=seed)
    lq = degrade(hq, scale=4, seed=seed)
    write_frames(hq, str(path / "hq"))
    write_frames(lq, str(path / "lq"))
    return str(path / "hq"), str(path / "lq")


def _tree_bytes(root: str) -> dict:
    files = {}
    for directory, _, names in os.walk(root):
        for name in names:
            full = os.path.join(directory, name)
            with open(full, 'rb') as f:
                files[os.path.relpath(full, root)] = f.read()
    return files


def test_zsvr_cli_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2

    with pytest.raises(SystemExit) as excinfo:
        main(["restore", "--in", "frames"])
    assert excinfo.value.code == 2

    with pytest.raises(SystemExit) as excinfo:
        main(["ablate", "--in", "a", "--out", "b", "--variants", "Nope"])
    assert excinfo.value.code == 2


def test_zsvr_cli_runtime_errors_exit_1(tmp_path, capsys):
    assert main(["restore", "--in", str(tmp_path / "missing"), "--out", str(tmp_path / "out")]) == 1

    (tmp_path / "empty").mkdir()
    assert main(["flow", "--in", str(tmp_path / "empty"), "--out", str(tmp_path / "flows")]) == 1
    assert "no frames" in capsys.readouterr().err

    _, lq = _write_video(tmp_path)
    assert main(["restore", "--in", lq, "--out", str(tmp_path / "out"), "--steps", "0"]) == 1


def test_zsvr_cli_help_lists_config_keys():
    text = build_parser().format_help()
    assert "tome.r" in text
    assert "hlw_until" in text


def test_zsvr_cli_flow(tmp_path):
    _, lq = _write_video(tmp_path, frames=3)
    out = str(tmp_path / "flows")

    assert main(["flow", "--in", lq, "--out", out, "--block", "3", "--search", "2"]) == 0

    assert sorted(os.listdir(out)) == ["back_00000_00001.flo", "back_00001_00002.flo",
                                       "conf_00000_00001.rtf", "conf_00001_00002.rtf",
                                       "flow_00000_00001.flo", "flow_00001_00002.flo"]
    assert read_flo(os.path.join(out, "flow_00000_00001.flo")).resolution == (16, 16)
    assert read_raw_tensor(os.path.join(out, "conf_00000_00001.rtf")).shape == (16, 16)


def test_zsvr_cli_restore_is_reproducible(tmp_path):
    _, lq = _write_video(tmp_path)
    common = ["--steps", "3", "--batch-size", "3", "--dump-latents"]

    assert main(["restore", "--in", lq, "--out", str(tmp_path / "a")] + common) == 0
    assert main(["restore", "--in", lq, "--out", str(tmp_path / "b")] + common) == 0

    first = _tree_bytes(str(tmp_path / "a"))
    assert first == _tree_bytes(str(tmp_path / "b"))
    assert read_frames(str(tmp_path / "a")).num_frames == 6
    latent = read_raw_tensor(str(tmp_path / "a" / "latents" / "latent_00000.rtf"))
    assert latent.shape == (4, 4, 3)


def test_zsvr_cli_restore_with_config_file(tmp_path):
    _, lq = _write_video(tmp_path, frames=4)
    config = tmp_path / "restore.txt"
    config.write_text("steps = 2\nbatch_size = 2\ntome.spatial = off\n")

    assert main(["restore", "--in", lq, "--out", str(tmp_path / "out"), "--config", str(config),
                 "--no-tome"]) == 0
    assert read_frames(str(tmp_path / "out")).num_frames == 4


def test_zsvr_cli_metrics(tmp_path):
    hq, lq = _write_video(tmp_path, frames=4)
    out = str(tmp_path / "report.json")

    assert main(["metrics", "--in", lq, "--ref", hq, "--out", out, "--block", "3", "--search", "2"]) == 0

    report = read_report(out)
    assert len(report.e_warp) == 3
    assert len(report.e_inter) == 2
    assert len(report.psnr) == 4
    assert report.metadata['flow_from'] == lq


def test_zsvr_cli_metrics_of_identical_sequence(tmp_path):
    hq, _ = _write_video(tmp_path, frames=3)
    out = str(tmp_path / "report.json")

    assert main(["metrics", "--in", hq, "--ref", hq, "--out", out]) == 0

    with open(out, 'r') as f:
        obj = json.load(f)
    assert obj['psnr']['values'] == ["inf"] * 3


def test_zsvr_cli_ablate(tmp_path, capsys):
    hq, lq = _write_video(tmp_path)
    out = str(tmp_path / "ablation.json")

    assert main(["ablate", "--in", lq, "--ref", hq, "--out", out, "--steps", "3", "--batch-size", "3",
                 "--variants", "Cos/Cos", "E/EML"]) == 0

    with open(out, 'r') as f:
        obj = json.load(f)
    assert [row['variant'] for row in obj['rows']] == ["Cos/Cos", "E/EML"]
    assert obj['config']['steps'] == 3
    assert "e_warp_x1e3" in capsys.readouterr().out


def test_zsvr_cli_demo_is_reproducible(tmp_path):
    first = str(tmp_path / "first")
    second = str(tmp_path / "second")

    assert main(["demo", "--out", first] + DEMO_ARGS) == 0
    assert main(["demo", "--out", second] + DEMO_ARGS) == 0

    assert _tree_bytes(first) == _tree_bytes(second)
    for label in ("hq", "lq", "baseline", "ours"):
        assert read_frames(os.path.join(first, label)).num_frames == 6
    with open(os.path.join(first, "report.json"), 'r') as f:
        report = json.load(f)
    assert set(report) == {"baseline", "ours", "config"}
    assert report['ours']['e_warp']['mean'] is not None
    assert report['config']['hlw_until'] == 1.0


def _staging_leftovers(root) -> list:
    return [name for name in os.listdir(root) if name.startswith(".zsvr-")]


def test_zsvr_cli_restore_conflict_leaves_output_untouched(tmp_path, capsys):
    _, lq = _write_video(tmp_path, frames=3)
    out = tmp_path / "out"
    out.mkdir()
    (out / "latents").write_text("not a directory")

    assert main(["restore", "--in", lq, "--out", str(out), "--steps", "2", "--batch-size", "3",
                 "--dump-latents"]) == 1

    assert os.listdir(out) == ["latents"]
    assert (out / "latents").read_text() == "not a directory"
    assert _staging_leftovers(tmp_path) == []
    assert "latents" in capsys.readouterr().err


def test_zsvr_cli_demo_failure_writes_nothing(tmp_path, monkeypatch):
    def failing_write_json(obj, path):
        raise OSError("disk full")

    monkeypatch.setattr("src.zsvr.v1.zsvr_cli.write_json", failing_write_json)
    out = tmp_path / "demo"

    assert main(["demo", "--out", str(out)] + DEMO_ARGS) == 1

    assert not out.exists()
    assert _staging_leftovers(tmp_path) == []


def test_zsvr_cli_restore_keeps_foreign_files(tmp_path):
    _, lq = _write_video(tmp_path, frames=3)
    out = tmp_path / "out"
    out.mkdir()
    (out / "notes.txt").write_text("keep me")

    assert main(["restore", "--in", lq, "--out", str(out), "--steps", "2", "--batch-size", "3"]) == 0

    assert (out / "notes.txt").read_text() == "keep me"
    assert read_frames(str(out)).num_frames == 3
    assert _staging_leftovers(tmp_path) == []


def test_zsvr_cli_demo_ours_is_more_consistent(tmp_path):
    out = str(tmp_path / "demo")

    assert main(["demo", "--out", out, "--frames", "16", "--size", "24", "--steps", "4",
                 "--batch-size", "8"]) == 0

    with open(os.path.join(out, "report.json"), 'r') as f:
        report = json.load(f)
    assert report['ours']['e_warp']['mean'] < report['baseline']['e_warp']['mean']
