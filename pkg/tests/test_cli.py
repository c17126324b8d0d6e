from pathlib import Path

import numpy as np

from drivesim.cli import main
from drivesim.registration import (FrameAnnotations, PointCloud,
                                   save_annotations, save_cloud)

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def test_run_and_rescore_idempotent(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--scenario", str(SCENARIOS / "nonreactive/nr_01.scn"),
               "--agent", "ego=replay", "--out", str(out), "--seed", "7"])
    assert rc == 0
    log_path = out / "nr_01.log.jsonl"
    assert log_path.exists()
    assert (out / "report.txt").exists()
    assert (out / "report.json").exists()
    run_table = (out / "report.txt").read_text()
    capsys.readouterr()
    rc = main(["score", str(log_path)])
    assert rc == 0
    score_table = capsys.readouterr().out
    assert run_table.strip() == score_table.strip()


def test_run_missing_binding_is_config_error(tmp_path):
    rc = main(["run", "--scenario", str(SCENARIOS / "multiagent/ma_crossing.scn"),
               "--agent", "a1=rule", "--default-agent", "none",
               "--out", str(tmp_path / "out")])
    assert rc == 2


def test_run_dump_frames(tmp_path):
    out = tmp_path / "out"
    rc = main(["run", "--scenario", str(SCENARIOS / "nonreactive/nr_02.scn"),
               "--agent", "ego=constant_velocity", "--out", str(out),
               "--n-steps", "2", "--dump-frames"])
    assert rc == 0
    frames = sorted((out / "frames" / "nr_02").glob("*"))
    names = {f.name for f in frames}
    assert "step0000_ego_front.ppm" in names
    assert "step0000_ego_front_depth.pfm" in names
    assert "step0000_ego_lidar_depth.pfm" in names


def test_score_directory_and_mean(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--suite", str(SCENARIOS / "multiagent"),
               "--default-agent", "rule", "--out", str(out), "--n-steps", "5"])
    assert rc == 0
    capsys.readouterr()
    rc = main(["score", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "ma_crossing" in text and "mean" in text


def test_score_corrupt_log(tmp_path):
    bad = tmp_path / "bad.log.jsonl"
    bad.write_text('{"kind": "header", "agents": {}}\nnot json at all\n')
    rc = main(["score", str(bad)])
    assert rc == 2


def test_register_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.uniform(-20, 20, 400),
                           rng.uniform(-20, 20, 400),
                           rng.uniform(0.5, 4.0, 400)])
    clouds = tmp_path / "clouds"
    clouds.mkdir()
    drift = [-0.2, 0.0, 0.2]
    for i, dx in enumerate(drift):
        moved = pts.copy()
        moved[:, 0] += dx
        save_cloud(PointCloud(moved), clouds / f"frame_{i}.pcbin")
    ann_path = tmp_path / "ann.txt"
    save_annotations({i: FrameAnnotations(ground_height=-1.0,
                                          crop_region=(-50, -50, 50, 50))
                      for i in range(3)}, ann_path)
    out = tmp_path / "corr.txt"
    rc = main(["register", "--clouds", str(clouds), "--annotations",
               str(ann_path), "--out", str(out)])
    assert rc == 0
    rows = [line.split() for line in out.read_text().splitlines()
            if not line.startswith("#")]
    assert len(rows) == 3
    # frame 0 drifted -0.2 -> correction ~ +0.2; frame 1 is the reference
    assert abs(float(rows[0][1]) - 0.2) < 0.05
    assert float(rows[1][1]) == 0.0
    assert abs(float(rows[2][1]) + 0.2) < 0.05


def test_render_outputs_and_silhouette(tmp_path):
    out = tmp_path / "render"
    rc = main(["render", "--scenario",
               str(SCENARIOS / "safety/safety_blocker.scn"),
               "--pose", "18 0 0", "--t", "0.0", "--out", str(out)])
    assert rc == 0
    from drivesim.imageio import load_pfm
    mask = load_pfm(out / "front_mask.pfm")
    assert mask.sum() > 0, "blocker 12 m ahead must appear in the mask"
    assert (out / "front.ppm").exists()
    assert (out / "lidar_depth.pfm").exists()


def test_render_bad_pose_syntax(tmp_path):
    rc = main(["render", "--scenario",
               str(SCENARIOS / "safety/safety_blocker.scn"),
               "--pose", "not a pose", "--out", str(tmp_path / "r")])
    assert rc == 2


def test_score_gap_against_baseline(tmp_path, capsys):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    scn = str(SCENARIOS / "safety/safety_blocker.scn")
    assert main(["run", "--scenario", scn, "--agent", "ego=rule",
                 "--out", str(out_a), "--seed", "7"]) == 0
    assert main(["run", "--scenario", scn, "--agent", "ego=rule",
                 "--out", str(out_b), "--seed", "7", "--weights", "6 4 2"]) == 0
    capsys.readouterr()
    assert main(["score", str(out_a), "--baseline", str(out_b)]) == 0
    text = capsys.readouterr().out
    assert "PDMS gap vs baseline" in text
    assert "mean per-sequence gap" in text
    assert "aggregate-PDMS gap" in text
