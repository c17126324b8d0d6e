import math
from pathlib import Path

import numpy as np
import pytest

from drivesim.errors import (MissingAgentState, UnknownBehavior,
                             ValidationError)
from drivesim.geom import make_car, save_mesh
from drivesim.scene import (BehaviorSpec, Trajectory, compose, load_scenario,
                            sample_pose, save_trajectory_csv, scripted_behavior,
                            scripted_state, serialize_scenario,
                            straight_trajectory)
from drivesim.scene.config import save_scenario


def write_assets(tmp_path: Path):
    assets = tmp_path / "assets"
    assets.mkdir(exist_ok=True)
    save_mesh(make_car(), assets / "car.obj")
    save_trajectory_csv(straight_trajectory(0, 0, 0.0, 8.0, 4.0), assets / "ego_ref.csv")
    save_trajectory_csv(straight_trajectory(20, 0, 0.0, 8.0, 4.0), assets / "lead.csv")
    return assets


MINIMAL = """\
[scenario]
name = mini
mode = non_reactive

[background]
ground_z = 0.0
drivable = -10,-4 110,-4 110,4 -10,4
centerline = -10,0 110,0
reference_trajectory = assets/ego_ref.csv

[ego]
mesh = assets/car.obj
footprint = 4.5 1.9
initial = 0 0 0 8.0
agent_id = ego
command = straight

[sim]
dt = 0.1
n_steps = 40
seed = 7
"""

WITH_PARTICIPANTS = MINIMAL + """
[participant.lead]
mesh = assets/car.obj
footprint = 4.5 1.9
mode = replay
trajectory = assets/lead.csv
initial = 20 0 0 8.0

[participant.blocker]
mesh = assets/car.obj
footprint = 4.5 1.9
mode = scripted
behavior = stationary
initial = 50 0 0 0
"""


class FakeState:
    def __init__(self, x, y, heading, v):
        self.x, self.y, self.heading, self.v = x, y, heading, v


# ---------------------------------------------------------------------------
# sample_pose


def test_sample_pose_exact_at_sample():
    traj = Trajectory([0, 1, 2], [0, 1, 2], [0, 0, 0], [0.1, 0.1, 0.1], [1, 1, 1])
    pose, v = sample_pose(traj, 1.0)
    assert pose.translation[0] == 1.0
    assert v == 1.0


def test_sample_pose_midpoint():
    traj = Trajectory([0, 1], [0, 1], [0, 0], [0, 0], [2, 4])
    pose, v = sample_pose(traj, 0.5)
    assert pose.translation[0] == pytest.approx(0.5, abs=1e-12)
    assert v == pytest.approx(3.0, abs=1e-12)


def test_sample_pose_heading_shortest_arc():
    # 350 deg and 10 deg: midpoint is 0 deg, not 180
    traj = Trajectory([0, 1], [0, 0], [0, 0],
                      [math.radians(350), math.radians(10)], [0, 0])
    pose, _ = sample_pose(traj, 0.5)
    assert pose.yaw == pytest.approx(0.0, abs=1e-12)


def test_sample_pose_clamps_at_ends():
    traj = Trajectory([0, 1], [0, 1], [0, 0], [0, 0], [2, 3])
    pose, v = sample_pose(traj, 5.0)
    assert pose.translation[0] == 1.0
    assert v == 3.0   # holds last recorded speed


def test_sample_pose_continuity():
    traj = straight_trajectory(0, 0, 0.3, 6.0, 2.0)
    for t in (0.05, 0.749999, 1.32):
        p1, _ = sample_pose(traj, t)
        p2, _ = sample_pose(traj, t + 1e-6)
        assert np.linalg.norm(p2.translation - p1.translation) < 6.0 * 1e-6 * 1.01


# ---------------------------------------------------------------------------
# scripted behaviors


def test_stationary_behavior():
    pose, v = scripted_behavior("stationary", {}, 3.0, None, (5, 2, 0.4, 0))
    assert pose.translation[0] == 5.0
    assert v == 0.0


def test_sudden_brake_before_trigger():
    spec = BehaviorSpec("sudden_brake", {"speed": 8.0, "a_brake": 4.0,
                                         "trigger_time": 2.0})
    x, y, h, v = scripted_state(spec, 1.0, (0, 0, 0, 8.0), None)
    assert x == pytest.approx(8.0)
    assert v == 8.0


def test_sudden_brake_stops():
    # v=8, a=4: 2 s after trigger -> v=0, distance = trigger travel + v^2/2a
    spec = BehaviorSpec("sudden_brake", {"speed": 8.0, "a_brake": 4.0})
    x, y, h, v = scripted_state(spec, 3.0, (0, 0, 0, 8.0), 1.0)
    assert v == 0.0
    assert x == pytest.approx(8.0 + 8.0, abs=1e-12)  # 8 m pre-trigger + 8 m braking


def test_cut_in_ramp_completion():
    spec = BehaviorSpec("cut_in", {"speed": 5.0, "lane_width": 3.5,
                                   "cut_duration": 2.0})
    x, y, h, v = scripted_state(spec, 4.0, (0, 0, 0, 5.0), 1.0)
    assert y == pytest.approx(3.5, abs=1e-12)   # full lateral offset after ramp
    assert x == pytest.approx(20.0, abs=1e-12)


def test_intersection_cross_constant_speed():
    spec = BehaviorSpec("intersection_cross", {"speed": 6.0})
    x, y, h, v = scripted_state(spec, 2.0, (0, -10, math.pi / 2, 6.0), None)
    assert y == pytest.approx(-10 + 12.0)
    assert v == 6.0


def test_unknown_behavior():
    with pytest.raises(UnknownBehavior):
        scripted_behavior("teleport", {}, 0.0, None, (0, 0, 0, 0))


# ---------------------------------------------------------------------------
# load / compose


def test_load_minimal(tmp_path):
    write_assets(tmp_path)
    f = tmp_path / "mini.scn"
    f.write_text(MINIMAL)
    s = load_scenario(f)
    assert s.name == "mini"
    assert s.mode == "non_reactive"
    assert s.ego.agent_id == "ego"
    assert len(s.participants) == 0
    assert s.sim.n_steps == 40
    assert s.background.centerline.length == pytest.approx(120.0)


def test_load_replay_missing_trajectory(tmp_path):
    write_assets(tmp_path)
    bad = MINIMAL + """
[participant.ghost]
mesh = assets/car.obj
mode = replay
initial = 10 0 0 5
"""
    f = tmp_path / "bad.scn"
    f.write_text(bad)
    with pytest.raises(ValidationError):
        load_scenario(f)


def test_compose_initial_poses(tmp_path):
    write_assets(tmp_path)
    f = tmp_path / "s.scn"
    f.write_text(WITH_PARTICIPANTS)
    s = load_scenario(f)
    snap = compose(s, 0.0, {"ego": FakeState(0, 0, 0, 8.0)})
    assert snap.by_id("ego").pose.translation[0] == 0.0
    assert snap.by_id("lead").pose.translation[0] == pytest.approx(20.0)
    assert snap.by_id("blocker").pose.translation[0] == pytest.approx(50.0)
    assert snap.by_id("blocker").v == 0.0


def test_compose_replay_matches_sample_pose(tmp_path):
    write_assets(tmp_path)
    f = tmp_path / "s.scn"
    f.write_text(WITH_PARTICIPANTS)
    s = load_scenario(f)
    t = 1.37
    snap = compose(s, t, {"ego": FakeState(0, 0, 0, 8.0)})
    lead = s.participant("lead")
    expect, ev = sample_pose(lead.trajectory, t, z=0.0)
    assert snap.by_id("lead").pose.almost_equal(expect, tol=1e-12)
    assert snap.by_id("lead").v == ev


def test_compose_missing_agent_state(tmp_path):
    write_assets(tmp_path)
    f = tmp_path / "s.scn"
    f.write_text(MINIMAL)
    s = load_scenario(f)
    with pytest.raises(MissingAgentState):
        compose(s, 0.0, {})


def test_compose_pure(tmp_path):
    write_assets(tmp_path)
    f = tmp_path / "s.scn"
    f.write_text(WITH_PARTICIPANTS)
    s = load_scenario(f)
    a = compose(s, 2.0, {"ego": FakeState(1, 2, 0.1, 8.0)}, {"blocker": None})
    b = compose(s, 2.0, {"ego": FakeState(1, 2, 0.1, 8.0)}, {"blocker": None})
    for ia, ib in zip(a.items, b.items):
        assert np.array_equal(ia.pose.translation, ib.pose.translation)
        assert np.array_equal(ia.pose.rotation, ib.pose.rotation)
        assert ia.v == ib.v


def test_roundtrip_identical_structure(tmp_path):
    write_assets(tmp_path)
    f = tmp_path / "s.scn"
    f.write_text(WITH_PARTICIPANTS)
    s1 = load_scenario(f)
    f2 = tmp_path / "s2.scn"
    save_scenario(s1, f2)
    s2 = load_scenario(f2)
    assert serialize_scenario(s1) == serialize_scenario(s2)
    assert s1.name == s2.name and s1.mode == s2.mode
    assert len(s1.participants) == len(s2.participants)
    np.testing.assert_array_equal(s1.background.centerline.points,
                                  s2.background.centerline.points)
    for p1, p2 in zip([s1.ego] + s1.participants, [s2.ego] + s2.participants):
        assert p1.pid == p2.pid and p1.mode == p2.mode
        np.testing.assert_array_equal(p1.footprint.half_extents,
                                      p2.footprint.half_extents)
        assert p1.initial == p2.initial


def test_lightmaps_fit_request(tmp_path):
    write_assets(tmp_path)
    text = MINIMAL.replace("[background]\n", "[background]\nlightmaps = fit\n")
    f = tmp_path / "fit.scn"
    f.write_text(text)
    s = load_scenario(f)
    assert s.background.lightmaps_path == "fit"
    from drivesim.agents import ConstantVelocityAgent
    from drivesim.simloop import run
    s.sim.n_steps = 1
    log = run(s, {"ego": ConstantVelocityAgent()})
    assert log.n_steps == 1


def test_shipped_suite_roundtrips():
    shipped = Path(__file__).resolve().parent.parent / "scenarios"
    paths = sorted(shipped.rglob("*.scn"))
    assert len(paths) == 20  # 14 non-reactive + 4 safety + 2 multi-agent
    for path in paths:
        s1 = load_scenario(path)
        text = serialize_scenario(s1)
        import tempfile
        with tempfile.NamedTemporaryFile("w", suffix=".scn", dir=path.parent,
                                         delete=False) as f:
            f.write(text)
            tmp = Path(f.name)
        try:
            s2 = load_scenario(tmp)
            assert serialize_scenario(s2) == text, path.name
        finally:
            tmp.unlink()
