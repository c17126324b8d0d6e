#!/usr/bin/env python3
"""Generate the shipped scenario suite (assets + configs) deterministically.

Run from the repo root:  python3 tools/make_scenarios.py
"""

import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from drivesim.geom import make_car, make_quad, save_mesh
from drivesim.scene import save_trajectory_csv, straight_trajectory

SCENARIOS = ROOT / "scenarios"
ASSETS = SCENARIOS / "assets"

SENSORS = """\
[sensors]
camera.front = 64 48 40.0 40.0 32.0 24.0 | 1.5 0.0 1.6 | 0.0 0.0
lidar = 8 -0.30 0.05 120 60.0 | 0.0 0.0 1.8
bev = 32.0 64 0.2 5
shade_samples = 4
shadow_samples = 4
shadows = true
sky = 0.55 0.70 0.85
"""

SIM = """\
[sim]
dt = 0.1
n_steps = 40
seed = 7

[scoring]
weights = 5 5 2
ttc_threshold = 1.0
ttc_horizon = 3.0
"""


def rot(heading, x, y):
    c, s = math.cos(heading), math.sin(heading)
    return c * x - s * y, s * x + c * y


def lane_polygon(x0, y0, heading, back, ahead, halfwidth):
    """Rectangle along a straight route, as 'x,y x,y ...' text."""
    pts = []
    for lx, ly in ((-back, -halfwidth), (ahead, -halfwidth),
                   (ahead, halfwidth), (-back, halfwidth)):
        wx, wy = rot(heading, lx, ly)
        pts.append((x0 + wx, y0 + wy))
    return " ".join(f"{repr(px)},{repr(py)}" for px, py in pts)


def centerline(x0, y0, heading, back, ahead):
    bx, by = rot(heading, -back, 0.0)
    ax, ay = rot(heading, ahead, 0.0)
    return (f"{repr(x0 + bx)},{repr(y0 + by)} "
            f"{repr(x0 + ax)},{repr(y0 + ay)}")


def write_assets():
    ASSETS.mkdir(parents=True, exist_ok=True)
    save_mesh(make_quad(300.0, 300.0, z=0.0, albedo=(0.32, 0.34, 0.33)),
              ASSETS / "ground.obj")
    save_mesh(make_car(albedo=(0.20, 0.35, 0.70)), ASSETS / "car_ego.obj")
    save_mesh(make_car(albedo=(0.70, 0.15, 0.12)), ASSETS / "car_red.obj")
    save_mesh(make_car(albedo=(0.15, 0.55, 0.20)), ASSETS / "car_green.obj")


def participant_text(pid, mesh, traj_rel, x, y, heading, v):
    return f"""
[participant.{pid}]
mesh = {mesh}
footprint = 4.5 1.9
mode = replay
trajectory = {traj_rel}
initial = {repr(x)} {repr(y)} {repr(heading)} {repr(v)}
"""


def make_nonreactive():
    out = SCENARIOS / "nonreactive"
    out.mkdir(parents=True, exist_ok=True)
    headings = [0.0, math.pi / 2, -math.pi / 2, math.pi / 4, -math.pi / 4,
                3 * math.pi / 4, 0.0, math.pi / 2, -math.pi / 4, 0.6,
                -0.6, 2.2, 0.0, math.pi / 2]
    speeds = [8.0, 7.0, 9.0, 8.0, 10.0, 6.0, 11.0, 8.0, 7.5, 9.0,
              8.5, 6.5, 12.0, 7.0]
    starts = [(0.0, 0.0), (5.0, -10.0), (-8.0, 12.0), (0.0, 0.0), (10.0, 5.0),
              (0.0, 0.0), (-20.0, 3.0), (4.0, 4.0), (0.0, -6.0), (2.0, 0.0),
              (0.0, 8.0), (-5.0, -5.0), (0.0, 0.0), (6.0, 1.0)]
    for i in range(14):
        n = i + 1
        h, v = headings[i], speeds[i]
        x0, y0 = starts[i]
        dur = 4.0
        ref = straight_trajectory(x0, y0, h, v, dur + 1.0)
        ref_rel = f"../assets/nr_{n:02d}_ego.csv"
        save_trajectory_csv(ref, ASSETS / f"nr_{n:02d}_ego.csv")

        parts = []
        # lead vehicle, same lane, same speed, 18 m ahead
        lx, ly = rot(h, 18.0, 0.0)
        lead = straight_trajectory(x0 + lx, y0 + ly, h, v, dur + 1.0)
        save_trajectory_csv(lead, ASSETS / f"nr_{n:02d}_lead.csv")
        parts.append(participant_text("lead", "../assets/car_red.obj",
                                      f"../assets/nr_{n:02d}_lead.csv",
                                      x0 + lx, y0 + ly, h, v))
        if i % 2 == 0:
            # oncoming traffic in the adjacent lane
            ox, oy = rot(h, v * dur + 30.0, 3.5)
            oh = h + math.pi if h <= 0 else h - math.pi
            onc = straight_trajectory(x0 + ox, y0 + oy, oh, 7.0, dur + 1.0)
            save_trajectory_csv(onc, ASSETS / f"nr_{n:02d}_oncoming.csv")
            parts.append(participant_text("oncoming", "../assets/car_green.obj",
                                          f"../assets/nr_{n:02d}_oncoming.csv",
                                          x0 + ox, y0 + oy, oh, 7.0))
        if i % 3 == 0:
            # parked car on the shoulder
            px, py = rot(h, 12.0, -3.6)
            parked = straight_trajectory(x0 + px, y0 + py, h, 0.0, dur + 1.0)
            save_trajectory_csv(parked, ASSETS / f"nr_{n:02d}_parked.csv")
            parts.append(participant_text("parked", "../assets/car_green.obj",
                                          f"../assets/nr_{n:02d}_parked.csv",
                                          x0 + px, y0 + py, h, 0.0))

        ahead = v * dur + 40.0
        text = f"""[scenario]
name = nr_{n:02d}
mode = non_reactive

[background]
mesh = ../assets/ground.obj
ground_z = 0.0
drivable = {lane_polygon(x0, y0, h, 15.0, ahead, 6.0)}
centerline = {centerline(x0, y0, h, 15.0, ahead)}
reference_trajectory = {ref_rel}

[ego]
mesh = ../assets/car_ego.obj
footprint = 4.5 1.9
initial = {repr(x0)} {repr(y0)} {repr(h)} {repr(v)}
agent_id = ego
command = straight
{"".join(parts)}
{SENSORS}
{SIM}"""
        (out / f"nr_{n:02d}.scn").write_text(text)


def make_safety():
    out = SCENARIOS / "safety"
    out.mkdir(parents=True, exist_ok=True)
    ref = straight_trajectory(0.0, 0.0, 0.0, 8.0, 5.0)
    save_trajectory_csv(ref, ASSETS / "safety_ego.csv")

    blocker = f"""[scenario]
name = safety_blocker
mode = safety_test

[background]
mesh = ../assets/ground.obj
ground_z = 0.0
drivable = {lane_polygon(0.0, 0.0, 0.0, 15.0, 80.0, 6.0)}
centerline = {centerline(0.0, 0.0, 0.0, 15.0, 80.0)}
reference_trajectory = ../assets/safety_ego.csv

[ego]
mesh = ../assets/car_ego.obj
footprint = 4.5 1.9
initial = 0.0 0.0 0.0 8.0
agent_id = ego
command = straight

[participant.blocker]
mesh = ../assets/car_red.obj
footprint = 4.5 1.9
mode = scripted
behavior = stationary
initial = 30.0 0.0 0.0 0.0

{SENSORS}
{SIM}"""
    (out / "safety_blocker.scn").write_text(blocker)

    brake = f"""[scenario]
name = safety_brake
mode = safety_test

[background]
mesh = ../assets/ground.obj
ground_z = 0.0
drivable = {lane_polygon(0.0, 0.0, 0.0, 15.0, 80.0, 6.0)}
centerline = {centerline(0.0, 0.0, 0.0, 15.0, 80.0)}
reference_trajectory = ../assets/safety_ego.csv

[ego]
mesh = ../assets/car_ego.obj
footprint = 4.5 1.9
initial = 0.0 0.0 0.0 8.0
agent_id = ego
command = straight

[participant.lead]
mesh = ../assets/car_red.obj
footprint = 4.5 1.9
mode = scripted
behavior = sudden_brake
initial = 12.0 0.0 0.0 8.0
speed = 8.0
a_brake = 4.0
trigger_time = 1.0

{SENSORS}
{SIM}"""
    (out / "safety_brake.scn").write_text(brake)

    cutin = f"""[scenario]
name = safety_cutin
mode = safety_test

[background]
mesh = ../assets/ground.obj
ground_z = 0.0
drivable = {lane_polygon(0.0, 0.0, 0.0, 15.0, 80.0, 6.0)}
centerline = {centerline(0.0, 0.0, 0.0, 15.0, 80.0)}
reference_trajectory = ../assets/safety_ego.csv

[ego]
mesh = ../assets/car_ego.obj
footprint = 4.5 1.9
initial = 0.0 0.0 0.0 8.0
agent_id = ego
command = straight

[participant.cutter]
mesh = ../assets/car_green.obj
footprint = 4.5 1.9
mode = scripted
behavior = cut_in
initial = 8.0 -3.5 0.0 6.0
speed = 6.0
lane_width = 3.5
cut_duration = 1.5
trigger_distance = 12.0

{SENSORS}
{SIM}"""
    (out / "safety_cutin.scn").write_text(cutin)

    cross = f"""[scenario]
name = safety_cross
mode = safety_test

[background]
mesh = ../assets/ground.obj
ground_z = 0.0
drivable = {lane_polygon(0.0, 0.0, 0.0, 15.0, 80.0, 6.0)}
drivable.1 = {lane_polygon(25.0, 0.0, math.pi / 2, 40.0, 40.0, 6.0)}
centerline = {centerline(0.0, 0.0, 0.0, 15.0, 80.0)}
reference_trajectory = ../assets/safety_ego.csv

[ego]
mesh = ../assets/car_ego.obj
footprint = 4.5 1.9
initial = 0.0 0.0 0.0 8.0
agent_id = ego
command = straight

[participant.crosser]
mesh = ../assets/car_green.obj
footprint = 4.5 1.9
mode = scripted
behavior = intersection_cross
initial = 25.0 -14.0 1.5707963267948966 6.0
speed = 6.0
trigger_distance = 22.0

{SENSORS}
{SIM}"""
    (out / "safety_cross.scn").write_text(cross)


def make_multiagent():
    out = SCENARIOS / "multiagent"
    out.mkdir(parents=True, exist_ok=True)
    # a1 eastbound along y=0, a2 northbound along x=0 (mirror flips a2 south)
    a1_ref = straight_trajectory(-30.0, 0.0, 0.0, 8.0, 5.0)
    save_trajectory_csv(a1_ref, ASSETS / "ma_a1.csv")
    a2_ref = straight_trajectory(0.0, -36.0, math.pi / 2, 8.0, 5.0)
    save_trajectory_csv(a2_ref, ASSETS / "ma_a2.csv")
    a2m_ref = straight_trajectory(0.0, 36.0, -math.pi / 2, 8.0, 5.0)
    save_trajectory_csv(a2m_ref, ASSETS / "ma_a2_mirror.csv")

    def crossing(name, a2_init, a2_route, a2_ref_rel):
        return f"""[scenario]
name = {name}
mode = multi_agent

[background]
mesh = ../assets/ground.obj
ground_z = 0.0
drivable = {lane_polygon(0.0, 0.0, 0.0, 40.0, 40.0, 6.0)}
drivable.1 = {lane_polygon(0.0, 0.0, math.pi / 2, 45.0, 45.0, 6.0)}
centerline = {centerline(0.0, 0.0, 0.0, 40.0, 40.0)}
reference_trajectory = ../assets/ma_a1.csv

[ego]
mesh = ../assets/car_ego.obj
footprint = 4.5 1.9
initial = -30.0 0.0 0.0 8.0
agent_id = a1
command = straight
route = -40.0,0.0 40.0,0.0
reference_trajectory = ../assets/ma_a1.csv

[participant.second]
mesh = ../assets/car_red.obj
footprint = 4.5 1.9
mode = agent
agent_id = a2
initial = {a2_init}
command = straight
route = {a2_route}
reference_trajectory = {a2_ref_rel}

{SENSORS}
{SIM}"""

    (out / "ma_crossing.scn").write_text(crossing(
        "ma_crossing",
        "0.0 -36.0 1.5707963267948966 8.0",
        "0.0,-45.0 0.0,45.0",
        "../assets/ma_a2.csv"))
    (out / "ma_crossing_mirror.scn").write_text(crossing(
        "ma_crossing_mirror",
        "0.0 36.0 -1.5707963267948966 8.0",
        "0.0,45.0 0.0,-45.0",
        "../assets/ma_a2_mirror.csv"))


if __name__ == "__main__":
    write_assets()
    make_nonreactive()
    make_safety()
    make_multiagent()
    count = len(list((SCENARIOS / "nonreactive").glob("*.scn")))
    print(f"wrote {count} non-reactive + safety + multi-agent scenarios under {SCENARIOS}")
