#!/usr/bin/env python3
"""Emit golden wire-protocol frames from the harness encoders.

The SDK's byte-exactness tests decode and re-encode these fixtures.
Run from the repo root:  python3 tools/make_golden_frames.py
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

import numpy as np

from drivesim.agents import Observation, protocol
from drivesim.scene import Trajectory
from drivesim.sensors import EgoStatus

OUT = ROOT / "sdk" / "tests" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    (OUT / "hello.bin").write_bytes(protocol.encode_hello("ego"))
    (OUT / "error_version.bin").write_bytes(
        protocol.encode_error(protocol.ERR_VERSION_MISMATCH,
                              "server speaks version 1"))

    bev = np.zeros((8, 8, 2), dtype=np.float32)
    bev[3, 4, 0] = 2.0
    bev[5, 2, 1] = 5.0
    cam = (np.arange(4 * 3 * 3, dtype=np.float32) / 64.0).reshape(3, 4, 3)
    pts = np.array([[1.5, -2.0, 0.25, 0.8],
                    [10.0, 0.5, 1.75, 0.3],
                    [-4.25, 3.0, 0.0, 1.0]], dtype=np.float32)
    obs = Observation(
        ego=EgoStatus(t=1.25, x=-3.5, y=12.0625, heading=0.78125, v=8.5,
                      a=-0.375, command="left"),
        bev=bev, bev_extent=32.0, bev_split_height=0.2,
        cameras={"front": cam}, lidar_points=pts)
    (OUT / "observation.bin").write_bytes(protocol.encode_observation(obs))

    plan = Trajectory(
        t=[0.1, 0.2, 0.3, 0.4, 0.5],
        x=[0.0, 0.8125, 1.625, 2.4375, 3.25],
        y=[0.0, -0.125, -0.25, -0.375, -0.5],
        heading=[0.1, 0.1, 0.1, 0.1, 0.1],
        v=[8.125, 8.125, 8.125, 8.125, 8.125])
    (OUT / "plan.bin").write_bytes(protocol.encode_plan(plan))

    print(f"wrote fixtures -> {OUT}")


if __name__ == "__main__":
    main()
