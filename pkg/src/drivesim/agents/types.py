"""Agent-boundary data: what planners receive and what they must return."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from ..scene import Trajectory
from ..sensors import EgoStatus

COMMANDS = ("left", "right", "straight", "unknown")
COMMAND_CODES = {name: i for i, name in enumerate(COMMANDS)}


@dataclass
class Observation:
    ego: EgoStatus
    bev: np.ndarray = None              # (cells, cells, 2) float32 counts
    bev_extent: float = 32.0
    bev_split_height: float = 0.2
    cameras: dict = field(default_factory=dict)   # name -> rgb (H, W, 3) float32
    lidar_points: np.ndarray = None     # (N, 4) float32 (x, y, z, intensity), ego frame

    def __post_init__(self):
        if self.ego.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.ego.command!r}")
        if self.bev is not None:
            self.bev = np.asarray(self.bev, dtype=np.float32)
        if self.lidar_points is not None:
            self.lidar_points = np.asarray(self.lidar_points,
                                           dtype=np.float32).reshape(-1, 4)


def validate_plan(plan: Trajectory, t_now: float, dt: float) -> Trajectory:
    """Plans must hold >= 2 waypoints strictly increasing from t_now + dt."""
    if plan is None or len(plan) < 2:
        raise ValidationError("plan needs at least 2 waypoints")
    if plan.t[0] < t_now + dt - 1e-9:
        raise ValidationError("plan must start at or after t + dt")
    return plan
