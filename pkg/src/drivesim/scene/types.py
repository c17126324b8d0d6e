"""Scenario data model: background, participants, ego, and sim parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ValidationError
from ..geom import OrientedBox2D, Polyline, TriangleMesh
from ..score.config import ScoreConfig
from ..sensors import SensorRig
from .behaviors import BehaviorSpec
from .trajectory import Trajectory

MODES = ("non_reactive", "safety_test", "multi_agent")


@dataclass
class BackgroundScene:
    meshes: list                       # list[TriangleMesh], world coordinates
    ground_z: float = 0.0
    ground_normal: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    drivable_area: list = field(default_factory=list)   # list[Polygon2D]
    centerline: Polyline = None
    reference_trajectory: Trajectory = None             # recorded human drive
    lidar_reference_path: Optional[str] = None
    lightmaps_path: Optional[str] = None
    mesh_paths: list = field(default_factory=list)
    reference_path: Optional[str] = None

    def __post_init__(self):
        n = np.asarray(self.ground_normal, dtype=np.float64).reshape(3)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9 or n[2] <= 0:
            raise ValidationError("ground normal must be unit length in the +z hemisphere")
        self.ground_normal = n
        if self.centerline is not None and self.centerline.length <= 0:
            raise ValidationError("route centerline must have positive arc length")


@dataclass
class Participant:
    pid: str
    mesh: TriangleMesh
    footprint: OrientedBox2D            # template centered at the local origin
    mode: str                           # replay | scripted | agent
    initial: tuple                      # (x, y, heading, v)
    trajectory: Optional[Trajectory] = None
    behavior: Optional[BehaviorSpec] = None
    agent_id: Optional[str] = None
    command: str = "unknown"
    route: Optional[Polyline] = None                 # per-agent route override
    reference_trajectory: Optional[Trajectory] = None
    mesh_path: Optional[str] = None
    trajectory_path: Optional[str] = None
    reference_path: Optional[str] = None
    route_points: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.mode not in ("replay", "scripted", "agent"):
            raise ValidationError(f"participant {self.pid}: unknown mode {self.mode!r}")
        if self.mode == "replay" and self.trajectory is None:
            raise ValidationError(f"participant {self.pid}: replay mode requires a trajectory")
        if self.mode == "agent" and not self.agent_id:
            raise ValidationError(f"participant {self.pid}: agent mode requires agent_id")
        if self.mode == "scripted" and self.behavior is None:
            raise ValidationError(f"participant {self.pid}: scripted mode requires a behavior")
        if not (self.footprint.half_extents > 0).all():
            raise ValidationError(f"participant {self.pid}: footprint extents must be positive")


@dataclass
class SimParams:
    dt: float = 0.1
    n_steps: int = 40
    seed: int = 0
    agent_timeout: float = 10.0
    lookahead: float = 0.5
    controller: dict = field(default_factory=dict)   # lqr weight overrides

    def __post_init__(self):
        if self.dt <= 0:
            raise ValidationError("sim dt must be positive")
        if self.n_steps < 1:
            raise ValidationError("sim horizon must be at least one step")


@dataclass
class Scenario:
    name: str
    mode: str
    background: BackgroundScene
    ego: Participant
    participants: list                  # non-ego participants
    rig: SensorRig
    sim: SimParams
    scoring: ScoreConfig
    path: Optional[str] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown scenario mode {self.mode!r}")
        if self.ego.mode != "agent":
            raise ValidationError("ego must be an agent-mode participant")
        ids = [p.agent_id for p in self.agent_participants()]
        if len(ids) != len(set(ids)):
            raise ValidationError("agent ids must be unique")
        if self.mode == "multi_agent" and len(ids) < 2:
            raise ValidationError("multi_agent mode needs at least two agent participants")

    def agent_participants(self):
        out = [self.ego]
        out.extend(p for p in self.participants if p.mode == "agent")
        return out

    def participant(self, pid: str) -> Participant:
        if self.ego.pid == pid:
            return self.ego
        for p in self.participants:
            if p.pid == pid:
                return p
        raise KeyError(pid)

    def route_for(self, participant: Participant) -> Polyline:
        return participant.route or self.background.centerline

    def reference_for(self, participant: Participant) -> Trajectory:
        return participant.reference_trajectory or self.background.reference_trajectory
