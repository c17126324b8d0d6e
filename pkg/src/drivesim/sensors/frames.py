"""Per-step observation bundles and their content digests."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .lidar import RangeImage


@dataclass
class EgoStatus:
    t: float
    x: float
    y: float
    heading: float
    v: float
    a: float = 0.0
    command: str = "unknown"    # left / right / straight / unknown


@dataclass
class SensorFrame:
    ego_status: EgoStatus
    cameras: dict = field(default_factory=dict)   # name -> (rgb f32, depth f32)
    lidar: RangeImage = None
    lidar_points: np.ndarray = None               # (N, 3) world frame, float64
    lidar_intensity: np.ndarray = None
    bev: np.ndarray = None                        # (cells, cells, 2) int32

    def digest(self) -> str:
        h = hashlib.sha256()
        for name in sorted(self.cameras):
            rgb, depth = self.cameras[name]
            h.update(name.encode())
            h.update(np.ascontiguousarray(rgb).tobytes())
            h.update(np.ascontiguousarray(depth).tobytes())
        if self.lidar is not None:
            h.update(np.ascontiguousarray(self.lidar.depth).tobytes())
            h.update(np.ascontiguousarray(self.lidar.intensity).tobytes())
        if self.bev is not None:
            h.update(np.ascontiguousarray(self.bev).tobytes())
        return h.hexdigest()
