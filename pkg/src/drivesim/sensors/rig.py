"""Sensor rig configuration: cameras, spinning LiDAR, and the BEV grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidRig
from ..geom import Pose


def camera_extrinsic(x: float, y: float, z: float, yaw: float = 0.0,
                     pitch: float = 0.0) -> Pose:
    """Camera-to-ego pose for a CV-convention camera (z forward, y down).

    yaw/pitch rotate the optical axis within the ego frame (x forward, z up).
    """
    base = np.array([[0.0, 0.0, 1.0],
                     [-1.0, 0.0, 0.0],
                     [0.0, -1.0, 0.0]])
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    return Pose(rz @ ry @ base, np.array([x, y, z]))


@dataclass
class CameraModel:
    name: str
    width: int
    height: int
    fx: float
    fy: float
    cx: float
    cy: float
    extrinsic: Pose = field(default_factory=Pose.identity)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidRig("camera resolution must be positive")
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidRig("focal lengths must be positive")
        if not (0 < self.cx < self.width) or not (0 < self.cy < self.height):
            raise InvalidRig("principal point outside the image")


@dataclass
class LidarModel:
    channels: int = 8
    vfov_min: float = math.radians(-15.0)
    vfov_max: float = math.radians(5.0)
    horiz_resolution: int = 180      # rays per revolution
    max_range: float = 75.0
    extrinsic: Pose = field(default_factory=Pose.identity)

    def __post_init__(self):
        if self.channels < 1:
            raise InvalidRig("lidar needs at least one channel")
        if self.max_range <= 0:
            raise InvalidRig("max_range must be positive")
        if self.horiz_resolution < 1:
            raise InvalidRig("horizontal resolution must be positive")
        if self.vfov_max < self.vfov_min:
            raise InvalidRig("vertical FOV inverted")

    def elevations(self) -> np.ndarray:
        if self.channels == 1:
            return np.array([(self.vfov_min + self.vfov_max) / 2.0])
        return np.linspace(self.vfov_min, self.vfov_max, self.channels)

    def azimuths(self) -> np.ndarray:
        return np.arange(self.horiz_resolution) * (2.0 * np.pi / self.horiz_resolution)


@dataclass
class BevGrid:
    extent: float = 32.0        # half-size, grid spans [-extent, extent)
    cells: int = 64             # cells per side
    split_height: float = 0.2   # bin-0/bin-1 boundary above ground
    clip_max: int = 5

    def __post_init__(self):
        if self.extent <= 0 or self.cells < 1:
            raise InvalidRig("BEV grid must have positive extent and cells")


@dataclass
class SensorRig:
    cameras: list = field(default_factory=list)       # list[CameraModel]
    lidar: LidarModel = field(default_factory=LidarModel)
    bev: BevGrid = field(default_factory=BevGrid)
    shade_samples: int = 16
    shadow_samples: int = 16
    shadows: bool = True
    supersample: bool = False
    sky_color: tuple = (0.55, 0.70, 0.85)
    include_camera_in_obs: bool = False
    include_lidar_points_in_obs: bool = False
    fg_roughness: float = 0.6
    fg_metallic: float = 0.0
    exposure: dict = field(default_factory=dict)      # camera name -> (A, t)
