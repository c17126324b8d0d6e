"""Spinning LiDAR simulation and merged-cloud reprojection onto the scan grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geom import Pose, shade_attributes, trace_batch
from ..registration import PointCloud
from .rig import LidarModel
from .view import SceneView

_LUMA = np.array([0.2126, 0.7152, 0.0722])
_FOV_EPS = 1e-9


@dataclass
class RangeImage:
    depth: np.ndarray       # (channels, width) float32 meters, 0 = no return
    intensity: np.ndarray   # (channels, width) float32 in [0, 1]

    def __post_init__(self):
        self.depth = np.asarray(self.depth, dtype=np.float32)
        self.intensity = np.asarray(self.intensity, dtype=np.float32)

    @property
    def shape(self):
        return self.depth.shape


def _ray_grid(lidar: LidarModel):
    elev = lidar.elevations()
    azim = lidar.azimuths()
    ce = np.cos(elev)[:, None]
    se = np.sin(elev)[:, None]
    ca = np.cos(azim)[None, :]
    sa = np.sin(azim)[None, :]
    dirs = np.stack([ce * ca, ce * sa,
                     np.broadcast_to(se, (len(elev), len(azim)))], axis=-1)
    return dirs.reshape(-1, 3)


def render_lidar(view: SceneView, lidar: LidarModel, ego_pose: Pose) -> RangeImage:
    """Nearest surface per (channel, azimuth) ray, up to max_range.

    Intensity is the surface albedo luminance attenuated by 1/(1 + d/max_range);
    this attenuation model is synthetic.
    """
    sensor_pose = ego_pose.compose(lidar.extrinsic)
    dirs = _ray_grid(lidar) @ sensor_pose.rotation.T
    origin = np.broadcast_to(sensor_pose.translation, dirs.shape)
    c, w = lidar.channels, lidar.horiz_resolution

    depth = np.zeros(c * w)
    intensity = np.zeros(c * w)
    for scene in (view.background, view.foreground):
        t, tri, u, v = trace_batch(scene, origin, dirs, t_max=lidar.max_range)
        hit = tri >= 0
        if not hit.any():
            continue
        closer = hit & ((depth == 0.0) | (t < depth))
        idx = np.nonzero(closer)[0]
        _, alb = shade_attributes(scene, tri[idx], u[idx], v[idx])
        depth[idx] = t[idx]
        intensity[idx] = (alb @ _LUMA) / (1.0 + t[idx] / lidar.max_range)
    return RangeImage(depth.reshape(c, w), intensity.reshape(c, w))


def range_image_to_points(ri: RangeImage, lidar: LidarModel,
                          ego_pose: Pose) -> PointCloud:
    """World-frame point cloud of all returns in a range image."""
    sensor_pose = ego_pose.compose(lidar.extrinsic)
    dirs = _ray_grid(lidar) @ sensor_pose.rotation.T
    depth = ri.depth.reshape(-1).astype(np.float64)
    valid = depth > 0.0
    pts = sensor_pose.translation + depth[valid, None] * dirs[valid]
    return PointCloud(pts, ri.intensity.reshape(-1)[valid].astype(np.float64))


def reproject_merged(points: PointCloud, sensor_pose: Pose,
                     model: LidarModel) -> RangeImage:
    """Bin world points onto the scan grid, keeping the smaller depth per bin.

    Points outside the vertical FOV are dropped; within it, each point maps to
    the nearest channel and azimuth column.
    """
    c, w = model.channels, model.horiz_resolution
    rel = (points.points - sensor_pose.translation) @ sensor_pose.rotation
    rng = np.linalg.norm(rel, axis=1)
    ok = rng > 0.0
    rel, rng = rel[ok], rng[ok]
    inten = points.intensity[ok]

    elev = np.arcsin(np.clip(rel[:, 2] / rng, -1.0, 1.0))
    in_fov = (elev >= model.vfov_min - _FOV_EPS) & (elev <= model.vfov_max + _FOV_EPS)
    rel, rng, elev, inten = rel[in_fov], rng[in_fov], elev[in_fov], inten[in_fov]

    if model.channels == 1:
        ch = np.zeros(len(rng), dtype=np.int64)
    else:
        spacing = (model.vfov_max - model.vfov_min) / (model.channels - 1)
        ch = np.clip(np.round((elev - model.vfov_min) / spacing).astype(np.int64),
                     0, c - 1)
    azim = np.arctan2(rel[:, 1], rel[:, 0]) % (2.0 * np.pi)
    col = np.round(azim / (2.0 * np.pi / w)).astype(np.int64) % w

    depth = np.zeros((c, w))
    intensity = np.zeros((c, w))
    if len(rng):
        flat = ch * w + col
        # stable sort by (bin, range): first row per bin is the nearest point
        order = np.lexsort((rng, flat))
        flat_sorted = flat[order]
        first = np.ones(len(order), dtype=bool)
        first[1:] = flat_sorted[1:] != flat_sorted[:-1]
        sel = order[first]
        depth.reshape(-1)[flat[sel]] = rng[sel]
        intensity.reshape(-1)[flat[sel]] = inten[sel]
    return RangeImage(depth, intensity)
