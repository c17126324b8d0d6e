"""Multimodal sensor rendering: pinhole cameras, spinning LiDAR, BEV encoding."""

from .bev import bev_histogram
from .camera import apply_exposure, pixel_rays, render_camera
from .frames import EgoStatus, SensorFrame
from .lidar import RangeImage, range_image_to_points, render_lidar, reproject_merged
from .rig import BevGrid, CameraModel, LidarModel, SensorRig, camera_extrinsic
from .view import SceneView, ShadowCaster

__all__ = [
    "CameraModel", "LidarModel", "BevGrid", "SensorRig", "camera_extrinsic",
    "SceneView", "ShadowCaster",
    "render_camera", "apply_exposure", "pixel_rays",
    "RangeImage", "render_lidar", "range_image_to_points", "reproject_merged",
    "bev_histogram",
    "EgoStatus", "SensorFrame",
]
