"""Geometric primitives and ray casting shared by sensors, scoring, and composition."""

from .boxes import OrientedBox2D, boxes_overlap, intersection_area, oriented_iou
from .bvh import FlatScene, build_scene
from .mesh import (TriangleMesh, load_mesh, make_box, make_car,
                   make_cylinder_wall, make_quad, make_uv_sphere, merge_meshes,
                   save_mesh)
from .polygon import (Polygon2D, Polyline, footprint_in_polygon,
                      footprint_in_union)
from .pose import Pose, wrap_angle
from .trace import RayHit, occluded_batch, ray_cast, shade_attributes, trace_batch

__all__ = [
    "OrientedBox2D", "boxes_overlap", "intersection_area", "oriented_iou",
    "FlatScene", "build_scene",
    "TriangleMesh", "load_mesh", "save_mesh", "make_box", "make_car",
    "make_cylinder_wall", "make_quad", "make_uv_sphere", "merge_meshes",
    "Polygon2D", "Polyline", "footprint_in_polygon", "footprint_in_union",
    "Pose", "wrap_angle",
    "RayHit", "ray_cast", "trace_batch", "occluded_batch", "shade_attributes",
]
