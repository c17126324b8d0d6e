"""Oriented 2D boxes: separating-axis overlap and polygon-clipping IoU."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class OrientedBox2D:
    center: np.ndarray        # (2,) meters
    heading: float            # radians
    half_extents: np.ndarray  # (2,) along local x (length) and y (width)

    def __post_init__(self):
        object.__setattr__(self, "center",
                           np.asarray(self.center, dtype=np.float64).reshape(2))
        object.__setattr__(self, "half_extents",
                           np.asarray(self.half_extents, dtype=np.float64).reshape(2))
        if not (self.half_extents > 0).all():
            raise ValidationError("box half_extents must be positive")

    def corners(self) -> np.ndarray:
        """Corner ring (4, 2), counter-clockwise."""
        hl, hw = self.half_extents
        local = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
        c, s = math.cos(self.heading), math.sin(self.heading)
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + self.center

    def area(self) -> float:
        return float(4.0 * self.half_extents[0] * self.half_extents[1])

    def translated(self, dx: float, dy: float) -> "OrientedBox2D":
        return OrientedBox2D(self.center + (dx, dy), self.heading, self.half_extents)

    def at(self, x: float, y: float, heading: float) -> "OrientedBox2D":
        """Footprint template placed at a new planar pose."""
        return OrientedBox2D(np.array([x, y]), heading, self.half_extents)

    def contains_point(self, p) -> bool:
        d = np.asarray(p, dtype=np.float64) - self.center
        c, s = math.cos(self.heading), math.sin(self.heading)
        lx = c * d[0] + s * d[1]
        ly = -s * d[0] + c * d[1]
        hl, hw = self.half_extents
        return abs(lx) <= hl and abs(ly) <= hw


def _axes(box: OrientedBox2D) -> np.ndarray:
    c, s = math.cos(box.heading), math.sin(box.heading)
    return np.array([[c, s], [-s, c]])


def boxes_overlap(a: OrientedBox2D, b: OrientedBox2D) -> bool:
    """Separating-axis test; true iff the intersection has positive area."""
    ca, cb = a.corners(), b.corners()
    for axis in np.vstack([_axes(a), _axes(b)]):
        pa = ca @ axis
        pb = cb @ axis
        # touching boundaries (zero-area contact) do not count as overlap
        if pa.max() <= pb.min() or pb.max() <= pa.min():
            return False
    return True


def _clip_polygon(poly: np.ndarray, edge_a: np.ndarray, edge_b: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon by the left half-plane of a->b."""
    if len(poly) == 0:
        return poly
    d = edge_b - edge_a
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        side_p = d[0] * (p[1] - edge_a[1]) - d[1] * (p[0] - edge_a[0])
        side_q = d[0] * (q[1] - edge_a[1]) - d[1] * (q[0] - edge_a[0])
        if side_p >= 0:
            out.append(p)
            if side_q < 0:
                t = side_p / (side_p - side_q)
                out.append(p + t * (q - p))
        elif side_q >= 0:
            t = side_p / (side_p - side_q)
            out.append(p + t * (q - p))
    return np.array(out) if out else np.empty((0, 2))


def _shoelace(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def intersection_area(a: OrientedBox2D, b: OrientedBox2D) -> float:
    poly = a.corners()
    cb = b.corners()
    for i in range(4):
        poly = _clip_polygon(poly, cb[i], cb[(i + 1) % 4])
        if len(poly) == 0:
            return 0.0
    return _shoelace(poly)


def oriented_iou(a: OrientedBox2D, b: OrientedBox2D) -> float:
    inter = intersection_area(a, b)
    if inter <= 0.0:
        return 0.0
    # clipping noise can leave the containment case a few ulp off; snap it
    smaller = min(a.area(), b.area())
    if abs(inter - smaller) <= 1e-9 * smaller:
        inter = smaller
    union = a.area() + b.area() - inter
    return min(max(inter / union, 0.0), 1.0)
