"""Simple polygons, boundary-inclusive containment, and polyline projection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .boxes import OrientedBox2D

_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class Polygon2D:
    """Simple (non-self-intersecting) ring of 2D vertices."""

    vertices: np.ndarray  # (N, 2)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 2)
        object.__setattr__(self, "vertices", v)
        if len(v) < 3:
            raise ValidationError("polygon needs at least 3 vertices")
        if abs(self.signed_area()) < 1e-12:
            raise ValidationError("polygon has zero area")

    def signed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def contains_point(self, p) -> bool:
        """Even-odd containment; points on the boundary count as inside."""
        px, py = float(p[0]), float(p[1])
        v = self.vertices
        n = len(v)
        inside = False
        for i in range(n):
            x1, y1 = v[i]
            x2, y2 = v[(i + 1) % n]
            # boundary check: distance from p to segment
            dx, dy = x2 - x1, y2 - y1
            seg2 = dx * dx + dy * dy
            if seg2 > 0:
                t = ((px - x1) * dx + (py - y1) * dy) / seg2
                t = min(max(t, 0.0), 1.0)
                qx, qy = x1 + t * dx, y1 + t * dy
            else:
                qx, qy = x1, y1
            if (px - qx) ** 2 + (py - qy) ** 2 <= _EDGE_EPS ** 2:
                return True
            if (y1 > py) != (y2 > py):
                xi = x1 + (py - y1) * dx / dy
                if px < xi:
                    inside = not inside
        return inside


def footprint_in_polygon(box: OrientedBox2D, area: Polygon2D) -> bool:
    """True iff all four corners and the center lie inside or on the boundary."""
    if not area.contains_point(box.center):
        return False
    return all(area.contains_point(c) for c in box.corners())


def footprint_in_union(box: OrientedBox2D, areas) -> bool:
    """Corners + center each covered by at least one polygon of the set."""
    pts = [box.center] + list(box.corners())
    return all(any(a.contains_point(p) for a in areas) for p in pts)


class Polyline:
    """Arc-length parameterized 2D polyline (route centerlines)."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        if len(pts) < 2:
            raise ValidationError("polyline needs at least 2 points")
        seg = np.diff(pts, axis=0)
        lens = np.linalg.norm(seg, axis=1)
        if lens.sum() <= 0:
            raise ValidationError("polyline has zero length")
        self.points = pts
        self.seg = seg
        self.seg_len = lens
        self.cum = np.concatenate([[0.0], np.cumsum(lens)])

    @property
    def length(self) -> float:
        return float(self.cum[-1])

    def project(self, p) -> float:
        """Arc-length station of the closest point on the polyline."""
        p = np.asarray(p, dtype=np.float64).reshape(2)
        rel = p - self.points[:-1]
        denom = np.where(self.seg_len > 0, self.seg_len ** 2, 1.0)
        t = np.clip((rel * self.seg).sum(axis=1) / denom, 0.0, 1.0)
        closest = self.points[:-1] + t[:, None] * self.seg
        d2 = ((closest - p) ** 2).sum(axis=1)
        i = int(np.argmin(d2))
        return float(self.cum[i] + t[i] * self.seg_len[i])

    def point_at(self, s: float) -> np.ndarray:
        s = min(max(s, 0.0), self.length)
        i = int(np.searchsorted(self.cum, s, side="right") - 1)
        i = min(i, len(self.seg) - 1)
        ds = s - self.cum[i]
        frac = ds / self.seg_len[i] if self.seg_len[i] > 0 else 0.0
        return self.points[i] + frac * self.seg[i]

    def heading_at(self, s: float) -> float:
        s = min(max(s, 0.0), self.length)
        i = int(np.searchsorted(self.cum, s, side="right") - 1)
        i = min(max(i, 0), len(self.seg) - 1)
        return float(np.arctan2(self.seg[i, 1], self.seg[i, 0]))
