"""Point clouds, their binary file format, and per-frame annotations.

Cloud file: little-endian, u32 point count, then count x (f32 x, y, z,
intensity). Annotation file: text, one `frame N` section per frame with
`ground_height`, `crop xmin ymin xmax ymax`, and zero or more
`box cx cy heading half_l half_w z_min z_max` lines.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ParseError, ValidationError
from ..geom import OrientedBox2D


@dataclass
class PointCloud:
    points: np.ndarray                 # (N, 3) meters
    intensity: np.ndarray = None       # (N,) in [0, 1]
    frame_id: int = 0

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        if self.intensity is None:
            self.intensity = np.zeros(len(self.points))
        self.intensity = np.asarray(self.intensity, dtype=np.float64).reshape(-1)
        if len(self.points) < 1:
            raise ValidationError("point cloud is empty")
        if not np.all(np.isfinite(self.points)):
            raise ValidationError("point cloud has non-finite coordinates")
        if len(self.intensity) != len(self.points):
            raise ValidationError("intensity length mismatch")

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class DynamicBox:
    box: OrientedBox2D
    z_min: float
    z_max: float


@dataclass
class FrameAnnotations:
    dynamic_boxes: list = field(default_factory=list)   # list[DynamicBox]
    ground_height: float = 0.0
    crop_region: tuple = (-100.0, -100.0, 100.0, 100.0)  # xmin, ymin, xmax, ymax

    def __post_init__(self):
        x0, y0, x1, y1 = self.crop_region
        if not (x1 > x0 and y1 > y0):
            raise ValidationError("crop region is degenerate")


def save_cloud(cloud: PointCloud, path) -> None:
    n = len(cloud)
    data = np.empty((n, 4), dtype="<f4")
    data[:, :3] = cloud.points
    data[:, 3] = cloud.intensity
    with Path(path).open("wb") as f:
        f.write(struct.pack("<I", n))
        f.write(data.tobytes())


def load_cloud(path, frame_id: int = 0) -> PointCloud:
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise ParseError("cloud file too short", path=path)
    (n,) = struct.unpack_from("<I", raw, 0)
    expect = 4 + 16 * n
    if len(raw) != expect:
        raise ParseError(f"cloud file size {len(raw)} != expected {expect}",
                         path=path)
    data = np.frombuffer(raw, dtype="<f4", offset=4).reshape(n, 4)
    return PointCloud(data[:, :3].astype(np.float64),
                      data[:, 3].astype(np.float64), frame_id=frame_id)


def load_annotations(path) -> dict:
    """Parse the annotation text format; returns {frame_index: FrameAnnotations}."""
    out = {}
    current = None
    cur_boxes, cur_ground, cur_crop = [], 0.0, (-100.0, -100.0, 100.0, 100.0)

    def flush():
        if current is not None:
            out[current] = FrameAnnotations(list(cur_boxes), cur_ground, cur_crop)

    with Path(path).open("r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if parts[0] == "frame":
                    flush()
                    current = int(parts[1])
                    cur_boxes = []
                    cur_ground = 0.0
                    cur_crop = (-100.0, -100.0, 100.0, 100.0)
                elif parts[0] == "ground_height":
                    cur_ground = float(parts[1])
                elif parts[0] == "crop":
                    cur_crop = tuple(float(p) for p in parts[1:5])
                elif parts[0] == "box":
                    cx, cy, heading, hl, hw, z0, z1 = (float(p) for p in parts[1:8])
                    cur_boxes.append(DynamicBox(
                        OrientedBox2D((cx, cy), heading, (hl, hw)), z0, z1))
                else:
                    raise ValueError(f"unknown directive {parts[0]!r}")
            except (ValueError, IndexError) as e:
                raise ParseError(str(e), path=path, line=lineno) from e
    flush()
    return out


def save_annotations(annotations: dict, path) -> None:
    lines = []
    for frame in sorted(annotations):
        ann = annotations[frame]
        lines.append(f"frame {frame}")
        lines.append(f"ground_height {ann.ground_height:.9g}")
        lines.append("crop %g %g %g %g" % tuple(ann.crop_region))
        for db in ann.dynamic_boxes:
            lines.append("box %.9g %.9g %.9g %.9g %.9g %.9g %.9g" % (
                db.box.center[0], db.box.center[1], db.box.heading,
                db.box.half_extents[0], db.box.half_extents[1],
                db.z_min, db.z_max))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
