"""Time-stamped planar trajectories: CSV ingestion and pose interpolation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import EmptyTrajectory, MissingAsset, ParseError, ValidationError
from ..geom import Pose, wrap_angle


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        for name in ("t", "x", "y", "heading", "v"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64).reshape(-1))
        n = len(self.t)
        if n == 0:
            raise EmptyTrajectory("trajectory has no samples")
        if n < 2:
            raise ValidationError("trajectory needs at least 2 samples")
        for name in ("x", "y", "heading", "v"):
            if len(getattr(self, name)) != n:
                raise ValidationError("trajectory column length mismatch")
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValidationError(f"trajectory column {name} has non-finite values")
        if not (np.diff(self.t) > 0).all():
            raise ValidationError("trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def t_start(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def sample(self, t: float):
        """(x, y, heading, v) at time t; clamped and held past the ends."""
        if t <= self.t[0]:
            return float(self.x[0]), float(self.y[0]), float(self.heading[0]), float(self.v[0])
        if t >= self.t[-1]:
            return float(self.x[-1]), float(self.y[-1]), float(self.heading[-1]), float(self.v[-1])
        i = int(np.searchsorted(self.t, t, side="right")) - 1
        t0, t1 = self.t[i], self.t[i + 1]
        frac = (t - t0) / (t1 - t0)
        x = self.x[i] + frac * (self.x[i + 1] - self.x[i])
        y = self.y[i] + frac * (self.y[i + 1] - self.y[i])
        h = wrap_angle(self.heading[i]
                       + frac * wrap_angle(self.heading[i + 1] - self.heading[i]))
        v = self.v[i] + frac * (self.v[i + 1] - self.v[i])
        return float(x), float(y), float(h), float(v)

    def positions(self) -> np.ndarray:
        return np.stack([self.x, self.y], axis=1)


def sample_pose(traj: Trajectory, t: float, z: float = 0.0):
    """Interpolated (Pose, speed) at time t; heading takes the shortest arc."""
    if traj is None or len(traj) == 0:
        raise EmptyTrajectory("cannot sample an empty trajectory")
    x, y, h, v = traj.sample(t)
    return Pose.from_xyyaw(x, y, h, z=z), v


def load_trajectory_csv(path) -> Trajectory:
    """CSV with header t,x,y,heading,v."""
    path = Path(path)
    if not path.exists():
        raise MissingAsset(path)
    rows = []
    with path.open("r", encoding="utf-8") as f:
        header = f.readline().strip()
        if [c.strip() for c in header.split(",")] != ["t", "x", "y", "heading", "v"]:
            raise ParseError("expected header 't,x,y,heading,v'", path=path, line=1)
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ParseError("expected 5 columns", path=path, line=lineno)
            try:
                rows.append([float(p) for p in parts])
            except ValueError as e:
                raise ParseError(str(e), path=path, line=lineno) from e
    if not rows:
        raise ParseError("trajectory file has no samples", path=path)
    arr = np.array(rows)
    return Trajectory(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4])


def save_trajectory_csv(traj: Trajectory, path) -> None:
    lines = ["t,x,y,heading,v"]
    for i in range(len(traj)):
        lines.append("%.9g,%.9g,%.9g,%.9g,%.9g" % (
            traj.t[i], traj.x[i], traj.y[i], traj.heading[i], traj.v[i]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def straight_trajectory(x0: float, y0: float, heading: float, v: float,
                        duration: float, dt: float = 0.1,
                        t0: float = 0.0) -> Trajectory:
    """Constant-speed straight line; the workhorse reference trajectory."""
    n = max(int(round(duration / dt)) + 1, 2)
    t = t0 + np.arange(n) * dt
    import math
    c, s = math.cos(heading), math.sin(heading)
    return Trajectory(t, x0 + v * c * (t - t0), y0 + v * s * (t - t0),
                      np.full(n, heading), np.full(n, v))
