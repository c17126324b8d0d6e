"""Rigid transforms (rotation + translation) in world coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError

_ORTHO_TOL = 1e-9


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    m = math.fmod(theta + math.pi, 2.0 * math.pi)
    if m <= 0.0:
        m += 2.0 * math.pi
    return m - math.pi


@dataclass(frozen=True)
class Pose:
    """Rigid body placement: p_world = rotation @ p_body + translation."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)
        if not np.all(np.isfinite(r)) or not np.all(np.isfinite(t)):
            raise ValidationError("pose contains non-finite values")
        err = np.abs(r @ r.T - np.eye(3)).max()
        if err > 1e-6:
            raise ValidationError(f"rotation not orthonormal (err {err:.2e})")
        if np.linalg.det(r) < 0.0:
            raise ValidationError("rotation has negative determinant")

    @staticmethod
    def identity() -> "Pose":
        return Pose()

    @staticmethod
    def from_xyyaw(x: float, y: float, yaw: float, z: float = 0.0) -> "Pose":
        c, s = math.cos(yaw), math.sin(yaw)
        r = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return Pose(r, np.array([x, y, z]))

    @property
    def yaw(self) -> float:
        return math.atan2(self.rotation[1, 0], self.rotation[0, 0])

    def compose(self, other: "Pose") -> "Pose":
        """self applied after other: (self*other)(p) = self(other(p))."""
        return Pose(self.rotation @ other.rotation,
                    self.rotation @ other.translation + self.translation)

    def inverse(self) -> "Pose":
        rt = self.rotation.T
        return Pose(rt, -rt @ self.translation)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one point (3,) or a batch (N, 3)."""
        p = np.asarray(points, dtype=np.float64)
        return p @ self.rotation.T + self.translation

    def apply_dir(self, dirs: np.ndarray) -> np.ndarray:
        return np.asarray(dirs, dtype=np.float64) @ self.rotation.T

    def is_orthonormal(self, tol: float = _ORTHO_TOL) -> bool:
        r = self.rotation
        return (np.abs(r @ r.T - np.eye(3)).max() <= tol
                and abs(np.linalg.det(r) - 1.0) <= tol)

    def almost_equal(self, other: "Pose", tol: float = 1e-9) -> bool:
        return (np.abs(self.rotation - other.rotation).max() <= tol
                and np.abs(self.translation - other.translation).max() <= tol)
