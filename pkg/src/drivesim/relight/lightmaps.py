"""Equirectangular environment maps: incident radiance and the shadow map."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ValidationError
from ..imageio import load_pfm, save_pfm

MIN_ROWS, MIN_COLS = 8, 16

LUMA = np.array([0.2126, 0.7152, 0.0722])


@dataclass
class LightMaps:
    incident: np.ndarray   # (R, C, 3) radiance >= 0; row 0 at the zenith
    shadow: np.ndarray     # (R, C) >= 0

    def __post_init__(self):
        self.incident = np.asarray(self.incident, dtype=np.float64)
        self.shadow = np.asarray(self.shadow, dtype=np.float64)
        if self.incident.ndim != 3 or self.incident.shape[2] != 3:
            raise ValidationError("incident map must be (rows, cols, 3)")
        r, c = self.incident.shape[:2]
        if r < MIN_ROWS or c < MIN_COLS:
            raise ValidationError(f"lightmap resolution {r}x{c} below {MIN_ROWS}x{MIN_COLS}")
        if self.shadow.shape != (r, c):
            raise ValidationError("shadow map shape mismatch")
        for arr in (self.incident, self.shadow):
            if not np.all(np.isfinite(arr)) or arr.min() < 0.0:
                raise ValidationError("lightmap entries must be finite and >= 0")

    @property
    def shape(self):
        return self.incident.shape[:2]

    @staticmethod
    def uniform(value, rows: int = 16, cols: int = 32) -> "LightMaps":
        rgb = np.broadcast_to(np.asarray(value, dtype=np.float64), (3,))
        inc = np.tile(rgb, (rows, cols, 1))
        return LightMaps(inc, inc @ LUMA)


def texel_index(dirs: np.ndarray, rows: int, cols: int):
    """Map unit directions to (row, col) texels; row 0 is the zenith."""
    d = np.asarray(dirs, dtype=np.float64)
    elev = np.arcsin(np.clip(d[..., 2], -1.0, 1.0))
    phi = np.arctan2(d[..., 1], d[..., 0]) % (2.0 * np.pi)
    r = np.clip(((np.pi / 2 - elev) / np.pi * rows).astype(np.int64), 0, rows - 1)
    c = np.clip((phi / (2.0 * np.pi) * cols).astype(np.int64), 0, cols - 1)
    return r, c


def texel_direction(row, col, rows: int, cols: int) -> np.ndarray:
    """Center direction of a texel (inverse of texel_index at centers)."""
    elev = np.pi / 2 - (np.asarray(row) + 0.5) / rows * np.pi
    phi = (np.asarray(col) + 0.5) / cols * 2.0 * np.pi
    ce = np.cos(elev)
    return np.stack([ce * np.cos(phi), ce * np.sin(phi), np.sin(elev)], axis=-1)


def sample_incident(lm: LightMaps, dirs: np.ndarray) -> np.ndarray:
    r, c = texel_index(dirs, *lm.shape)
    return lm.incident[r, c]


def sample_shadow(lm: LightMaps, dirs: np.ndarray) -> np.ndarray:
    r, c = texel_index(dirs, *lm.shape)
    return lm.shadow[r, c]


def save_lightmaps(lm: LightMaps, base_path) -> None:
    base = Path(base_path)
    save_pfm(lm.incident, base.with_suffix(".li.pfm"))
    save_pfm(lm.shadow, base.with_suffix(".ls.pfm"))


def load_lightmaps(base_path) -> LightMaps:
    base = Path(base_path)
    return LightMaps(load_pfm(base.with_suffix(".li.pfm")),
                     load_pfm(base.with_suffix(".ls.pfm")))
