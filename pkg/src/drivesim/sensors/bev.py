"""Bird's-eye-view two-bin occupancy histogram consumed by planning agents."""

from __future__ import annotations

import numpy as np

from .rig import BevGrid


def bev_histogram(points: np.ndarray, grid: BevGrid, ground_z: float) -> np.ndarray:
    """Count points per cell: bin 0 at or below ground_z + split_height, bin 1 above.

    `points` are (N, 3) in the observer frame (x forward, y left). Points
    outside the square extent are dropped; counts saturate at clip_max.
    Returns (cells, cells, 2) int32 with x as the first index.
    """
    out = np.zeros((grid.cells, grid.cells, 2), dtype=np.int32)
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(pts) == 0:
        return out
    cell = 2.0 * grid.extent / grid.cells
    ix = np.floor((pts[:, 0] + grid.extent) / cell).astype(np.int64)
    iy = np.floor((pts[:, 1] + grid.extent) / cell).astype(np.int64)
    ok = (ix >= 0) & (ix < grid.cells) & (iy >= 0) & (iy < grid.cells)
    high = (pts[:, 2] > ground_z + grid.split_height).astype(np.int64)
    flat = (ix[ok] * grid.cells + iy[ok]) * 2 + high[ok]
    counts = np.bincount(flat, minlength=grid.cells * grid.cells * 2)
    return np.minimum(counts.reshape(grid.cells, grid.cells, 2),
                      grid.clip_max).astype(np.int32)
