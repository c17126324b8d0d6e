"""Deterministic light-map fit from background imagery.

The sky dome takes the mean color of the upper image halves, the lower
hemisphere the mean of the lower halves (ground bounce), with an optional
directional lobe at a supplied sun direction.
"""

from __future__ import annotations

import numpy as np

from .lightmaps import LUMA, LightMaps, texel_index

DEFAULT_ROWS, DEFAULT_COLS = 16, 32
_SUN_BOOST = 10.0


def fit_lightmaps(background_images, sun_estimate=None,
                  rows: int = DEFAULT_ROWS, cols: int = DEFAULT_COLS) -> LightMaps:
    if not background_images:
        raise ValueError("need at least one background image")
    top_acc = np.zeros(3)
    bot_acc = np.zeros(3)
    for img in background_images:
        arr = np.asarray(img, dtype=np.float64)
        half = arr.shape[0] // 2
        top_acc += arr[:max(half, 1)].reshape(-1, 3).mean(axis=0)
        bot_acc += arr[max(half, 1):].reshape(-1, 3).mean(axis=0) if half < arr.shape[0] \
            else arr.reshape(-1, 3).mean(axis=0)
    n = len(background_images)
    sky = top_acc / n
    ground = bot_acc / n

    incident = np.empty((rows, cols, 3))
    incident[: rows // 2] = sky       # upper hemisphere (rows start at zenith)
    incident[rows // 2:] = ground
    if sun_estimate is not None:
        d = np.asarray(sun_estimate, dtype=np.float64)
        d = d / np.linalg.norm(d)
        r, c = texel_index(d[None, :], rows, cols)
        peak = max(float(incident.max()), 1e-3) * _SUN_BOOST
        incident[r[0], c[0]] += peak
    return LightMaps(incident, incident @ LUMA)
