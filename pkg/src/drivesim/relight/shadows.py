"""Ground shadow intensity: occluded vs. full hemisphere illumination ratio."""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import DegenerateDenominator
from ..geom import FlatScene, occluded_batch
from .lightmaps import LightMaps, sample_shadow
from .sampling import cosine_hemisphere, unit_float

_VIS_EPS = 1e-4
_DEN_EPS = 1e-12
# offset the sample-dimension counters from the shading streams
_SHADOW_STREAM = np.uint64(1 << 20)


def shadow_intensity_points(points: np.ndarray, normals: np.ndarray,
                            occluder: FlatScene, lightmaps: LightMaps,
                            samples: int, seed: int,
                            pixel_keys: np.ndarray = None) -> np.ndarray:
    """Ratio of unoccluded to total hemisphere illumination per ground point.

    Numerator and denominator share the same sample set (common random
    numbers), so the ratio is bounded by 1 exactly, not just statistically.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    nrm = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
    n_pts = len(pts)
    if pixel_keys is None:
        pixel_keys = np.arange(n_pts, dtype=np.uint64)
    pixel_keys = np.asarray(pixel_keys, dtype=np.uint64).reshape(-1)

    num = np.zeros(n_pts)
    den = np.zeros(n_pts)
    origins = pts + _VIS_EPS * nrm
    for s in range(samples):
        u1 = unit_float(seed, pixel_keys, _SHADOW_STREAM + np.uint64(2 * s))
        u2 = unit_float(seed, pixel_keys, _SHADOW_STREAM + np.uint64(2 * s + 1))
        wi = cosine_hemisphere(nrm, u1, u2)
        radiance = sample_shadow(lightmaps, wi)
        if occluder is not None and not occluder.is_empty:
            blocked = occluded_batch(occluder, origins, wi)
            num += np.where(blocked, 0.0, radiance)
        else:
            num += radiance
        den += radiance
    degenerate = den < _DEN_EPS
    if degenerate.any():
        warnings.warn("shadow hemisphere integral vanished; returning 1",
                      DegenerateDenominator)
    out = np.ones(n_pts)
    ok = ~degenerate
    out[ok] = num[ok] / den[ok]
    return out


def shadow_intensity(x_prime, n_prime, occluder: FlatScene,
                     lightmaps: LightMaps, samples: int, seed: int,
                     pixel_key: int = 0) -> float:
    out = shadow_intensity_points(np.reshape(x_prime, (1, 3)),
                                  np.reshape(n_prime, (1, 3)),
                                  occluder, lightmaps, samples, seed,
                                  pixel_keys=np.array([pixel_key], dtype=np.uint64))
    return float(out[0])
