"""Monte Carlo foreground shading over the incident-light hemisphere."""

from __future__ import annotations

import numpy as np

from ..geom import FlatScene, occluded_batch
from .brdf import Material
from .brdf import eval_brdf
from .lightmaps import LightMaps, sample_incident
from .sampling import cosine_hemisphere, unit_float

_VIS_EPS = 1e-4  # ray origin offset along the normal for self-shadow rays

# RNG stream ids: keep shading / shadow / pixel dims disjoint
_DIM_U1 = 0
_DIM_U2 = 1


def shade_points(points: np.ndarray, normals: np.ndarray, view_dirs: np.ndarray,
                 albedo: np.ndarray, roughness: float, metallic: float,
                 lightmaps: LightMaps, samples: int, seed: int,
                 pixel_keys: np.ndarray = None,
                 occluder: FlatScene = None) -> np.ndarray:
    """Estimate the hemisphere lighting integral for a batch of surface points.

    Cosine-weighted sampling; the pi/cos factors cancel so each sample
    contributes pi * f_r * L_i. Deterministic in (seed, pixel_keys, samples).
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    nrm = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
    view = np.asarray(view_dirs, dtype=np.float64).reshape(-1, 3)
    alb = np.asarray(albedo, dtype=np.float64).reshape(-1, 3)
    n_pts = len(pts)
    if pixel_keys is None:
        pixel_keys = np.arange(n_pts, dtype=np.uint64)
    pixel_keys = np.asarray(pixel_keys, dtype=np.uint64).reshape(-1)

    accum = np.zeros((n_pts, 3))
    origins = pts + _VIS_EPS * nrm
    for s in range(samples):
        u1 = unit_float(seed, pixel_keys, np.uint64(2 * s + _DIM_U1))
        u2 = unit_float(seed, pixel_keys, np.uint64(2 * s + _DIM_U2))
        wi = cosine_hemisphere(nrm, u1, u2)
        radiance = sample_incident(lightmaps, wi)
        if occluder is not None and not occluder.is_empty:
            blocked = occluded_batch(occluder, origins, wi)
            radiance = np.where(blocked[:, None], 0.0, radiance)
        f = eval_brdf(alb, roughness, metallic, nrm, view, wi)
        accum += np.pi * f * radiance
    return accum / samples


def shade_foreground(x, n, view_dir, mat: Material, lightmaps: LightMaps,
                     samples: int, seed: int, occluder: FlatScene = None,
                     pixel_key: int = 0) -> np.ndarray:
    """Single-point shading; the per-pixel batch path is shade_points."""
    out = shade_points(np.reshape(x, (1, 3)), np.reshape(n, (1, 3)),
                       np.reshape(view_dir, (1, 3)),
                       np.reshape(mat.albedo, (1, 3)),
                       mat.roughness, mat.metallic,
                       lightmaps, samples, seed,
                       pixel_keys=np.array([pixel_key], dtype=np.uint64),
                       occluder=occluder)
    return out[0]
