"""Surface reflectance: Lambertian diffuse plus a GGX specular lobe.

Dielectric specular is intentionally zero (F0 = metallic * albedo) so that
metallic=0 materials are exactly Lambertian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class Material:
    albedo: np.ndarray            # (3,) in [0, 1]
    roughness: float = 0.6        # (0, 1]
    metallic: float = 0.0         # [0, 1]

    def __post_init__(self):
        object.__setattr__(self, "albedo",
                           np.asarray(self.albedo, dtype=np.float64).reshape(3))
        if self.albedo.min() < 0.0 or self.albedo.max() > 1.0:
            raise ValidationError("albedo outside [0, 1]")
        if not 0.0 < self.roughness <= 1.0:
            raise ValidationError("roughness outside (0, 1]")
        if not 0.0 <= self.metallic <= 1.0:
            raise ValidationError("metallic outside [0, 1]")


def eval_brdf(albedo: np.ndarray, roughness, metallic,
              n: np.ndarray, wo: np.ndarray, wi: np.ndarray) -> np.ndarray:
    """BRDF value f_r(wi, wo); all direction args broadcast to (..., 3)."""
    albedo = np.asarray(albedo, dtype=np.float64)
    diffuse = (1.0 - metallic) * albedo / np.pi

    cos_i = np.maximum((n * wi).sum(axis=-1), 0.0)
    cos_o = np.maximum((n * wo).sum(axis=-1), 0.0)
    h = wi + wo
    hlen = np.linalg.norm(h, axis=-1, keepdims=True)
    h = h / np.where(hlen > 1e-12, hlen, 1.0)
    cos_h = np.maximum((n * h).sum(axis=-1), 0.0)
    oh = np.maximum((wo * h).sum(axis=-1), 0.0)

    alpha = float(roughness) ** 2
    a2 = alpha * alpha
    denom = cos_h * cos_h * (a2 - 1.0) + 1.0
    d = a2 / np.maximum(np.pi * denom * denom, 1e-12)
    k = alpha / 2.0
    g = (cos_i / np.maximum(cos_i * (1 - k) + k, 1e-12)) * \
        (cos_o / np.maximum(cos_o * (1 - k) + k, 1e-12))
    f0 = metallic * albedo
    fres = f0 + (1.0 - f0) * (1.0 - oh[..., None]) ** 5
    spec = (d * g / np.maximum(4.0 * cos_i * cos_o, 1e-12))[..., None] * fres
    if metallic == 0.0:
        return np.broadcast_to(diffuse, spec.shape).copy()
    valid = ((cos_i > 0) & (cos_o > 0))[..., None]
    return diffuse + np.where(valid, spec, 0.0)
