"""Foreground shading, ground shadows, and compositing."""

from .brdf import Material, eval_brdf
from .compositing import composite
from .fitting import fit_lightmaps
from .lightmaps import (LightMaps, load_lightmaps, sample_incident,
                        sample_shadow, save_lightmaps, texel_direction,
                        texel_index)
from .sampling import cosine_hemisphere, counter_hash, orthonormal_basis, unit_float
from .shading import shade_foreground, shade_points
from .shadows import shadow_intensity, shadow_intensity_points

__all__ = [
    "Material", "eval_brdf",
    "composite", "fit_lightmaps",
    "LightMaps", "save_lightmaps", "load_lightmaps",
    "sample_incident", "sample_shadow", "texel_index", "texel_direction",
    "cosine_hemisphere", "counter_hash", "unit_float", "orthonormal_basis",
    "shade_foreground", "shade_points",
    "shadow_intensity", "shadow_intensity_points",
]
