"""Pinhole camera rendering: ray-traced RGB + optical-axis depth."""

from __future__ import annotations

import numpy as np

from ..geom import Pose, shade_attributes, trace_batch
from ..relight import LightMaps, composite, shade_points, shadow_intensity_points
from .rig import CameraModel
from .view import SceneView


def pixel_rays(cam: CameraModel, ego_pose: Pose, du: float = 0.5, dv: float = 0.5):
    """World-space rays through pixel sample points (du, dv in [0,1)) plus
    the axis-projection factor."""
    us = np.arange(cam.width) + du
    vs = np.arange(cam.height) + dv
    gu, gv = np.meshgrid(us, vs)
    raw = np.stack([(gu - cam.cx) / cam.fx,
                    (gv - cam.cy) / cam.fy,
                    np.ones_like(gu)], axis=-1).reshape(-1, 3)
    inv_norm = 1.0 / np.linalg.norm(raw, axis=1)
    dirs_cam = raw * inv_norm[:, None]
    rot = ego_pose.rotation @ cam.extrinsic.rotation
    dirs = dirs_cam @ rot.T
    origin = ego_pose.apply(cam.extrinsic.translation)
    origins = np.broadcast_to(origin, dirs.shape)
    # depth along the optical axis = t * inv_norm (z of the unit camera ray)
    return origins, dirs, inv_norm


def render_camera(view: SceneView, cam: CameraModel, ego_pose: Pose,
                  lighting: LightMaps, *, samples: int = 16,
                  shadow_samples: int = 16, shadows: bool = True,
                  sky_color=(0.55, 0.70, 0.85), fg_roughness: float = 0.6,
                  fg_metallic: float = 0.0, seed: int = 0,
                  supersample: bool = False):
    """One primary ray per pixel center; background unlit, foreground relit.

    With `supersample`, four rays per pixel (2x2 grid) are averaged for RGB
    and the mask becomes fractional coverage; depth stays the nearest hit.
    Returns (rgb (H,W,3) float32 in [0,1], depth (H,W) float32, mask (H,W)).
    Deterministic for fixed (view, cam, ego_pose, lighting, seed).
    """
    if not supersample:
        return _render_pass(view, cam, ego_pose, lighting, samples,
                            shadow_samples, shadows, sky_color, fg_roughness,
                            fg_metallic, seed, 0.5, 0.5, 0)
    h, w = cam.height, cam.width
    rgb_acc = np.zeros((h, w, 3), dtype=np.float64)
    depth_out = np.zeros((h, w), dtype=np.float32)
    cover = np.zeros((h, w), dtype=np.float64)
    offsets = ((0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75))
    for si, (du, dv) in enumerate(offsets):
        rgb, depth, mask = _render_pass(view, cam, ego_pose, lighting, samples,
                                        shadow_samples, shadows, sky_color,
                                        fg_roughness, fg_metallic, seed,
                                        du, dv, si * h * w)
        rgb_acc += rgb
        cover += mask
        nearer = (depth > 0) & ((depth_out == 0) | (depth < depth_out))
        depth_out[nearer] = depth[nearer]
    return ((rgb_acc / len(offsets)).astype(np.float32), depth_out,
            cover / len(offsets))


def _render_pass(view: SceneView, cam: CameraModel, ego_pose: Pose,
                 lighting: LightMaps, samples: int, shadow_samples: int,
                 shadows: bool, sky_color, fg_roughness: float,
                 fg_metallic: float, seed: int, du: float, dv: float,
                 key_offset: int):
    h, w = cam.height, cam.width
    origins, dirs, inv_norm = pixel_rays(cam, ego_pose, du, dv)
    n_pix = h * w
    pixel_keys = np.arange(key_offset, key_offset + n_pix, dtype=np.uint64)

    # background pass: unlit albedo
    t_bg, tri_bg, u_bg, v_bg = trace_batch(view.background, origins, dirs)
    bg_hit = tri_bg >= 0
    c_bg = np.empty((n_pix, 3))
    c_bg[:] = np.asarray(sky_color, dtype=np.float64)
    if bg_hit.any():
        _, alb = shade_attributes(view.background, tri_bg[bg_hit],
                                  u_bg[bg_hit], v_bg[bg_hit])
        c_bg[bg_hit] = alb

    # foreground pass: participants, BRDF-shaded
    t_fg, tri_fg, u_fg, v_fg = trace_batch(view.foreground, origins, dirs)
    fg_hit = tri_fg >= 0
    mask = fg_hit & (~bg_hit | (t_fg < t_bg))
    c_fg = np.zeros((n_pix, 3))
    if mask.any():
        idx = np.nonzero(mask)[0]
        nrm, alb = shade_attributes(view.foreground, tri_fg[idx],
                                    u_fg[idx], v_fg[idx])
        flip = (nrm * dirs[idx]).sum(axis=1) > 0.0
        nrm[flip] = -nrm[flip]
        pts = origins[idx] + t_fg[idx, None] * dirs[idx]
        c_fg[idx] = shade_points(pts, nrm, -dirs[idx], alb,
                                 fg_roughness, fg_metallic, lighting,
                                 samples, seed, pixel_keys=pixel_keys[idx],
                                 occluder=view.foreground)

    # ground shadows near each caster, combined multiplicatively
    shadow = np.ones(n_pix)
    if shadows and view.casters:
        bg_pts = origins + t_bg[:, None] * dirs
        bg_nrm = np.zeros((n_pix, 3))
        if bg_hit.any():
            nb, _ = shade_attributes(view.background, tri_bg[bg_hit],
                                     u_bg[bg_hit], v_bg[bg_hit])
            flip = (nb * dirs[bg_hit]).sum(axis=1) > 0.0
            nb[flip] = -nb[flip]
            bg_nrm[bg_hit] = nb
        for caster in view.casters:
            near = bg_hit & ~mask & (
                np.linalg.norm(bg_pts[:, :2] - caster.center[:2], axis=1)
                <= caster.radius)
            if not near.any():
                continue
            idx = np.nonzero(near)[0]
            vals = shadow_intensity_points(bg_pts[idx], bg_nrm[idx],
                                           caster.scene, lighting,
                                           shadow_samples, seed,
                                           pixel_keys=pixel_keys[idx])
            shadow[idx] *= vals

    rgb = composite(c_bg.reshape(h, w, 3), c_fg.reshape(h, w, 3),
                    mask.reshape(h, w).astype(np.float64),
                    shadow.reshape(h, w))
    depth = np.where(mask, t_fg * inv_norm,
                     np.where(bg_hit, t_bg * inv_norm, 0.0))
    return (np.clip(rgb, 0.0, 1.0).astype(np.float32),
            depth.reshape(h, w).astype(np.float32),
            mask.reshape(h, w))


def apply_exposure(img: np.ndarray, a: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Per-pixel affine color correction C' = A @ C + t, clamped to [0, 1]."""
    arr = np.asarray(img, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64).reshape(3, 3)
    t = np.asarray(t, dtype=np.float64).reshape(3)
    out = arr @ a.T + t
    return np.clip(out, 0.0, 1.0)
