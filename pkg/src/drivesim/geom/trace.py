"""Ray casting against a FlatScene: numba kernels plus thin Python wrappers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .bvh import FlatScene

HIT_EPS = 1e-6  # intersections closer than this are ignored
_STACK = 128


@njit(cache=True)
def _slab_hit(ox, oy, oz, inv_dx, inv_dy, inv_dz, lo, hi, t_max):
    t0 = (lo[0] - ox) * inv_dx
    t1 = (hi[0] - ox) * inv_dx
    if t0 > t1:
        t0, t1 = t1, t0
    tn = t0
    tf = t1
    t0 = (lo[1] - oy) * inv_dy
    t1 = (hi[1] - oy) * inv_dy
    if t0 > t1:
        t0, t1 = t1, t0
    if t0 > tn:
        tn = t0
    if t1 < tf:
        tf = t1
    t0 = (lo[2] - oz) * inv_dz
    t1 = (hi[2] - oz) * inv_dz
    if t0 > t1:
        t0, t1 = t1, t0
    if t0 > tn:
        tn = t0
    if t1 < tf:
        tf = t1
    return tf >= tn and tf >= HIT_EPS and tn <= t_max


@njit(cache=True)
def _trace_kernel(origins, dirs, t_max,
                  tri_v0, tri_e1, tri_e2,
                  nodes_min, nodes_max, node_left, leaf_start, leaf_count,
                  any_hit,
                  out_t, out_tri, out_u, out_v):
    n_rays = origins.shape[0]
    stack = np.empty(_STACK, dtype=np.int32)
    for r in range(n_rays):
        ox, oy, oz = origins[r, 0], origins[r, 1], origins[r, 2]
        dx, dy, dz = dirs[r, 0], dirs[r, 1], dirs[r, 2]
        # large finite sentinel instead of inf: keeps 0 * inv well-defined
        # for axis-parallel rays grazing a node boundary
        inv_dx = 1.0 / dx if dx != 0.0 else 1e300
        inv_dy = 1.0 / dy if dy != 0.0 else 1e300
        inv_dz = 1.0 / dz if dz != 0.0 else 1e300
        best_t = t_max[r]
        best_tri = -1
        best_u = 0.0
        best_v = 0.0
        sp = 0
        stack[0] = 0
        sp = 1
        while sp > 0:
            sp -= 1
            ni = stack[sp]
            if not _slab_hit(ox, oy, oz, inv_dx, inv_dy, inv_dz,
                             nodes_min[ni], nodes_max[ni], best_t):
                continue
            left = node_left[ni]
            if left >= 0:
                stack[sp] = left + 1
                sp += 1
                stack[sp] = left
                sp += 1
                continue
            start = leaf_start[ni]
            for k in range(start, start + leaf_count[ni]):
                # Moller-Trumbore
                e1x, e1y, e1z = tri_e1[k, 0], tri_e1[k, 1], tri_e1[k, 2]
                e2x, e2y, e2z = tri_e2[k, 0], tri_e2[k, 1], tri_e2[k, 2]
                px = dy * e2z - dz * e2y
                py = dz * e2x - dx * e2z
                pz = dx * e2y - dy * e2x
                det = e1x * px + e1y * py + e1z * pz
                if -1e-14 < det < 1e-14:
                    continue
                inv_det = 1.0 / det
                sx = ox - tri_v0[k, 0]
                sy = oy - tri_v0[k, 1]
                sz = oz - tri_v0[k, 2]
                u = (sx * px + sy * py + sz * pz) * inv_det
                if u < -1e-12 or u > 1.0 + 1e-12:
                    continue
                qx = sy * e1z - sz * e1y
                qy = sz * e1x - sx * e1z
                qz = sx * e1y - sy * e1x
                v = (dx * qx + dy * qy + dz * qz) * inv_det
                if v < -1e-12 or u + v > 1.0 + 1e-12:
                    continue
                t = (e2x * qx + e2y * qy + e2z * qz) * inv_det
                if HIT_EPS < t < best_t:
                    best_t = t
                    best_tri = k
                    best_u = u
                    best_v = v
                    if any_hit:
                        sp = 0
                        break
        out_t[r] = best_t
        out_tri[r] = best_tri
        out_u[r] = best_u
        out_v[r] = best_v


def trace_batch(scene: FlatScene, origins: np.ndarray, dirs: np.ndarray,
                t_max=np.inf):
    """Nearest-hit trace. Returns (t, tri_index, bary_u, bary_v); tri=-1 on miss."""
    origins = np.ascontiguousarray(origins, dtype=np.float64).reshape(-1, 3)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64).reshape(-1, 3)
    n = len(origins)
    tm = np.full(n, t_max, dtype=np.float64) if np.isscalar(t_max) \
        else np.ascontiguousarray(t_max, dtype=np.float64)
    out_t = np.empty(n)
    out_tri = np.empty(n, dtype=np.int64)
    out_u = np.empty(n)
    out_v = np.empty(n)
    if scene.is_empty or n == 0:
        out_t[:] = tm
        out_tri[:] = -1
        out_u[:] = 0.0
        out_v[:] = 0.0
        return out_t, out_tri, out_u, out_v
    _trace_kernel(origins, dirs, tm,
                  scene.tri_v0, scene.tri_e1, scene.tri_e2,
                  scene.nodes_min, scene.nodes_max, scene.node_left,
                  scene.leaf_start, scene.leaf_count,
                  False, out_t, out_tri, out_u, out_v)
    return out_t, out_tri, out_u, out_v


def occluded_batch(scene: FlatScene, origins: np.ndarray, dirs: np.ndarray,
                   t_max=np.inf) -> np.ndarray:
    """Any-hit query (shadow/visibility rays). True where something blocks."""
    origins = np.ascontiguousarray(origins, dtype=np.float64).reshape(-1, 3)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64).reshape(-1, 3)
    n = len(origins)
    if scene.is_empty or n == 0:
        return np.zeros(n, dtype=bool)
    tm = np.full(n, t_max, dtype=np.float64) if np.isscalar(t_max) \
        else np.ascontiguousarray(t_max, dtype=np.float64)
    out_t = np.empty(n)
    out_tri = np.empty(n, dtype=np.int64)
    out_u = np.empty(n)
    out_v = np.empty(n)
    _trace_kernel(origins, dirs, tm,
                  scene.tri_v0, scene.tri_e1, scene.tri_e2,
                  scene.nodes_min, scene.nodes_max, scene.node_left,
                  scene.leaf_start, scene.leaf_count,
                  True, out_t, out_tri, out_u, out_v)
    return out_tri >= 0


@dataclass(frozen=True)
class RayHit:
    distance: float
    point: np.ndarray
    normal: np.ndarray
    albedo: np.ndarray
    mesh_id: int


def shade_attributes(scene: FlatScene, tri: np.ndarray, u: np.ndarray,
                     v: np.ndarray):
    """Interpolate normals/albedo at hit barycentrics (arrays over hits)."""
    w = 1.0 - u - v
    n = (scene.n0[tri] * w[:, None] + scene.n1[tri] * u[:, None]
         + scene.n2[tri] * v[:, None])
    lens = np.linalg.norm(n, axis=1, keepdims=True)
    n = n / np.where(lens > 1e-12, lens, 1.0)
    alb = (scene.alb0[tri] * w[:, None] + scene.alb1[tri] * u[:, None]
           + scene.alb2[tri] * v[:, None])
    return n, alb


def ray_cast(scene: FlatScene, origin, direction) -> Optional[RayHit]:
    """Nearest intersection of a single ray, or None on miss."""
    o = np.asarray(origin, dtype=np.float64).reshape(1, 3)
    d = np.asarray(direction, dtype=np.float64).reshape(1, 3)
    t, tri, u, v = trace_batch(scene, o, d)
    if tri[0] < 0:
        return None
    n, alb = shade_attributes(scene, tri, u, v)
    # orient the shading normal against the ray
    if float(n[0] @ d[0]) > 0.0:
        n = -n
    return RayHit(distance=float(t[0]),
                  point=o[0] + t[0] * d[0],
                  normal=n[0],
                  albedo=alb[0],
                  mesh_id=int(scene.mesh_id[tri[0]]))
