"""BVH over world-space triangles with binned surface-area-heuristic splits.

The flattened arrays feed the numba kernels in trace.py. Scenes are immutable
after build; all queries are pure, so concurrent use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_LEAF_SIZE = 4
_N_BINS = 8


@dataclass
class FlatScene:
    """Triangle soup + BVH arrays, all in world coordinates."""

    tri_v0: np.ndarray      # (M, 3)
    tri_e1: np.ndarray      # (M, 3) v1 - v0
    tri_e2: np.ndarray      # (M, 3) v2 - v0
    n0: np.ndarray          # per-corner vertex normals (M, 3)
    n1: np.ndarray
    n2: np.ndarray
    alb0: np.ndarray        # per-corner albedo (M, 3)
    alb1: np.ndarray
    alb2: np.ndarray
    mesh_id: np.ndarray     # (M,) int32
    nodes_min: np.ndarray   # (K, 3)
    nodes_max: np.ndarray   # (K, 3)
    node_left: np.ndarray   # (K,) int32, left-child index (right = left+1); -1 for leaves
    leaf_start: np.ndarray  # (K,) int32 into triangle arrays
    leaf_count: np.ndarray  # (K,) int32, 0 for inner nodes

    @property
    def num_triangles(self) -> int:
        return len(self.tri_v0)

    @property
    def is_empty(self) -> bool:
        return len(self.tri_v0) == 0


def _surface(lo, hi) -> float:
    d = np.maximum(hi - lo, 0.0)
    return float(2.0 * (d[0] * d[1] + d[1] * d[2] + d[2] * d[0]))


def build_scene(instances) -> FlatScene:
    """Flatten (mesh, pose, mesh_id) instances into one world-space BVH."""
    v0s, e1s, e2s = [], [], []
    n0s, n1s, n2s = [], [], []
    a0s, a1s, a2s = [], [], []
    ids = []
    for mesh, pose, mid in instances:
        wv = pose.apply(mesh.vertices)
        wn = mesh.normals @ pose.rotation.T
        f = mesh.faces
        p0, p1, p2 = wv[f[:, 0]], wv[f[:, 1]], wv[f[:, 2]]
        v0s.append(p0)
        e1s.append(p1 - p0)
        e2s.append(p2 - p0)
        n0s.append(wn[f[:, 0]])
        n1s.append(wn[f[:, 1]])
        n2s.append(wn[f[:, 2]])
        a0s.append(mesh.albedo[f[:, 0]])
        a1s.append(mesh.albedo[f[:, 1]])
        a2s.append(mesh.albedo[f[:, 2]])
        ids.append(np.full(len(f), mid, dtype=np.int32))

    if not v0s:
        z = np.zeros((0, 3))
        return FlatScene(z, z, z, z, z, z, z, z, z,
                         np.zeros(0, dtype=np.int32),
                         np.full((1, 3), np.inf), np.full((1, 3), -np.inf),
                         np.full(1, -1, dtype=np.int32),
                         np.zeros(1, dtype=np.int32),
                         np.zeros(1, dtype=np.int32))

    tri_v0 = np.vstack(v0s)
    tri_e1 = np.vstack(e1s)
    tri_e2 = np.vstack(e2s)
    attrs = [np.vstack(x) for x in (n0s, n1s, n2s, a0s, a1s, a2s)]
    mesh_id = np.concatenate(ids)

    lo = np.minimum(np.minimum(tri_v0, tri_v0 + tri_e1), tri_v0 + tri_e2)
    hi = np.maximum(np.maximum(tri_v0, tri_v0 + tri_e1), tri_v0 + tri_e2)
    centroids = 0.5 * (lo + hi)

    order = np.arange(len(tri_v0), dtype=np.int64)
    nodes_min, nodes_max, node_left, leaf_start, leaf_count = [], [], [], [], []

    def push_node() -> int:
        nodes_min.append(None)
        nodes_max.append(None)
        node_left.append(-1)
        leaf_start.append(0)
        leaf_count.append(0)
        return len(node_left) - 1

    out_order = np.empty_like(order)
    out_pos = 0

    root = push_node()
    stack = [(root, 0, len(order))]
    while stack:
        ni, a, b = stack.pop()
        idx = order[a:b].copy()
        nodes_min[ni] = lo[idx].min(axis=0)
        nodes_max[ni] = hi[idx].max(axis=0)
        n = b - a
        if n <= _LEAF_SIZE:
            leaf_start[ni] = out_pos
            leaf_count[ni] = n
            out_order[out_pos:out_pos + n] = idx
            out_pos += n
            continue

        cent = centroids[idx]
        ext = cent.max(axis=0) - cent.min(axis=0)
        axis = int(np.argmax(ext))
        mid = None
        if ext[axis] > 1e-12:
            cmin = cent[:, axis].min()
            width = ext[axis] / _N_BINS
            bins = np.minimum(((cent[:, axis] - cmin) / width).astype(np.int64),
                              _N_BINS - 1)
            counts = np.bincount(bins, minlength=_N_BINS)
            bin_lo = np.full((_N_BINS, 3), np.inf)
            bin_hi = np.full((_N_BINS, 3), -np.inf)
            for bi in range(_N_BINS):
                sel = bins == bi
                if counts[bi]:
                    bin_lo[bi] = lo[idx[sel]].min(axis=0)
                    bin_hi[bi] = hi[idx[sel]].max(axis=0)
            best_cost, best_split = np.inf, None
            for split in range(1, _N_BINS):
                nl = int(counts[:split].sum())
                nr = n - nl
                if nl == 0 or nr == 0:
                    continue
                cost = (nl * _surface(bin_lo[:split].min(axis=0),
                                      bin_hi[:split].max(axis=0))
                        + nr * _surface(bin_lo[split:].min(axis=0),
                                        bin_hi[split:].max(axis=0)))
                if cost < best_cost:
                    best_cost, best_split = cost, split
            if best_split is not None:
                mask = bins < best_split
                k = int(mask.sum())
                if 0 < k < n:
                    order[a:b] = np.concatenate([idx[mask], idx[~mask]])
                    mid = k
        if mid is None:
            mid = n // 2
            order[a:b] = idx[np.argsort(cent[:, axis], kind="stable")]

        left = push_node()
        push_node()  # right child is left + 1
        node_left[ni] = left
        stack.append((left + 1, a + mid, b))
        stack.append((left, a, a + mid))

    perm = out_order[:out_pos]
    return FlatScene(
        np.ascontiguousarray(tri_v0[perm]),
        np.ascontiguousarray(tri_e1[perm]),
        np.ascontiguousarray(tri_e2[perm]),
        *[np.ascontiguousarray(x[perm]) for x in attrs],
        np.ascontiguousarray(mesh_id[perm]),
        np.ascontiguousarray(np.array(nodes_min, dtype=np.float64)),
        np.ascontiguousarray(np.array(nodes_max, dtype=np.float64)),
        np.array(node_left, dtype=np.int32),
        np.array(leaf_start, dtype=np.int32),
        np.array(leaf_count, dtype=np.int32),
    )
