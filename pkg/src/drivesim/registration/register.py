"""LiDAR pose correction: filter clouds, then minimize the symmetric Chamfer
distance over an SE(2) correction by coordinate descent with shrinking steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..errors import EmptyCloud, EmptyResult
from ..geom import Pose
from .cloud import FrameAnnotations, PointCloud

GROUND_MARGIN = 0.3       # m above annotated ground kept out of registration
CD_TOL = 1e-6             # m^2 objective change that counts as converged
MAX_ITERS = 200           # coordinate-descent sweeps
ACCEPT_CD = 0.05          # m^2; above this at max_iters -> not converged
_MIN_POINTS = 10          # below this the solution is flagged degenerate
_INIT_STEP = (0.3, 0.3, 0.02)        # m, m, rad
_MIN_STEP = (1e-4, 1e-4, 1e-5)


def filter_frame(cloud: PointCloud, ann: FrameAnnotations,
                 ground_margin: float = GROUND_MARGIN) -> PointCloud:
    """Drop dynamic-box points, low points, and points outside the crop."""
    p = cloud.points
    keep = np.ones(len(p), dtype=bool)
    x0, y0, x1, y1 = ann.crop_region
    keep &= (p[:, 0] >= x0) & (p[:, 0] <= x1)
    keep &= (p[:, 1] >= y0) & (p[:, 1] <= y1)
    keep &= p[:, 2] >= ann.ground_height + ground_margin
    for db in ann.dynamic_boxes:
        d = p[:, :2] - db.box.center
        c, s = math.cos(db.box.heading), math.sin(db.box.heading)
        lx = c * d[:, 0] + s * d[:, 1]
        ly = -s * d[:, 0] + c * d[:, 1]
        hl, hw = db.box.half_extents
        in_box = ((np.abs(lx) <= hl) & (np.abs(ly) <= hw)
                  & (p[:, 2] >= db.z_min) & (p[:, 2] <= db.z_max))
        keep &= ~in_box
    if not keep.any():
        raise EmptyResult("all points filtered; widen the crop region")
    return PointCloud(p[keep], cloud.intensity[keep], frame_id=cloud.frame_id)


def chamfer_distance(p: PointCloud, q: PointCloud) -> float:
    """Symmetric Chamfer: mean squared NN distance both ways, in m^2."""
    if len(p) == 0 or len(q) == 0:
        raise EmptyCloud("chamfer_distance needs non-empty clouds")
    d_pq = cKDTree(q.points).query(p.points, workers=1)[0]
    d_qp = cKDTree(p.points).query(q.points, workers=1)[0]
    return float(np.mean(d_pq ** 2) + np.mean(d_qp ** 2))


def _se2_about(params, center) -> Pose:
    """SE(2) transform rotating about `center`: p' = R(p - c) + c + t."""
    tx, ty, yaw = params
    c, s = math.cos(yaw), math.sin(yaw)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    trans = center + (tx, ty, 0.0) - rot @ center
    return Pose(rot, trans)


@dataclass
class RegistrationResult:
    corrected: Pose            # correction composed with the coarse init pose
    correction: Pose           # the SE(2) correction alone
    final_cd: float
    iterations: int
    converged: bool = True
    degenerate: bool = False
    trace: list = field(default_factory=list)   # accepted objective values


def register_frame(frame: PointCloud, reference: PointCloud,
                   init: Pose = None, *, cd_tol: float = CD_TOL,
                   max_iters: int = MAX_ITERS,
                   accept_cd: float = ACCEPT_CD) -> RegistrationResult:
    """Find the SE(2) correction minimizing CD(correction @ frame, reference).

    `frame` is already in world coordinates via the coarse pose `init`; the
    returned `corrected` pose is correction composed with init. The objective
    trace is non-increasing by construction (only improvements are accepted).
    """
    if init is None:
        init = Pose.identity()
    fp = frame.points
    rp = reference.points
    tree_ref = cKDTree(rp)
    tree_frame = cKDTree(fp)
    centroid = fp.mean(axis=0)
    n_f, n_r = len(fp), len(rp)

    def objective(params) -> float:
        tx, ty, yaw = params
        c, s = math.cos(yaw), math.sin(yaw)
        rel = fp - centroid
        moved = np.empty_like(fp)
        moved[:, 0] = c * rel[:, 0] - s * rel[:, 1] + centroid[0] + tx
        moved[:, 1] = s * rel[:, 0] + c * rel[:, 1] + centroid[1] + ty
        moved[:, 2] = fp[:, 2]
        d1 = tree_ref.query(moved, workers=1)[0]
        # reverse direction via the inverse transform: rigid maps preserve NN
        rel_r = rp.copy()
        rel_r[:, 0] -= centroid[0] + tx
        rel_r[:, 1] -= centroid[1] + ty
        back = np.empty_like(rp)
        back[:, 0] = c * rel_r[:, 0] + s * rel_r[:, 1] + centroid[0]
        back[:, 1] = -s * rel_r[:, 0] + c * rel_r[:, 1] + centroid[1]
        back[:, 2] = rp[:, 2]
        d2 = tree_frame.query(back, workers=1)[0]
        return float(np.mean(d1 ** 2) + np.mean(d2 ** 2))

    params = np.zeros(3)
    steps = np.array(_INIT_STEP)
    best = objective(params)
    trace = [best]
    sweeps = 0
    while sweeps < max_iters:
        sweeps += 1
        sweep_start = best
        improved = False
        for i in range(3):
            for sign in (1.0, -1.0):
                cand = params.copy()
                cand[i] += sign * steps[i]
                val = objective(cand)
                if val < best:
                    best, params = val, cand
                    trace.append(best)
                    improved = True
        if not improved:
            steps *= 0.5
            if (steps < _MIN_STEP).all():
                break
        elif sweep_start - best < cd_tol:
            break

    converged = best <= accept_cd or sweeps < max_iters
    correction = _se2_about(params, centroid)
    return RegistrationResult(
        corrected=correction.compose(init),
        correction=correction,
        final_cd=best,
        iterations=sweeps,
        converged=converged,
        degenerate=min(n_f, n_r) < _MIN_POINTS,
        trace=trace,
    )


def correct_sequence(frames, annotations, reference_index: int = None,
                     ground_margin: float = GROUND_MARGIN, **kwargs):
    """Register every frame against the (default central) reference frame.

    `annotations` is a FrameAnnotations, a list aligned with frames, or a
    dict keyed by frame index. Returns a list of correction Poses; the
    reference entry is the identity.
    """
    frames = list(frames)
    if not frames:
        return []
    if reference_index is None:
        reference_index = len(frames) // 2
    if not 0 <= reference_index < len(frames):
        raise IndexError(f"reference_index {reference_index} out of range")

    def ann_for(i):
        if isinstance(annotations, FrameAnnotations):
            return annotations
        if isinstance(annotations, dict):
            return annotations[i]
        return annotations[i]

    try:
        reference = filter_frame(frames[reference_index], ann_for(reference_index),
                                 ground_margin)
    except EmptyResult as e:
        raise EmptyResult(f"frame {reference_index}: {e}") from e

    corrections = []
    for i, frame in enumerate(frames):
        if i == reference_index:
            corrections.append(Pose.identity())
            continue
        try:
            filtered = filter_frame(frame, ann_for(i), ground_margin)
            result = register_frame(filtered, reference, **kwargs)
        except (EmptyResult, EmptyCloud) as e:
            raise type(e)(f"frame {i}: {e}") from e
        corrections.append(result.correction)
    return corrections
