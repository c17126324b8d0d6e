import math

import numpy as np
import pytest

from drivesim.errors import EmptyResult
from drivesim.geom import OrientedBox2D, Pose
from drivesim.registration import (DynamicBox, FrameAnnotations, PointCloud,
                                   chamfer_distance, correct_sequence,
                                   filter_frame, load_annotations, load_cloud,
                                   register_frame, save_annotations,
                                   save_cloud)


def structured_scene(n_target: int = 500, seed: int = 0) -> PointCloud:
    """Two walls, a roof edge, and scattered posts; yaw is well observable."""
    rng = np.random.default_rng(seed)
    pts = []
    # wall along x at y=8
    xs = rng.uniform(-20, 20, n_target // 3)
    pts.append(np.stack([xs, np.full_like(xs, 8.0), rng.uniform(0.5, 4.0, len(xs))], 1))
    # wall along y at x=-12
    ys = rng.uniform(-15, 15, n_target // 3)
    pts.append(np.stack([np.full_like(ys, -12.0), ys, rng.uniform(0.5, 4.0, len(ys))], 1))
    # posts
    m = n_target - 2 * (n_target // 3)
    px = rng.uniform(-18, 18, m)
    py = rng.uniform(-14, 6, m)
    pts.append(np.stack([px, py, rng.uniform(0.5, 3.0, m)], 1))
    return PointCloud(np.vstack(pts))


def apply_se2(cloud: PointCloud, tx, ty, yaw) -> PointCloud:
    c, s = math.cos(yaw), math.sin(yaw)
    p = cloud.points.copy()
    x = c * p[:, 0] - s * p[:, 1] + tx
    y = s * p[:, 0] + c * p[:, 1] + ty
    return PointCloud(np.stack([x, y, p[:, 2]], axis=1))


# ---------------------------------------------------------------------------
# chamfer


def test_chamfer_identity_zero():
    c = structured_scene(100)
    assert chamfer_distance(c, c) == 0.0


def test_chamfer_single_points():
    p = PointCloud([[0.0, 0.0, 0.0]])
    q = PointCloud([[1.0, 0.0, 0.0]])
    assert chamfer_distance(p, q) == pytest.approx(2.0, abs=1e-12)


def test_chamfer_permutation_invariant():
    rng = np.random.default_rng(5)
    pts = rng.uniform(-5, 5, size=(50, 3))
    a = PointCloud(pts)
    b = PointCloud(pts[rng.permutation(50)])
    assert chamfer_distance(a, b) == 0.0


def test_chamfer_symmetric_exact():
    rng = np.random.default_rng(6)
    for _ in range(20):
        a = PointCloud(rng.uniform(-5, 5, size=(40, 3)))
        b = PointCloud(rng.uniform(-5, 5, size=(60, 3)))
        assert chamfer_distance(a, b) == chamfer_distance(b, a)


# ---------------------------------------------------------------------------
# filter_frame


def test_filter_identity():
    cloud = PointCloud([[0, 0, 1.0], [1, 1, 2.0], [2, 0, 1.5]])
    ann = FrameAnnotations(ground_height=0.0, crop_region=(-10, -10, 10, 10))
    out = filter_frame(cloud, ann)
    assert len(out) == 3
    np.testing.assert_array_equal(out.points, cloud.points)


def test_filter_removes_dynamic_box():
    cloud = PointCloud([[0, 0, 1.0], [5, 5, 1.0]])
    ann = FrameAnnotations(
        dynamic_boxes=[DynamicBox(OrientedBox2D((0, 0), 0.0, (1, 1)), 0.0, 3.0)],
        crop_region=(-10, -10, 10, 10))
    out = filter_frame(cloud, ann)
    assert len(out) == 1
    np.testing.assert_array_equal(out.points[0], [5, 5, 1.0])


def test_filter_ground_margin_counts():
    # 100 points, 30 below ground+margin -> 70 remain (per-point predicate oracle)
    rng = np.random.default_rng(2)
    z_low = rng.uniform(0.0, 0.29, 30)
    z_high = rng.uniform(0.31, 3.0, 70)
    z = np.concatenate([z_low, z_high])
    xy = rng.uniform(-5, 5, size=(100, 2))
    cloud = PointCloud(np.column_stack([xy, z]))
    ann = FrameAnnotations(ground_height=0.0, crop_region=(-10, -10, 10, 10))
    out = filter_frame(cloud, ann, ground_margin=0.3)
    oracle = int((z >= 0.3).sum())
    assert len(out) == oracle == 70


def test_filter_empty_raises():
    cloud = PointCloud([[0, 0, 0.1]])
    ann = FrameAnnotations(ground_height=0.0, crop_region=(-10, -10, 10, 10))
    with pytest.raises(EmptyResult):
        filter_frame(cloud, ann, ground_margin=0.3)


# ---------------------------------------------------------------------------
# register_frame


def test_register_identity():
    ref = structured_scene(300)
    res = register_frame(ref, ref, Pose.identity())
    assert res.converged
    assert res.final_cd < 1e-9
    assert res.corrected.almost_equal(Pose.identity(), tol=1e-6)


def test_register_recovers_known_perturbation():
    ref = structured_scene(400, seed=3)
    frame = apply_se2(ref, 0.3, 0.2, math.radians(1.0))
    res = register_frame(frame, ref)
    # corrected should undo the perturbation: measure residual motion
    c0 = frame.points.mean(axis=0)
    moved = res.correction.apply(c0)
    true_inv_yaw = -math.radians(1.0)
    assert abs(res.correction.yaw - true_inv_yaw) < math.radians(0.2)
    # apply full chain: correction(perturb(ref)) ~ ref
    chain = res.correction.apply(frame.points)
    err = np.linalg.norm(chain[:, :2] - ref.points[:, :2], axis=1).max()
    assert err < 0.05
    assert moved.shape == (3,)


def test_register_trace_monotone():
    ref = structured_scene(300, seed=4)
    frame = apply_se2(ref, -0.4, 0.25, math.radians(-1.5))
    res = register_frame(frame, ref)
    trace = np.array(res.trace)
    assert (np.diff(trace) <= 0).all()


def test_register_degenerate_single_point():
    p = PointCloud([[1.0, 2.0, 0.5]])
    q = PointCloud([[0.0, 0.0, 0.5]])
    res = register_frame(p, q)
    assert res.degenerate
    # either snapped onto the point or reported non-convergence
    assert res.final_cd < 1e-4 or not res.converged


# ---------------------------------------------------------------------------
# correct_sequence


def test_sequence_identical_frames():
    ref = structured_scene(200, seed=8)
    ann = FrameAnnotations(crop_region=(-50, -50, 50, 50), ground_height=-1.0)
    corrections = correct_sequence([ref, ref, ref], ann)
    for c in corrections:
        assert c.almost_equal(Pose.identity(), tol=1e-6) or \
            np.linalg.norm(c.translation[:2]) < 1e-3


def test_sequence_recovers_drift():
    base = structured_scene(400, seed=9)
    ann = FrameAnnotations(crop_region=(-50, -50, 50, 50), ground_height=-1.0)
    frames = [apply_se2(base, 0.1 * (i - 1), 0.0, 0.0) for i in range(3)]
    corrections = correct_sequence(frames, ann, reference_index=1)
    assert corrections[1].almost_equal(Pose.identity(), tol=1e-12)
    for i, corr in enumerate(corrections):
        fixed = corr.apply(frames[i].points)
        err = np.linalg.norm(fixed[:, :2] - frames[1].points[:, :2], axis=1).max()
        assert err < 0.05, f"frame {i} residual {err}"


def test_sequence_length_one():
    ref = structured_scene(100)
    ann = FrameAnnotations(crop_region=(-50, -50, 50, 50), ground_height=-1.0)
    corrections = correct_sequence([ref], ann)
    assert len(corrections) == 1
    assert corrections[0].almost_equal(Pose.identity(), tol=1e-12)


# ---------------------------------------------------------------------------
# file formats


def test_cloud_roundtrip(tmp_path):
    cloud = structured_scene(64)
    path = tmp_path / "c.pcbin"
    save_cloud(cloud, path)
    loaded = load_cloud(path, frame_id=3)
    assert loaded.frame_id == 3
    np.testing.assert_allclose(loaded.points, cloud.points, atol=1e-5)


def test_annotations_roundtrip(tmp_path):
    ann = {
        0: FrameAnnotations(
            dynamic_boxes=[DynamicBox(OrientedBox2D((1, 2), 0.3, (2, 1)), 0.0, 2.0)],
            ground_height=0.1, crop_region=(-30, -30, 30, 30)),
        1: FrameAnnotations(ground_height=0.2, crop_region=(-20, -20, 20, 20)),
    }
    path = tmp_path / "ann.txt"
    save_annotations(ann, path)
    loaded = load_annotations(path)
    assert set(loaded) == {0, 1}
    assert loaded[0].ground_height == pytest.approx(0.1)
    assert len(loaded[0].dynamic_boxes) == 1
    assert loaded[1].crop_region == (-20, -20, 20, 20)
