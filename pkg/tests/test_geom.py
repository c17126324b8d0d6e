import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drivesim.errors import ValidationError
from drivesim.geom import (OrientedBox2D, Polygon2D, Pose, boxes_overlap,
                           build_scene, footprint_in_polygon, load_mesh,
                           make_box, make_quad, make_uv_sphere, oriented_iou,
                           ray_cast, save_mesh, trace_batch, wrap_angle)

# ---------------------------------------------------------------------------
# Pose


def rand_pose(rng):
    yaw = rng.uniform(-np.pi, np.pi)
    return Pose.from_xyyaw(*rng.uniform(-10, 10, size=2), yaw, z=rng.uniform(-2, 2))


def test_pose_identity_roundtrip():
    p = Pose.from_xyyaw(1.0, 2.0, 0.3, z=0.5)
    q = p.compose(p.inverse())
    assert q.almost_equal(Pose.identity(), tol=1e-12)


def test_pose_orthonormal_invariant():
    rng = np.random.default_rng(0)
    for _ in range(100):
        p = rand_pose(rng)
        assert p.is_orthonormal(tol=1e-9)


def test_pose_compose_associative_and_inverse_rule():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b, c = (rand_pose(rng) for _ in range(3))
        left = a.compose(b).compose(c)
        right = a.compose(b.compose(c))
        assert left.almost_equal(right, tol=1e-9)
        assert a.compose(b).inverse().almost_equal(
            b.inverse().compose(a.inverse()), tol=1e-9)


def test_pose_rejects_non_rotation():
    with pytest.raises(ValidationError):
        Pose(np.eye(3) * 2.0, np.zeros(3))


@given(st.floats(-50, 50))
def test_wrap_angle_range(theta):
    w = wrap_angle(theta)
    assert -math.pi < w <= math.pi
    assert abs(math.remainder(w - theta, 2 * math.pi)) < 1e-9


# ---------------------------------------------------------------------------
# ray_cast


def test_ray_plane_analytic():
    # unit ground plane z=5, ray +z from origin -> distance 5.0 exactly
    scene = build_scene([(make_quad(50, 50, z=5.0), Pose.identity(), 0)])
    hit = ray_cast(scene, (0, 0, 0), (0, 0, 1))
    assert hit is not None
    assert abs(hit.distance - 5.0) < 1e-6
    # oblique ray: analytic t = 5 / dz
    d = np.array([0.3, -0.2, 0.9])
    d /= np.linalg.norm(d)
    hit = ray_cast(scene, (0, 0, 0), d)
    assert abs(hit.distance - 5.0 / d[2]) < 1e-6


def test_ray_miss():
    scene = build_scene([(make_quad(10, 10, z=5.0), Pose.identity(), 0)])
    assert ray_cast(scene, (0, 0, 0), (0, 0, -1)) is None


def test_ray_sphere_analytic():
    # unit sphere centered (0,0,10); +z ray hits the pole vertex at t=9 exactly
    scene = build_scene([(make_uv_sphere(1.0, center=(0, 0, 10)), Pose.identity(), 7)])
    hit = ray_cast(scene, (0, 0, 0), (0, 0, 1))
    assert hit is not None
    assert abs(hit.distance - 9.0) < 1e-6
    assert hit.mesh_id == 7


def test_ray_deterministic():
    scene = build_scene([(make_box((1, 1, 1), center=(0, 0, 5)), Pose.identity(), 0)])
    h1 = ray_cast(scene, (0.1, 0.2, 0), (0, 0, 1))
    h2 = ray_cast(scene, (0.1, 0.2, 0), (0, 0, 1))
    assert h1.distance == h2.distance
    assert np.array_equal(h1.point, h2.point)


def test_trace_matches_bruteforce():
    """BVH nearest hit equals a brute-force Moller-Trumbore sweep."""
    rng = np.random.default_rng(42)
    v0 = rng.uniform(-5, 5, size=(150, 3))
    e1 = rng.uniform(-1, 1, size=(150, 3))
    e2 = rng.uniform(-1, 1, size=(150, 3))
    verts = np.vstack([v0, v0 + e1, v0 + e2])
    faces = np.arange(450).reshape(3, 150).T
    from drivesim.geom.mesh import TriangleMesh
    mesh = TriangleMesh(verts, faces, None, np.full(3, 0.5))
    scene = build_scene([(mesh, Pose.identity(), 0)])

    origins = rng.uniform(-8, 8, size=(200, 3))
    dirs = rng.normal(size=(200, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    t, tri, _, _ = trace_batch(scene, origins, dirs)

    def brute(o, d):
        best = np.inf
        for k in range(len(faces)):
            a = verts[faces[k, 0]]
            b = verts[faces[k, 1]] - a
            c = verts[faces[k, 2]] - a
            p = np.cross(d, c)
            det = b @ p
            if abs(det) < 1e-14:
                continue
            s = o - a
            u = (s @ p) / det
            if u < -1e-12 or u > 1 + 1e-12:
                continue
            q = np.cross(s, b)
            v = (d @ q) / det
            if v < -1e-12 or u + v > 1 + 1e-12:
                continue
            tt = (c @ q) / det
            if 1e-6 < tt < best:
                best = tt
        return best
    for i in range(len(origins)):
        expect = brute(origins[i], dirs[i])
        got = t[i] if tri[i] >= 0 else np.inf
        if np.isinf(expect):
            assert tri[i] < 0
        else:
            assert abs(got - expect) < 1e-9


# ---------------------------------------------------------------------------
# boxes


def test_boxes_overlap_examples():
    b = OrientedBox2D((0, 0), 0.0, (0.5, 0.5))
    assert boxes_overlap(b, b)
    far = OrientedBox2D((3, 0), 0.0, (0.5, 0.5))
    assert not boxes_overlap(b, far)
    rot = OrientedBox2D((0.9, 0), np.pi / 4, (0.5, 0.5))
    assert boxes_overlap(b, rot)
    # sampling oracle confirms the rotated case
    assert _sampled_intersection_area(b, rot) > 1e-3


def _sampled_intersection_area(a: OrientedBox2D, b: OrientedBox2D,
                               res: int = 150) -> float:
    """Dense point sampling over box a, counting points inside b."""
    hl, hw = a.half_extents
    xs = (np.arange(res) + 0.5) / res * 2 * hl - hl
    ys = (np.arange(res) + 0.5) / res * 2 * hw - hw
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    c, s = math.cos(a.heading), math.sin(a.heading)
    world = pts @ np.array([[c, s], [-s, c]]) + a.center
    d = world - b.center
    cb, sb = math.cos(b.heading), math.sin(b.heading)
    lx = cb * d[:, 0] + sb * d[:, 1]
    ly = -sb * d[:, 0] + cb * d[:, 1]
    inside = (np.abs(lx) <= b.half_extents[0]) & (np.abs(ly) <= b.half_extents[1])
    return inside.mean() * a.area()


def test_sat_agrees_with_sampling_oracle():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a = OrientedBox2D(rng.uniform(-2, 2, 2), rng.uniform(-np.pi, np.pi),
                          rng.uniform(0.05, 1.5, 2))
        b = OrientedBox2D(rng.uniform(-2, 2, 2), rng.uniform(-np.pi, np.pi),
                          rng.uniform(0.05, 1.5, 2))
        area = _sampled_intersection_area(a, b)
        sat = boxes_overlap(a, b)
        if area > 1e-4:
            assert sat, f"SAT missed overlap of area {area}"
        if not sat:
            assert area <= 1e-4


def test_iou_identity_and_disjoint():
    b = OrientedBox2D((1, 2), 0.4, (1.0, 0.6))
    assert oriented_iou(b, b) == 1.0
    far = OrientedBox2D((10, 2), 0.0, (1.0, 0.6))
    assert oriented_iou(b, far) == 0.0


def test_iou_axis_aligned_third():
    # [0,2]x[0,1] vs [1,3]x[0,1]: IoU = 1/3; rasterization oracle at 1e-3 cells
    a = OrientedBox2D((1.0, 0.5), 0.0, (1.0, 0.5))
    b = OrientedBox2D((2.0, 0.5), 0.0, (1.0, 0.5))
    got = oriented_iou(a, b)
    xs = np.arange(0.0005, 3.0, 0.001)
    ys = np.arange(0.0005, 1.0, 0.001)
    gx, gy = np.meshgrid(xs, ys)
    in_a = (gx >= 0) & (gx <= 2)
    in_b = (gx >= 1) & (gx <= 3)
    oracle = (in_a & in_b).sum() / (in_a | in_b).sum()
    assert abs(got - 1.0 / 3.0) < 1e-12
    assert abs(got - oracle) < 1e-3


def test_iou_symmetric_and_rigid_invariant():
    rng = np.random.default_rng(3)
    for _ in range(100):
        a = OrientedBox2D(rng.uniform(-2, 2, 2), rng.uniform(-np.pi, np.pi),
                          rng.uniform(0.1, 1.5, 2))
        b = OrientedBox2D(rng.uniform(-2, 2, 2), rng.uniform(-np.pi, np.pi),
                          rng.uniform(0.1, 1.5, 2))
        i1 = oriented_iou(a, b)
        assert abs(i1 - oriented_iou(b, a)) < 1e-12
        # common rigid transform
        dx, dy, dth = rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-np.pi, np.pi)
        c, s = math.cos(dth), math.sin(dth)
        rot = np.array([[c, -s], [s, c]])

        def moved(x):
            return OrientedBox2D(rot @ x.center + (dx, dy),
                                 wrap_angle(x.heading + dth), x.half_extents)
        assert abs(i1 - oriented_iou(moved(a), moved(b))) < 1e-9


# ---------------------------------------------------------------------------
# polygons


def square(side=10.0):
    h = side / 2
    return Polygon2D([(-h, -h), (h, -h), (h, h), (-h, h)])


def test_footprint_inside():
    box = OrientedBox2D((0, 0), 0.3, (1.0, 0.5))
    assert footprint_in_polygon(box, square())


def test_footprint_outside():
    box = OrientedBox2D((20, 0), 0.0, (1.0, 0.5))
    assert not footprint_in_polygon(box, square())


def test_footprint_straddles_edge():
    # one corner out; point-in-polygon oracle per corner
    poly = square(10.0)
    box = OrientedBox2D((4.8, 0), 0.0, (1.0, 0.5))
    corners = box.corners()
    inside = [poly.contains_point(c) for c in corners]
    assert not all(inside) and any(inside)
    assert not footprint_in_polygon(box, poly)


def test_footprint_boundary_inclusive():
    # box corner exactly on the boundary counts as inside
    poly = square(10.0)
    box = OrientedBox2D((4.0, 0), 0.0, (1.0, 0.5))  # corners at x=5
    assert footprint_in_polygon(box, poly)


# ---------------------------------------------------------------------------
# mesh io


def test_mesh_roundtrip(tmp_path):
    mesh = make_box((1, 2, 0.5), albedo=(0.2, 0.4, 0.6))
    path = tmp_path / "box.obj"
    save_mesh(mesh, path)
    loaded = load_mesh(path)
    assert loaded.num_faces == mesh.num_faces
    np.testing.assert_allclose(loaded.vertices, mesh.vertices, atol=1e-8)
    np.testing.assert_allclose(loaded.albedo, mesh.albedo, atol=1e-6)


def test_mesh_missing_asset(tmp_path):
    from drivesim.errors import MissingAsset
    with pytest.raises(MissingAsset):
        load_mesh(tmp_path / "nope.obj")
