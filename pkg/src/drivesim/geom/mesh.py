"""Triangle meshes: container, ASCII ingestion, and a few procedural builders.

Mesh file grammar (OBJ subset, documented in docs/formats.md):
    v x y z [r g b]    vertex position, optional per-vertex albedo in [0,1]
    vn x y z           per-vertex normal (optional; computed if absent)
    f i j k            1-indexed triangle
    #...               comment
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import MissingAsset, ParseError, ValidationError

_NORMAL_TOL = 1e-6


@dataclass
class TriangleMesh:
    vertices: np.ndarray          # (V, 3) float64, meters
    faces: np.ndarray             # (F, 3) int32
    normals: np.ndarray           # (V, 3) unit, float64
    albedo: np.ndarray            # (V, 3) in [0, 1]

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int32).reshape(-1, 3)
        if self.normals is None:
            self.normals = vertex_normals(self.vertices, self.faces)
        self.normals = np.asarray(self.normals, dtype=np.float64).reshape(-1, 3)
        alb = np.asarray(self.albedo, dtype=np.float64)
        if alb.ndim == 1:  # uniform albedo
            alb = np.broadcast_to(alb.reshape(1, 3), (len(self.vertices), 3)).copy()
        self.albedo = alb
        self.validate()

    def validate(self):
        if len(self.faces) < 1:
            raise ValidationError("mesh has no faces")
        if self.faces.min() < 0 or self.faces.max() >= len(self.vertices):
            raise ValidationError("face index out of range")
        norms = np.linalg.norm(self.normals, axis=1)
        if np.abs(norms - 1.0).max() > _NORMAL_TOL:
            raise ValidationError("vertex normals not unit length")
        if self.albedo.min() < 0.0 or self.albedo.max() > 1.0:
            raise ValidationError("albedo outside [0, 1]")
        if self.albedo.shape != self.vertices.shape:
            raise ValidationError("albedo shape mismatch")

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def bounding_radius(self) -> float:
        """Radius of the smallest origin-centered sphere containing the mesh."""
        return float(np.linalg.norm(self.vertices, axis=1).max())


def vertex_normals(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Area-weighted vertex normals; degenerate vertices default to +z."""
    n = np.zeros_like(vertices)
    a, b, c = (vertices[faces[:, i]] for i in range(3))
    fn = np.cross(b - a, c - a)
    for i in range(3):
        np.add.at(n, faces[:, i], fn)
    lens = np.linalg.norm(n, axis=1)
    bad = lens < 1e-12
    n[bad] = (0.0, 0.0, 1.0)
    lens[bad] = 1.0
    return n / lens[:, None]


def load_mesh(path) -> TriangleMesh:
    """Parse the ASCII mesh grammar above."""
    path = Path(path)
    if not path.exists():
        raise MissingAsset(path)
    verts, vnormals, colors, faces = [], [], [], []
    with path.open("r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            try:
                if tag == "v":
                    if len(parts) not in (4, 7):
                        raise ValueError("expected 'v x y z [r g b]'")
                    verts.append([float(p) for p in parts[1:4]])
                    colors.append([float(p) for p in parts[4:7]] if len(parts) == 7 else None)
                elif tag == "vn":
                    vnormals.append([float(p) for p in parts[1:4]])
                elif tag == "f":
                    if len(parts) != 4:
                        raise ValueError("only triangles supported")
                    # tolerate obj-style v//vn references
                    faces.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
                # other tags ignored
            except ValueError as e:
                raise ParseError(str(e), path=path, line=lineno) from e
    if not verts or not faces:
        raise ParseError("mesh needs at least one vertex and one face", path=path)
    vertices = np.array(verts, dtype=np.float64)
    fallback = np.full(3, 0.5)
    albedo = np.array([c if c is not None else fallback for c in colors])
    normals = None
    if len(vnormals) == len(verts):
        normals = np.array(vnormals, dtype=np.float64)
        lens = np.linalg.norm(normals, axis=1, keepdims=True)
        normals = normals / np.where(lens > 1e-12, lens, 1.0)
    return TriangleMesh(vertices, np.array(faces), normals, albedo)


def save_mesh(mesh: TriangleMesh, path) -> None:
    lines = []
    for v, c in zip(mesh.vertices, mesh.albedo):
        lines.append("v %.9g %.9g %.9g %.6g %.6g %.6g" % (*v, *c))
    for n in mesh.normals:
        lines.append("vn %.9g %.9g %.9g" % tuple(n))
    for f in mesh.faces:
        lines.append("f %d %d %d" % (f[0] + 1, f[1] + 1, f[2] + 1))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# procedural builders (scene assets and test fixtures)

def make_quad(half_x: float, half_y: float, z: float = 0.0,
              albedo=(0.5, 0.5, 0.5)) -> TriangleMesh:
    """Axis-aligned rectangle in the z-plane, normal +z."""
    v = np.array([[-half_x, -half_y, z], [half_x, -half_y, z],
                  [half_x, half_y, z], [-half_x, half_y, z]])
    f = np.array([[0, 1, 2], [0, 2, 3]])
    n = np.tile((0.0, 0.0, 1.0), (4, 1))
    return TriangleMesh(v, f, n, np.asarray(albedo, dtype=np.float64))


def make_box(half_extents, center=(0.0, 0.0, 0.0), albedo=(0.5, 0.5, 0.5)) -> TriangleMesh:
    hx, hy, hz = half_extents
    cx, cy, cz = center
    corners = np.array([[sx * hx, sy * hy, sz * hz]
                        for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
                       dtype=np.float64) + (cx, cy, cz)
    # each face split into two triangles, outward winding
    quads = [
        (0, 1, 3, 2),  # -x
        (4, 6, 7, 5),  # +x
        (0, 4, 5, 1),  # -y
        (2, 3, 7, 6),  # +y
        (0, 2, 6, 4),  # -z
        (1, 5, 7, 3),  # +z
    ]
    faces = []
    for a, b, c, d in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return TriangleMesh(corners, np.array(faces), None,
                        np.asarray(albedo, dtype=np.float64))


def make_uv_sphere(radius: float, center=(0.0, 0.0, 0.0), rings: int = 16,
                   segments: int = 32, albedo=(0.5, 0.5, 0.5)) -> TriangleMesh:
    """Sphere with exact pole vertices on the z-axis."""
    cx, cy, cz = center
    verts = [[cx, cy, cz + radius]]
    for i in range(1, rings):
        phi = np.pi * i / rings
        for j in range(segments):
            th = 2.0 * np.pi * j / segments
            verts.append([cx + radius * np.sin(phi) * np.cos(th),
                          cy + radius * np.sin(phi) * np.sin(th),
                          cz + radius * np.cos(phi)])
    verts.append([cx, cy, cz - radius])
    south = len(verts) - 1
    faces = []
    for j in range(segments):
        faces.append((0, 1 + j, 1 + (j + 1) % segments))
    for i in range(rings - 2):
        row0 = 1 + i * segments
        row1 = row0 + segments
        for j in range(segments):
            j2 = (j + 1) % segments
            faces.append((row0 + j, row1 + j, row1 + j2))
            faces.append((row0 + j, row1 + j2, row0 + j2))
    last = 1 + (rings - 2) * segments
    for j in range(segments):
        faces.append((south, last + (j + 1) % segments, last + j))
    v = np.array(verts)
    mesh = TriangleMesh(v, np.array(faces), None, np.asarray(albedo, dtype=np.float64))
    # analytic normals are exact for a sphere
    n = (v - (cx, cy, cz)) / radius
    mesh.normals = n / np.linalg.norm(n, axis=1, keepdims=True)
    return mesh


def make_cylinder_wall(radius: float, z_min: float, z_max: float,
                       segments: int = 360, albedo=(0.5, 0.5, 0.5)) -> TriangleMesh:
    """Open cylinder shell around the z-axis, normals pointing inward."""
    verts, faces = [], []
    for j in range(segments):
        th = 2.0 * np.pi * j / segments
        x, y = radius * np.cos(th), radius * np.sin(th)
        verts.append([x, y, z_min])
        verts.append([x, y, z_max])
    for j in range(segments):
        a = 2 * j
        b = 2 * ((j + 1) % segments)
        faces.append((a, a + 1, b))
        faces.append((b, a + 1, b + 1))
    return TriangleMesh(np.array(verts), np.array(faces), None,
                        np.asarray(albedo, dtype=np.float64))


def make_car(length: float = 4.5, width: float = 1.9, height: float = 1.5,
             albedo=(0.7, 0.1, 0.1)) -> TriangleMesh:
    """Blocky two-box car, y-symmetric, base resting on z=0."""
    body = make_box((length / 2, width / 2, height * 0.28),
                    center=(0.0, 0.0, height * 0.28), albedo=albedo)
    cabin = make_box((length * 0.28, width * 0.42, height * 0.22),
                     center=(-length * 0.08, 0.0, height * 0.78),
                     albedo=tuple(0.75 * a for a in albedo))
    return merge_meshes([body, cabin])


def merge_meshes(meshes) -> TriangleMesh:
    offs, verts, faces, normals, albedo = 0, [], [], [], []
    for m in meshes:
        verts.append(m.vertices)
        faces.append(m.faces + offs)
        normals.append(m.normals)
        albedo.append(m.albedo)
        offs += len(m.vertices)
    return TriangleMesh(np.vstack(verts), np.vstack(faces),
                        np.vstack(normals), np.vstack(albedo))
