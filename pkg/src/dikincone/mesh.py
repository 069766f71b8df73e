"""Triangle meshes of 3-D constructions: the truncated cone and its source ellipsoid."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cone import ConeConstruction
from .errors import DimensionError, InvalidInputError
from .geometry import DikinEllipsoid

__all__ = ["Mesh", "cone_mesh", "ellipsoid_mesh", "write_obj", "write_csv"]


@dataclass
class Mesh:
    name: str
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray     # (F, 3), 0-based
    grid: tuple           # vertex count along each parameter


def _check(cc: ConeConstruction, resolution: int) -> int:
    if cc.dim != 3:
        raise DimensionError("meshes are only available for n = 3")
    resolution = int(resolution)
    if resolution < 1:
        raise InvalidInputError("resolution must be >= 1")
    return resolution


def cone_mesh(cc: ConeConstruction, resolution: int = 4) -> Mesh:
    """Lateral surface from the apex (origin) to the base ellipse.

    ``8 * resolution`` points around, ``2 * resolution`` rings along the
    generators, plus the apex.
    """
    r = _check(cc, resolution)
    m, rings = 8 * r, 2 * r
    phi = 2.0 * np.pi * np.arange(m) / m
    circle = np.column_stack([np.cos(phi), np.sin(phi)])
    rim = cc.base.point(cc.base.boundary_z(circle))
    s = np.arange(1, rings + 1) / rings
    verts = np.vstack([np.zeros((1, 3)), (s[:, None, None] * rim[None, :, :]).reshape(-1, 3)])
    faces = []
    for j in range(m):
        faces.append((0, 1 + j, 1 + (j + 1) % m))
    for k in range(rings - 1):
        a0, b0 = 1 + k * m, 1 + (k + 1) * m
        for j in range(m):
            j1 = (j + 1) % m
            faces.append((a0 + j, b0 + j, b0 + j1))
            faces.append((a0 + j, b0 + j1, a0 + j1))
    return Mesh("cone", verts, np.array(faces, dtype=int), (m, rings))


def ellipsoid_mesh(cc: ConeConstruction, resolution: int = 4) -> Mesh:
    """Latitude/longitude mesh of the source ellipsoid (Dikin or unit sphere)."""
    r = _check(cc, resolution)
    m, lats = 8 * r, 4 * r
    theta = np.pi * np.arange(1, lats + 1) / (lats + 1)
    phi = 2.0 * np.pi * np.arange(m) / m
    st, ct = np.sin(theta)[:, None], np.cos(theta)[:, None]
    band = np.stack([st * np.cos(phi), st * np.sin(phi), np.broadcast_to(ct, (lats, m))], axis=-1)
    unit = np.vstack([[0.0, 0.0, 1.0], band.reshape(-1, 3), [0.0, 0.0, -1.0]])
    src = cc.source
    c = np.asarray(src.center)
    verts = c + unit * c if isinstance(src, DikinEllipsoid) else c + unit
    south = unit.shape[0] - 1
    faces = []
    for j in range(m):
        faces.append((0, 1 + j, 1 + (j + 1) % m))
    for k in range(lats - 1):
        a0, b0 = 1 + k * m, 1 + (k + 1) * m
        for j in range(m):
            j1 = (j + 1) % m
            faces.append((a0 + j, b0 + j, b0 + j1))
            faces.append((a0 + j, b0 + j1, a0 + j1))
    last = 1 + (lats - 1) * m
    for j in range(m):
        faces.append((last + j, south, last + (j + 1) % m))
    return Mesh("ellipsoid", verts, np.array(faces, dtype=int), (m, lats))


def write_obj(path, meshes) -> Path:
    """Wavefront OBJ; one ``o`` block per mesh, 1-based global face indices."""
    path = Path(path)
    lines = []
    offset = 1
    for mesh in meshes:
        lines.append(f"o {mesh.name}")
        lines.extend(f"v {x!r} {y!r} {z!r}" for x, y, z in mesh.vertices.tolist())
        lines.extend(f"f {a + offset} {b + offset} {c + offset}" for a, b, c in mesh.faces.tolist())
        offset += len(mesh.vertices)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_csv(path, meshes) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["surface", "x", "y", "z"])
        for mesh in meshes:
            for x, y, z in mesh.vertices.tolist():
                w.writerow([mesh.name, repr(x), repr(y), repr(z)])
    return path
