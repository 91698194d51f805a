"""Structured triangulations of the L-shaped and rectangular domains.

Every square cell of side ``h`` is split into two right isosceles triangles.
Vertex coordinates are stored as integer grid indices times ``h`` so that
boundary classification never depends on a geometric tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

__all__ = [
    "Marker",
    "DomainSpec",
    "Mesh",
    "PointLocation",
    "PointOutsideDomain",
    "MeshResourceError",
    "build_lshape",
    "build_rect",
    "locate_point",
    "locate_points",
    "write_vtk",
]

MAX_LSHAPE_LEVEL = 8
LOCATE_TOL = 1e-10
SIDES = ("left", "right", "bottom", "top")


class PointOutsideDomain(ValueError):
    pass


class MeshResourceError(MemoryError):
    pass


class Marker(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class DomainSpec:
    """Domain shape plus a boundary condition marker for each straight side.

    ``shape`` is ``"lshape"`` or ``"rect"``.  For a rectangle the sides are
    ``left/right/bottom/top``; the L-shape only admits Dirichlet sides.
    """

    shape: str = "lshape"
    width: float = 1.0
    height: float = 1.0
    markers: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.shape not in ("lshape", "rect"):
            raise ValueError(f"unknown domain shape {self.shape!r}")
        markers = {s: Marker(self.markers.get(s, Marker.DIRICHLET)) for s in SIDES}
        unknown = set(self.markers) - set(SIDES)
        if unknown:
            raise ValueError(f"unknown boundary sides {sorted(unknown)}")
        if not any(m is Marker.DIRICHLET for m in markers.values()):
            raise ValueError("at least one side must be Dirichlet")
        if self.shape == "lshape" and any(m is Marker.NEUMANN for m in markers.values()):
            raise ValueError("the L-shaped domain only supports Dirichlet sides")
        if self.shape == "rect" and not (self.width > 0 and self.height > 0):
            raise ValueError("rectangle sides must be positive")
        object.__setattr__(self, "markers", markers)

    @classmethod
    def rect(cls, width=1.0, height=1.0, neumann=()):
        return cls("rect", width, height, {s: Marker.NEUMANN for s in neumann})

    @property
    def area(self):
        return 2.5 if self.shape == "lshape" else self.width * self.height

    def boundary_polygon(self):
        """Counterclockwise boundary vertices (closed implicitly)."""
        if self.shape == "lshape":
            return np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 1.5], [0, 1.5]], dtype=float)
        w, h = self.width, self.height
        return np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=float)


@dataclass(frozen=True)
class PointLocation:
    triangle_index: int
    barycentric: np.ndarray


class Mesh:
    """Conforming triangulation.

    Attributes
    ----------
    vertices : (nv, 2) float array
    triangles : (nt, 3) int array, counterclockwise
    boundary_edges : (nb, 2) int array
    boundary_markers : (nb,) array of ``Marker``
    h : grid step (leg length of every triangle)
    """

    def __init__(self, vertices, triangles, boundary_edges, boundary_markers, h, domain=None):
        self.vertices = np.asarray(vertices, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        self.boundary_edges = np.asarray(boundary_edges, dtype=np.int64).reshape(-1, 2)
        self.boundary_markers = np.asarray(boundary_markers, dtype=object)
        self.h = float(h)
        self.domain = domain
        for arr in (self.vertices, self.triangles, self.boundary_edges):
            arr.setflags(write=False)

    def __repr__(self):
        return f"Mesh(nv={self.n_vertices}, nt={self.n_triangles}, h={self.h:g})"

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def signed_areas(self):
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def edges(self):
        """Unique undirected edges (sorted vertex pairs) and triangle-to-edge map.

        ``tri_edges[t, k]`` indexes the edge joining local vertices ``k`` and
        ``(k + 1) % 3`` of triangle ``t``.
        """
        t = self.triangles
        local = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1)
        flat = np.sort(local.reshape(-1, 2), axis=1)
        edges, inverse = np.unique(flat, axis=0, return_inverse=True)
        return edges, inverse.reshape(-1, 3)

    @property
    def dirichlet_edges(self):
        mask = np.array([m is Marker.DIRICHLET for m in self.boundary_markers], dtype=bool)
        return self.boundary_edges[mask] if len(mask) else self.boundary_edges

    @cached_property
    def _buckets(self):
        # triangle index lists keyed by the grid cells their bounding boxes touch
        lo = self.vertices.min(axis=0)
        p = self.vertices[self.triangles]
        i0 = np.floor((p.min(axis=1) - lo) / self.h + 1e-9).astype(int)
        i1 = np.floor((p.max(axis=1) - lo) / self.h - 1e-9).astype(int)
        buckets = {}
        for t in range(len(p)):
            for i in range(i0[t, 0], i1[t, 0] + 1):
                for j in range(i0[t, 1], i1[t, 1] + 1):
                    buckets.setdefault((i, j), []).append(t)
        return lo, {k: np.array(v) for k, v in buckets.items()}


def _structured(cell_mask, h, side_of_edge, diagonal="up", domain=None):
    """Triangulate the cells flagged in ``cell_mask[i, j]`` (cell lower-left at (i, j)·h)."""
    ni, nj = cell_mask.shape
    ci, cj = np.nonzero(cell_mask)
    used = np.zeros((ni + 1, nj + 1), dtype=bool)
    for di in (0, 1):
        for dj in (0, 1):
            used[ci + di, cj + dj] = True
    # number vertices row by row (x fastest) for a readable layout
    vi, vj = np.nonzero(used.T)
    vi, vj = vj, vi
    index = -np.ones_like(used, dtype=np.int64)
    index[vi, vj] = np.arange(len(vi))
    grid_ij = np.stack([vi, vj], axis=1)

    order = np.lexsort((ci, cj))
    ci, cj = ci[order], cj[order]
    p00 = index[ci, cj]
    p10 = index[ci + 1, cj]
    p11 = index[ci + 1, cj + 1]
    p01 = index[ci, cj + 1]
    if diagonal == "up":
        tri = np.stack([np.stack([p00, p10, p11], 1), np.stack([p00, p11, p01], 1)], axis=1)
    elif diagonal == "down":
        tri = np.stack([np.stack([p00, p10, p01], 1), np.stack([p10, p11, p01], 1)], axis=1)
    else:
        raise ValueError(f"diagonal must be 'up' or 'down', got {diagonal!r}")
    triangles = tri.reshape(-1, 3)

    local = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    key = np.sort(local, axis=1)
    _, first, counts = np.unique(key, axis=0, return_index=True, return_counts=True)
    bnd = local[np.sort(first[counts == 1])]
    markers = np.array([side_of_edge(grid_ij[a], grid_ij[b]) for a, b in bnd], dtype=object)
    return Mesh(grid_ij * h, triangles, bnd, markers, h, domain=domain)


def build_lshape(level=0, diagonal="up"):
    """Mesh of [0,1]x[0,1.5] U [1,2]x[0,1] with step h = 1/(32 * 2**level).

    >>> m = build_lshape(0)
    >>> m.n_vertices, m.n_triangles
    (2673, 5120)
    """
    level = int(level)
    if level < 0:
        raise ValueError("level must be non-negative")
    if level > MAX_LSHAPE_LEVEL:
        raise MeshResourceError(f"level {level} exceeds the supported maximum {MAX_LSHAPE_LEVEL}")
    n = 32 * 2**level
    mask = np.zeros((2 * n, 3 * n // 2), dtype=bool)
    mask[:n, :] = True
    mask[n:, :n] = True
    return _structured(mask, 1.0 / n, lambda a, b: Marker.DIRICHLET, diagonal, DomainSpec("lshape"))


def build_rect(nx, ny, spec=None, diagonal="up"):
    """Mesh of [0, W] x [0, H] with ``nx * ny`` cells, each split in two triangles.

    Cells must be square; boundary edges take their marker from ``spec``.
    """
    spec = spec or DomainSpec.rect()
    if spec.shape != "rect":
        raise ValueError("build_rect needs a rectangular DomainSpec")
    if nx < 1 or ny < 1:
        raise ValueError("cell counts must be at least 1")
    hx, hy = spec.width / nx, spec.height / ny
    if not np.isclose(hx, hy, rtol=1e-12):
        raise ValueError(f"cells are not square (hx={hx}, hy={hy})")

    def side(a, b):
        if a[0] == b[0] == 0:
            return spec.markers["left"]
        if a[0] == b[0] == nx:
            return spec.markers["right"]
        if a[1] == b[1] == 0:
            return spec.markers["bottom"]
        return spec.markers["top"]

    return _structured(np.ones((nx, ny), dtype=bool), hx, side, diagonal, spec)


def _barycentric(mesh, tris, p):
    v = mesh.vertices[mesh.triangles[tris]]
    d1 = v[:, 1] - v[:, 0]
    d2 = v[:, 2] - v[:, 0]
    r = p - v[:, 0]
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    l1 = (r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]) / det
    l2 = (d1[:, 0] * r[:, 1] - d1[:, 1] * r[:, 0]) / det
    return np.stack([1.0 - l1 - l2, l1, l2], axis=1)


def locate_point(mesh, p, tol=LOCATE_TOL):
    """Containing triangle (lowest index on ties) and barycentric coordinates of ``p``."""
    p = np.asarray(p, dtype=float)
    lo, buckets = mesh._buckets
    s = (p - lo) / mesh.h
    cands = set()
    for i in {int(np.floor(s[0] - 1e-9)), int(np.floor(s[0] + 1e-9))}:
        for j in {int(np.floor(s[1] - 1e-9)), int(np.floor(s[1] + 1e-9))}:
            cands.update(buckets.get((i, j), ()))
    if cands:
        tris = np.array(sorted(cands))
        bary = _barycentric(mesh, tris, p)
        inside = np.nonzero(bary.min(axis=1) >= -tol)[0]
        if len(inside):
            k = inside[0]
            return PointLocation(int(tris[k]), bary[k])
    raise PointOutsideDomain(f"point {tuple(p)} is not inside the mesh")


def locate_points(mesh, points, tol=LOCATE_TOL):
    """Vectorised front end of :func:`locate_point`; returns (tri, bary) arrays."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    tri = np.empty(len(points), dtype=np.int64)
    bary = np.empty((len(points), 3))
    for n, p in enumerate(points):
        loc = locate_point(mesh, p, tol)
        tri[n] = loc.triangle_index
        bary[n] = loc.barycentric
    return tri, bary


def write_vtk(path, mesh, point_data=None, title="eikonal_fem mesh"):
    """Legacy ASCII VTK unstructured grid with triangle cells (type 5).

    ``point_data`` maps names to per-vertex arrays; integer arrays are
    written as ``int`` scalars, everything else as ``double``.
    """
    nv, nt = mesh.n_vertices, mesh.n_triangles
    lines = [
        "# vtk DataFile Version 2.0",
        title,
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {nv} double",
    ]
    lines += [f"{x:.12g} {y:.12g} 0" for x, y in mesh.vertices]
    lines.append(f"CELLS {nt} {4 * nt}")
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    lines.append(f"CELL_TYPES {nt}")
    lines += ["5"] * nt
    if point_data:
        lines.append(f"POINT_DATA {nv}")
        for name, values in point_data.items():
            values = np.asarray(values)
            if len(values) != nv:
                raise ValueError(f"point data {name!r} has {len(values)} entries, expected {nv}")
            if np.issubdtype(values.dtype, np.integer) or values.dtype == bool:
                lines += [f"SCALARS {name} int 1", "LOOKUP_TABLE default"]
                lines += [str(int(x)) for x in values]
            else:
                lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
                lines += [f"{x:.12g}" for x in values]
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
