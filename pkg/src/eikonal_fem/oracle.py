"""Exact distance-to-boundary solution for constant coefficients.

With constant a_i the viscosity solution is the distance to the boundary in
the norm ||z|| = sqrt(z1^2/a1sq + z2^2/a2sq).  After the change of
variables y_i = x_i / a_i this is the Euclidean distance, so the oracle is
a minimum of point-to-segment distances in scaled coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .mesh import PointOutsideDomain

__all__ = [
    "UndefinedField",
    "BoundaryPolygon",
    "ErrorReport",
    "exact_u",
    "error_norms",
    "grid_graph_distance",
]

BOUNDARY_TOL = 1e-10


class UndefinedField(ValueError):
    pass


class BoundaryPolygon:
    """Closed simple polygon given by its vertices in order."""

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("polygon needs at least three 2D vertices")
        self.vertices = v

    @classmethod
    def from_domain(cls, domain):
        return cls(domain.boundary_polygon())

    @property
    def segments(self):
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    @property
    def area(self):
        x, y = self.vertices.T
        return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def contains(self, points, tol=BOUNDARY_TOL):
        """Inside-or-on test (even-odd rule plus a boundary band of width ``tol``)."""
        p = np.atleast_2d(points)
        a, b = self.segments
        x, y = p[:, :1], p[:, 1:]
        ay, by = a[:, 1][None], b[:, 1][None]
        crosses = (ay > y) != (by > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a[:, 0][None] + (y - ay) * (b[:, 0] - a[:, 0])[None] / (by - ay)
        inside = np.sum(crosses & (x < xint), axis=1) % 2 == 1
        return inside | (_segment_distance(p, a, b).min(axis=1) <= tol)


def _segment_distance(p, a, b):
    """Euclidean distances (npts, nseg) from points to segments [a, b]."""
    d = b - a
    L2 = np.einsum("sd,sd->s", d, d)
    rel = p[:, None, :] - a[None]
    t = np.clip(np.einsum("psd,sd->ps", rel, d) / L2, 0.0, 1.0)
    closest = a[None] + t[..., None] * d[None]
    return np.linalg.norm(p[:, None, :] - closest, axis=2)


def exact_u(p, poly, a1sq=1.0, a2sq=1.0):
    """Anisotropic distance from point(s) ``p`` to the polygon boundary.

    >>> sq = BoundaryPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])
    >>> float(exact_u([0.5, 0.5], sq, 1.0, 4.0))
    0.25
    """
    if not (a1sq > 0 and a2sq > 0):
        raise ValueError("a1sq and a2sq must be positive")
    pts = np.asarray(p, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    outside = ~poly.contains(pts)
    if np.any(outside):
        raise PointOutsideDomain(f"point {tuple(pts[outside][0])} lies outside the polygon")
    scale = 1.0 / np.sqrt([a1sq, a2sq])
    a, b = poly.segments
    d = _segment_distance(pts * scale, a * scale, b * scale).min(axis=1)
    return d[0] if scalar else d


@dataclass(frozen=True)
class ErrorReport:
    l_inf: float
    l2: float
    n_points: int


def error_norms(space, u, poly, a1sq=1.0, a2sq=1.0):
    """Errors of nodal values ``u`` against :func:`exact_u` over interior DOFs.

    The discrete L2 norm weights each DOF by the row sum of the consistent
    mass matrix (the integral of its basis function).
    """
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)):
        raise UndefinedField("u has undefined entries")
    from .fem import reference_basis, triangle_quadrature

    interior = space.interior_dofs
    exact = exact_u(space.dof_coords[interior], poly, a1sq, a2sq)
    err = u[interior] - exact

    qp, qw = triangle_quadrature(space.degree)
    phi, _ = reference_basis(space.degree, qp)
    areas = space.mesh.signed_areas()
    w = np.zeros(space.n_dofs)
    np.add.at(w, space.cell_dofs, 2.0 * areas[:, None] * (qw @ phi)[None, :])
    l2 = float(np.sqrt(np.sum(w[interior] * err**2)))
    return ErrorReport(float(np.max(np.abs(err), initial=0.0)), l2, len(interior))


def grid_graph_distance(poly, nx, ny, a1sq=1.0, a2sq=1.0):
    """Boundary distance on an 8-neighbour grid graph covering the polygon's bounding box.

    Returns ``(points, dist)`` for the grid nodes inside the closed polygon.
    Independent of :func:`exact_u` and usable for variable metrics later.
    """
    lo = poly.vertices.min(axis=0)
    hi = poly.vertices.max(axis=0)
    xs = np.linspace(lo[0], hi[0], nx + 1)
    ys = np.linspace(lo[1], hi[1], ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    inside = poly.contains(pts, tol=1e-9).reshape(X.shape)
    idx = -np.ones(X.shape, dtype=np.int64)
    idx[inside] = np.arange(inside.sum())
    scale = 1.0 / np.sqrt([a1sq, a2sq])

    I, J = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="ij")
    rows, cols, wts = [], [], []
    for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
        I2, J2 = I + di, J + dj
        valid = (I2 <= nx) & (J2 >= 0) & (J2 <= ny)
        a = idx[I[valid], J[valid]]
        b = idx[I2[valid], J2[valid]]
        mid = 0.5 * np.stack([xs[I[valid]] + xs[I2[valid]], ys[J[valid]] + ys[J2[valid]]], axis=1)
        ok = (a >= 0) & (b >= 0)
        ok[ok] = poly.contains(mid[ok], tol=1e-9)
        length = np.hypot(di * (xs[1] - xs[0]) * scale[0], dj * (ys[1] - ys[0]) * scale[1])
        rows.append(a[ok])
        cols.append(b[ok])
        wts.append(np.full(ok.sum(), length))
    n = int(inside.sum())
    G = sp.coo_matrix((np.concatenate(wts), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    node_pts = pts[inside.ravel()]
    a, b = poly.segments
    on_boundary = np.nonzero(_segment_distance(node_pts, a, b).min(axis=1) <= 1e-9)[0]
    dist = dijkstra(G.tocsr(), directed=False, indices=on_boundary, min_only=True)
    return node_pts, dist
