"""Lagrange P1-P3 spaces on triangles and assembly of alpha^2 K + M.

The bilinear form is

    a(y, v) = int( alpha^2 (a1sq y_x v_x + a2sq y_y v_y) + y v ) dx

and the boundary value v = 1 is imposed by eliminating the Dirichlet
degrees of freedom.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.io
import scipy.sparse as sp
from scipy.special import roots_jacobi
from numpy.polynomial.legendre import leggauss

from .mesh import Mesh, locate_points

__all__ = [
    "UnsupportedDegree",
    "LumpingUnsupported",
    "CoefficientField",
    "FeSpace",
    "AssembledSystem",
    "triangle_quadrature",
    "reference_nodes",
    "reference_basis",
    "build_space",
    "element_matrices",
    "assemble_matrices",
    "reduce_system",
    "assemble",
    "evaluate_field",
    "export_matrix_market",
]

SUPPORTED_DEGREES = (1, 2, 3)
_CHUNK = 16384


class UnsupportedDegree(ValueError):
    pass


class LumpingUnsupported(ValueError):
    pass


def _check_degree(degree):
    if degree not in SUPPORTED_DEGREES:
        raise UnsupportedDegree(f"Lagrange degree must be one of {SUPPORTED_DEGREES}, got {degree!r}")


@dataclass(frozen=True)
class CoefficientField:
    """Squared diffusion coefficients a1sq(x), a2sq(x).

    Each entry is either a positive constant or a vectorised callable
    ``f(x1, x2) -> array``.
    """

    a1sq: object = 1.0
    a2sq: object = 1.0

    @property
    def is_constant(self):
        return not (callable(self.a1sq) or callable(self.a2sq))

    def evaluate(self, x1, x2):
        out = []
        for a in (self.a1sq, self.a2sq):
            val = a(x1, x2) if callable(a) else a
            val = np.broadcast_to(np.asarray(val, dtype=float), np.shape(x1))
            if not np.all(val > 0):
                raise ValueError("coefficients a_i^2 must be strictly positive")
            out.append(val)
        return out

    def scaled(self, c2):
        """Coefficients multiplied by ``c2``."""
        def mul(a):
            return (lambda x1, x2: c2 * np.asarray(a(x1, x2))) if callable(a) else c2 * a
        return CoefficientField(mul(self.a1sq), mul(self.a2sq))


@lru_cache(maxsize=None)
def triangle_quadrature(order):
    """Points and weights on the reference triangle, exact for total degree ``order``.

    Collapsed (Duffy) product of Gauss-Jacobi in x and Gauss-Legendre in the
    collapsed direction; weights sum to the reference area 1/2.
    """
    n = order // 2 + 1
    u, wu = roots_jacobi(n, 1.0, 0.0)  # weight (1 - u) on [-1, 1]
    s, ws = leggauss(n)
    u = (u + 1) / 2
    wu = wu / 4
    s = (s + 1) / 2
    ws = ws / 2
    x = np.repeat(u, n)
    y = (1 - np.repeat(u, n)) * np.tile(s, n)
    w = np.repeat(wu, n) * np.tile(ws, n)
    return np.stack([x, y], axis=1), w


@lru_cache(maxsize=None)
def reference_nodes(degree):
    """Lagrange nodes on the triangle (0,0),(1,0),(0,1).

    Order: the three vertices, then ``degree - 1`` points on each edge
    (0->1, 1->2, 2->0) walking away from the first vertex, then the
    interior points.
    """
    _check_degree(degree)
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    nodes = list(verts)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        for k in range(1, degree):
            nodes.append(verts[i] + k / degree * (verts[j] - verts[i]))
    for b in range(1, degree):
        for a in range(1, degree - b):
            nodes.append(np.array([a / degree, b / degree]))
    return np.array(nodes)


def _monomials(degree):
    return [(a, d - a) for d in range(degree + 1) for a in range(d, -1, -1)]


@lru_cache(maxsize=None)
def _basis_coefficients(degree):
    nodes = reference_nodes(degree)
    mono = _monomials(degree)
    V = np.array([[x**a * y**b for a, b in mono] for x, y in nodes])
    return np.linalg.inv(V)


def reference_basis(degree, pts):
    """Basis values (npts, nloc) and reference gradients (npts, nloc, 2) at ``pts``."""
    pts = np.atleast_2d(pts)
    x, y = pts[:, 0:1], pts[:, 1:2]
    mono = _monomials(degree)
    C = _basis_coefficients(degree)

    def pw(z, k):
        return z**k if k >= 0 else np.zeros_like(z)

    P = np.hstack([pw(x, a) * pw(y, b) for a, b in mono])
    Px = np.hstack([a * pw(x, a - 1) * pw(y, b) for a, b in mono])
    Py = np.hstack([b * pw(x, a) * pw(y, b - 1) for a, b in mono])
    return P @ C, np.stack([Px @ C, Py @ C], axis=2)


@dataclass(frozen=True, eq=False)
class FeSpace:
    mesh: Mesh
    degree: int
    dof_coords: np.ndarray
    cell_dofs: np.ndarray
    boundary_dofs: np.ndarray

    @property
    def n_dofs(self):
        return len(self.dof_coords)

    @property
    def n_local(self):
        return (self.degree + 1) * (self.degree + 2) // 2

    @property
    def interior_dofs(self):
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.boundary_dofs] = False
        return np.nonzero(mask)[0]

    def interpolate(self, f):
        """Nodal interpolant of a vectorised ``f(x1, x2)``."""
        return np.asarray(f(self.dof_coords[:, 0], self.dof_coords[:, 1]), dtype=float)


def build_space(mesh, degree):
    """Conforming Lagrange space of the given degree over ``mesh``."""
    _check_degree(degree)
    m = degree
    nv, nt = mesh.n_vertices, mesh.n_triangles
    tris = mesh.triangles
    edges, tri_edges = mesh.edges
    ne = len(edges)
    n_int = (m - 1) * (m - 2) // 2

    cell_dofs = [tris]
    for k, (i, j) in enumerate(((0, 1), (1, 2), (2, 0))):
        if m == 1:
            break
        e = tri_edges[:, k]
        forward = tris[:, i] < tris[:, j]
        steps = np.arange(m - 1)
        local = np.where(forward[:, None], steps[None, :], (m - 2 - steps)[None, :])
        cell_dofs.append(nv + e[:, None] * (m - 1) + local)
    if n_int:
        start = nv + ne * (m - 1)
        cell_dofs.append(start + np.arange(nt * n_int).reshape(nt, n_int))
    cell_dofs = np.hstack(cell_dofs)

    ndof = nv + ne * (m - 1) + nt * n_int
    coords = np.empty((ndof, 2))
    ref = reference_nodes(m)
    p = mesh.vertices[tris]
    # affine image of every reference node in every cell; shared nodes coincide
    phys = p[:, :1] + ref[None, :, :1] * (p[:, 1:2] - p[:, :1]) + ref[None, :, 1:] * (p[:, 2:3] - p[:, :1])
    coords[cell_dofs.ravel()] = phys.reshape(-1, 2)
    coords[:nv] = mesh.vertices

    bnd = mesh.dirichlet_edges
    bdofs = [bnd.ravel()]
    if m > 1 and len(bnd):
        key = edges[:, 0] * nv + edges[:, 1]
        b = np.sort(bnd, axis=1)
        eidx = np.searchsorted(key, b[:, 0] * nv + b[:, 1])
        bdofs.append((nv + eidx[:, None] * (m - 1) + np.arange(m - 1)).ravel())
    boundary = np.unique(np.concatenate(bdofs)).astype(np.int64)

    for arr in (coords, cell_dofs, boundary):
        arr.setflags(write=False)
    return FeSpace(mesh, m, coords, cell_dofs, boundary)


def _local_matrices(p, coeff, degree):
    """Local stiffness (coefficient-weighted, no alpha) and mass blocks for cells ``p`` (T, 3, 2)."""
    qp, qw = triangle_quadrature(2 * degree + 1)
    phi, dphi = reference_basis(degree, qp)
    J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)  # columns are edge vectors
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    if np.any(det <= 0):
        raise ValueError("degenerate or clockwise triangle")
    inv = np.empty_like(J)
    inv[:, 0, 0] = J[:, 1, 1]
    inv[:, 1, 1] = J[:, 0, 0]
    inv[:, 0, 1] = -J[:, 0, 1]
    inv[:, 1, 0] = -J[:, 1, 0]
    inv /= det[:, None, None]
    # physical gradients: grad = J^{-T} grad_ref
    G = np.einsum("qnr,trd->tqnd", dphi, inv)
    xq = p[:, :1, :] + np.einsum("qr,tdr->tqd", qp, J)
    a1, a2 = coeff.evaluate(xq[..., 0], xq[..., 1])
    w = qw[None, :] * det[:, None]
    K = np.einsum("tq,tqi,tqj->tij", w * a1, G[..., 0], G[..., 0])
    K += np.einsum("tq,tqi,tqj->tij", w * a2, G[..., 1], G[..., 1])
    Mref = np.einsum("q,qi,qj->ij", qw, phi, phi)
    M = det[:, None, None] * Mref[None]
    return K, M


def element_matrices(triangle, coeff, alpha, degree):
    """Local ``alpha^2 K`` and ``M`` blocks for a single triangle given by its 3 vertices."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    _check_degree(degree)
    K, M = _local_matrices(np.asarray(triangle, dtype=float)[None], coeff, degree)
    return alpha**2 * K[0], M[0]


def assemble_matrices(space, coeff, lumping=False):
    """Full (pre-elimination) stiffness K and mass M as CSR matrices.

    With ``lumping`` the mass matrix is replaced by the diagonal of its row sums.
    """
    if lumping and space.degree != 1:
        raise LumpingUnsupported("row-sum lumping is only available for degree 1")
    mesh = space.mesh
    n = space.n_dofs
    nl = space.n_local
    rows = np.repeat(space.cell_dofs, nl, axis=1).ravel()
    cols = np.tile(space.cell_dofs, (1, nl)).ravel()
    kvals, mvals = [], []
    for s in range(0, mesh.n_triangles, _CHUNK):
        p = mesh.vertices[mesh.triangles[s:s + _CHUNK]]
        K, M = _local_matrices(p, coeff, space.degree)
        kvals.append(K.reshape(len(p), -1))
        mvals.append(M.reshape(len(p), -1))
    K = sp.coo_matrix((np.concatenate(kvals).ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((np.concatenate(mvals).ravel(), (rows, cols)), shape=(n, n)).tocsr()
    if lumping:
        M = sp.diags(np.asarray(M.sum(axis=1)).ravel()).tocsr()
    return K, M


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    full_dim: int
    interior: np.ndarray
    boundary: np.ndarray
    lumped: bool

    def expand(self, x_interior, boundary_value=1.0):
        """Global DOF vector from interior values, boundary DOFs set to ``boundary_value``."""
        v = np.full(self.full_dim, boundary_value, dtype=float)
        v[self.interior] = x_interior
        return v


def reduce_system(space, K, M, alpha, lumped=False):
    """Form ``alpha^2 K + M`` and eliminate the Dirichlet DOFs (boundary value 1)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    A = (alpha**2 * K + M).tocsr()
    interior = space.interior_dofs
    boundary = space.boundary_dofs
    A_ii = A[interior][:, interior].tocsr()
    rhs = -(A[interior][:, boundary] @ np.ones(len(boundary)))
    return AssembledSystem(A_ii, rhs, space.n_dofs, interior, boundary, lumped)


def assemble(space, coeff, alpha, lumping=False):
    K, M = assemble_matrices(space, coeff, lumping)
    return reduce_system(space, K, M, alpha, lumping)


def evaluate_field(space, dof_values, points):
    """Values of the finite element function at arbitrary points inside the mesh."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    tri, bary = locate_points(space.mesh, points)
    phi, _ = reference_basis(space.degree, bary[:, 1:])
    vals = np.asarray(dof_values, dtype=float)[space.cell_dofs[tri]]
    return np.einsum("pi,pi->p", phi, vals)


def export_matrix_market(path, matrix, comment=""):
    scipy.io.mmwrite(path, sp.coo_matrix(matrix), comment=comment, symmetry="general")
