import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eikonal_fem.fem import build_space
from eikonal_fem.mesh import DomainSpec, PointOutsideDomain, build_lshape, build_rect
from eikonal_fem.oracle import (
    BoundaryPolygon,
    UndefinedField,
    error_norms,
    exact_u,
    grid_graph_distance,
)

LSHAPE = BoundaryPolygon.from_domain(DomainSpec())
SQUARE = BoundaryPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def sampled_distance(p, poly, a1sq, a2sq, n=20001):
    """Brute force: min over densely sampled boundary points of the scaled distance."""
    a, b = poly.segments
    t = np.linspace(0.0, 1.0, n)[:, None]
    pts = np.concatenate([ai + t * (bi - ai) for ai, bi in zip(a, b)])
    d = (pts - np.asarray(p)) / np.sqrt([a1sq, a2sq])
    return np.hypot(d[:, 0], d[:, 1]).min()


def test_square_center():
    assert exact_u([0.5, 0.5], SQUARE) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize(
    "poly, p, a1sq, a2sq, expected",
    [
        (LSHAPE, (0.7, 0.7), 1.0, 1.0, np.sqrt(2) * 0.3),
        (SQUARE, (0.5, 0.5), 1.0, 4.0, 0.25),
        (LSHAPE, (1.5, 0.5), 1.0, 1.0, 0.5),
        (LSHAPE, (0.3, 1.2), 1.0, 10.0, None),
        (LSHAPE, (0.9, 0.8), 2.0, 0.5, None),
    ],
)
def test_against_dense_sampling(poly, p, a1sq, a2sq, expected):
    brute = sampled_distance(p, poly, a1sq, a2sq)
    got = exact_u(p, poly, a1sq, a2sq)
    assert got == pytest.approx(brute, abs=2e-4)
    if expected is not None:
        assert got == pytest.approx(expected, abs=1e-12)


def test_outside_rejected():
    with pytest.raises(PointOutsideDomain):
        exact_u([1.5, 1.25], LSHAPE)
    with pytest.raises(PointOutsideDomain):
        exact_u([-1.0, -1.0], LSHAPE)


def test_zero_on_boundary():
    a, b = LSHAPE.segments
    pts = np.concatenate([a, 0.5 * (a + b)])
    assert np.allclose(exact_u(pts, LSHAPE, 1.0, 4.0), 0.0, atol=1e-12)
    m = build_lshape(0)
    assert np.allclose(exact_u(m.vertices[m.boundary_edges.ravel()], LSHAPE), 0.0, atol=1e-12)


def test_diagonal_profile_peak():
    # along (t, t) the isotropic distance is min(t, sqrt(2)(1 - t)); peak where they balance
    t = np.linspace(0.0, 1.0, 200001)
    d = exact_u(np.stack([t, t], axis=1), LSHAPE)
    t_star = np.sqrt(2) / (1 + np.sqrt(2))
    assert t[np.argmax(d)] == pytest.approx(t_star, abs=1e-5)
    assert d.max() == pytest.approx(t_star, abs=1e-5)
    assert np.allclose(d, np.minimum(t, np.sqrt(2) * (1 - t)), atol=1e-12)


interior = st.one_of(
    st.tuples(st.floats(0.0, 1.0), st.floats(0.0, 1.5)),
    st.tuples(st.floats(1.0, 2.0), st.floats(0.0, 1.0)),
)
coef = st.floats(0.1, 10.0)


@settings(max_examples=200, deadline=None)
@given(interior, interior, coef, coef)
def test_lipschitz_in_scaled_metric(p, q, a1sq, a2sq):
    p, q = np.array(p), np.array(q)
    up, uq = exact_u(p, LSHAPE, a1sq, a2sq), exact_u(q, LSHAPE, a1sq, a2sq)
    dist = np.sqrt((p[0] - q[0]) ** 2 / a1sq + (p[1] - q[1]) ** 2 / a2sq)
    assert abs(up - uq) <= dist + 1e-12


@settings(max_examples=200, deadline=None)
@given(interior, st.floats(0.05, 20.0))
def test_isotropic_scaling_reduction(p, c2):
    got = exact_u(np.array(p), LSHAPE, c2, c2)
    assert got == pytest.approx(exact_u(np.array(p), LSHAPE) / np.sqrt(c2), rel=1e-12, abs=1e-14)


def test_against_grid_graph_dijkstra():
    pts, graph = grid_graph_distance(LSHAPE, 200, 150)
    exact = exact_u(pts, LSHAPE)
    assert len(pts) == 201 * 101 + 101 * 50  # nodes of the closed L on the 0.01 lattice
    # the graph metric can only overestimate, by at most the octagonal-norm factor
    assert np.all(graph >= exact - 1e-12)
    assert np.all(graph <= (1 / np.cos(np.pi / 8)) * exact + 1e-12)
    assert np.abs(graph - exact).sum() / exact.sum() <= 0.02


def test_grid_graph_anisotropic():
    pts, graph = grid_graph_distance(SQUARE, 100, 100, 1.0, 4.0)
    exact = exact_u(pts, SQUARE, 1.0, 4.0)
    assert np.all(graph >= exact - 1e-12)
    assert np.abs(graph - exact).sum() / exact.sum() <= 0.02


def test_error_norms_identity_and_shift():
    s = build_space(build_lshape(0), 2)
    u = exact_u(s.dof_coords, LSHAPE)
    rep = error_norms(s, u, LSHAPE)
    assert rep.l_inf == 0 and rep.l2 == 0
    assert rep.n_points == len(s.interior_dofs)
    rep = error_norms(s, u + 0.125, LSHAPE)
    assert rep.l_inf == pytest.approx(0.125)
    assert rep.l2 <= rep.l_inf * np.sqrt(2.5)
    # weights integrate the interior DOFs' hat functions, so the L2 norm is just below c*sqrt(area)
    assert rep.l2 == pytest.approx(0.125 * np.sqrt(2.5), rel=0.05)
    u[s.interior_dofs[3]] = np.nan
    with pytest.raises(UndefinedField):
        error_norms(s, u, LSHAPE)


def test_error_norms_anisotropic_rect():
    dom = DomainSpec.rect(2.0, 1.0)
    poly = BoundaryPolygon.from_domain(dom)
    s = build_space(build_rect(8, 4, dom), 1)
    u = exact_u(s.dof_coords, poly, 1.0, 4.0)
    assert error_norms(s, u, poly, 1.0, 4.0).l_inf == 0
    assert error_norms(s, u, poly).l_inf > 0
