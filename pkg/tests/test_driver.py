import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eikonal_fem.driver import (
    NoMonotoneAlpha,
    Problem,
    RunConfig,
    alpha_sweep,
    check_monotone,
    cross_section,
    solve_v,
    transform_u,
)
from eikonal_fem.fem import CoefficientField
from eikonal_fem.mesh import DomainSpec


@pytest.fixture(scope="module")
def coarse():
    return Problem(RunConfig(level=0))


def test_check_monotone_examples():
    v = np.array([1.0, 0.5, 0.5, 0.5, 1.0])
    assert check_monotone(v, [1, 2, 3], 0.0) == (True, 0.5, 0.5)
    v[2] = -1e-9
    assert check_monotone(v, [1, 2, 3], 0.0)[0] is False
    v[2] = 1.0
    assert check_monotone(v, [1, 2, 3], 0.0)[0] is False
    # boundary entries are ignored
    assert check_monotone([-5.0, 0.3, 7.0], [1])[0] is True


def test_transform_u_examples():
    u = transform_u(np.array([1.0, np.exp(-1.0), -0.01, 0.0]), 1.0)
    assert u[0] == 0.0
    assert u[1] == pytest.approx(1.0, rel=1e-15)
    assert np.isnan(u[2]) and np.isnan(u[3])
    with pytest.raises(ValueError):
        transform_u([0.5], 0.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-300, 1.0), st.floats(2.0**-12, 8.0))
def test_transform_round_trip(v, alpha):
    u = transform_u(np.array([v]), alpha)[0]
    assert np.exp(-u / alpha) == pytest.approx(v, rel=1e-13)


def test_large_alpha_tends_to_one(coarse):
    r = coarse.solve(2.0**6)
    assert np.abs(r.v - 1.0).max() < 1e-3
    assert r.monotone


def test_solve_result_invariants(coarse):
    r = coarse.solve(2.0**-4)
    bd = coarse.space.boundary_dofs
    assert np.all(r.v[bd] == 1.0)
    assert r.monotone
    u = transform_u(r.v, r.alpha)
    assert np.all(np.isfinite(u)) and np.all(u >= 0)
    assert np.all(u[bd] == 0.0)
    assert r.stats.final_relative_residual < 1e-12


def test_non_monotone_result_keeps_v_and_marks_u(coarse):
    r = coarse.solve(2.0**-7)
    assert not r.monotone
    assert r.v_min_interior < 0
    u = transform_u(r.v, r.alpha)
    assert np.isnan(u).sum() == np.sum(r.v <= 0)


def test_medium_grid_thresholds():
    cons = Problem(RunConfig(level=1))
    assert cons.solve(2.0**-6).monotone
    assert not cons.solve(2.0**-7).monotone
    lumped = Problem(RunConfig(level=1, lumping=True))
    assert lumped.solve(2.0**-8).monotone


def test_sweep_selection_prefix(coarse):
    sw = alpha_sweep(coarse.config, coarse)
    assert [r.k for r in sw.per_alpha] == [3, 4, 5, 6, 7, 8]
    assert [r.monotone for r in sw.per_alpha] == [True, True, True, False, False, False]
    assert sw.selected_result.alpha == 2.0**-5
    assert all(r.u is not None for r in sw.per_alpha)


def test_no_monotone_alpha_carries_results(coarse):
    cfg = RunConfig(level=0, sweep=(6, 7))
    with pytest.raises(NoMonotoneAlpha) as info:
        alpha_sweep(cfg, Problem(cfg))
    assert len(info.value.result.per_alpha) == 2
    assert info.value.result.selected is None


def test_cross_section_endpoints(coarse):
    r = coarse.solve(2.0**-4)
    t, u = cross_section(coarse.space, transform_u(r.v, r.alpha), 65)
    assert len(t) == 65 and np.all(np.diff(t) > 0)
    assert u[0] == pytest.approx(0.0, abs=1e-14)
    assert u[-1] == pytest.approx(0.0, abs=1e-14)
    assert np.all(u[1:-1] > 0)
    with pytest.raises(ValueError):
        cross_section(coarse.space, r.v, 1)


def test_scaling_consistency():
    # alpha^2 * (c^2 a_i^2) is unchanged when alpha is divided by c
    c = 2.0
    base = Problem(RunConfig(level=0, coeff=CoefficientField(1.0, 4.0)))
    scaled = Problem(RunConfig(level=0, coeff=CoefficientField(1.0, 4.0).scaled(c**2)))
    alpha = 2.0**-4
    r1 = base.solve(alpha)
    r2 = scaled.solve(alpha / c)
    assert np.allclose(r1.v, r2.v, rtol=1e-10, atol=1e-14)
    u1 = transform_u(r1.v, alpha)
    u2 = transform_u(r2.v, alpha / c)
    assert np.allclose(u2, u1 / c, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("degree", [1, 2])
def test_square_swap_symmetry(degree):
    cfg = RunConfig(domain=DomainSpec.rect(), nx=24, ny=24, degree=degree)
    pr = Problem(cfg)
    r = pr.solve(2.0**-4)
    u = transform_u(r.v, r.alpha)
    xy = pr.space.dof_coords
    key = {tuple(np.round(p * 48 * degree).astype(int)): i for i, p in enumerate(xy)}
    swapped = np.array([key[(k[1], k[0])] for k in map(tuple, np.round(xy * 48 * degree).astype(int))])
    assert np.allclose(u, u[swapped], rtol=1e-10, atol=1e-12)


def test_cg_solver_option_agrees_with_direct():
    direct = Problem(RunConfig(level=0, coeff=CoefficientField(1.0, 10.0)))
    cg = Problem(RunConfig(level=0, coeff=CoefficientField(1.0, 10.0), solver="cg", tol=1e-12))
    a = 2.0**-3
    r1, r2 = direct.solve(a), cg.solve(a)
    assert np.linalg.norm(r1.v - r2.v) <= 1e-8 * np.linalg.norm(r1.v)
    assert r2.stats.iterations > 0


def test_fixed_alpha_solve_v():
    cfg = RunConfig(level=0, alpha=0.1)
    r = solve_v(cfg, cfg.alpha)
    assert r.u is None and r.monotone
    assert cfg.alphas == [0.1]


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(sweep=(5, 3))
    with pytest.raises(ValueError):
        RunConfig(alpha=-1.0)
    with pytest.raises(ValueError):
        RunConfig(solver="lu")
