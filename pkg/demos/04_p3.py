"""Cubic elements on the medium grid.

P3 stays monotone one halving further than P1. At large alpha the error is
dominated by the regularization and both degrees look alike. Once alpha is
small, P3 is clearly more accurate.
"""
# %%
from eikonal_fem import BoundaryPolygon, DomainSpec, RunConfig, alpha_sweep, error_norms
from eikonal_fem.driver import Problem

poly = BoundaryPolygon.from_domain(DomainSpec())
for degree in (1, 3):
    cfg = RunConfig(level=1, degree=degree)
    problem = Problem(cfg)
    sweep = alpha_sweep(cfg, problem)
    print(f"P{degree}: {problem.space.n_dofs} dofs, selected alpha = 2^-{sweep.selected_result.k}")
    for r in sweep.per_alpha:
        if r.monotone:
            print(f"   k={r.k}: l_inf={error_norms(problem.space, r.u, poly).l_inf:.5f}")
