"""Anisotropic distance along the diagonal of the L.

A larger a2sq makes travel in y cheaper, so the distance ridge along the
line (t, t) moves toward the far corner.
"""
# %%
import numpy as np

from eikonal_fem import BoundaryPolygon, CoefficientField, DomainSpec, RunConfig, exact_u
from eikonal_fem.driver import Problem, cross_section, transform_u

poly = BoundaryPolygon.from_domain(DomainSpec())
alpha = 2.0**-6
for a2sq in (1.0, 4.0, 10.0):
    problem = Problem(RunConfig(level=1, degree=2, coeff=CoefficientField(1.0, a2sq)))
    r = problem.solve(alpha)
    t, u = cross_section(problem.space, transform_u(r.v, alpha), 257)
    ref = exact_u(np.stack([t, t], axis=1), poly, 1.0, a2sq)
    print(f"a2sq={a2sq:g}: peak at t={t[np.nanargmax(u)]:.3f} (exact {t[np.argmax(ref)]:.3f}), "
          f"max |u - d| on the line = {np.nanmax(np.abs(u - ref)):.4f}")
