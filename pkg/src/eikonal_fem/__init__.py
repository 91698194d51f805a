"""Finite-element solver for the anisotropic eikonal equation.

The distance-like solution u of sum_i a_i^2 (du/dx_i)^2 = 1, u = 0 on the
boundary, is recovered as u = -alpha ln v from the linear diffusion-reaction
problem alpha^2 div(A grad v) - v = 0, v = 1 on the boundary.
"""
from .driver import (
    NoMonotoneAlpha,
    Problem,
    RunConfig,
    SolveResult,
    SweepResult,
    alpha_sweep,
    check_monotone,
    cross_section,
    solve_v,
    transform_u,
)
from .fem import (
    CoefficientField,
    FeSpace,
    LumpingUnsupported,
    UnsupportedDegree,
    assemble,
    assemble_matrices,
    build_space,
    element_matrices,
    evaluate_field,
)
from .mesh import DomainSpec, Marker, Mesh, PointOutsideDomain, build_lshape, build_rect, locate_point, write_vtk
from .oracle import BoundaryPolygon, ErrorReport, UndefinedField, error_norms, exact_u
from .solver import NoConvergence, NotPositiveDefinite, SolverConfig, SolveStats, solve_spd

__version__ = "0.1.0"
