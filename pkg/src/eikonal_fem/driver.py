"""End-to-end pipeline: solve for v, check the discrete maximum principle,
recover u = -alpha ln v and run the alpha-halving sweep."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse.linalg as spla

from .fem import CoefficientField, assemble_matrices, build_space, evaluate_field, reduce_system
from .mesh import DomainSpec, build_lshape, build_rect
from .solver import SolverConfig, SolveStats, solve_spd

__all__ = [
    "NoMonotoneAlpha",
    "RunConfig",
    "SolveResult",
    "SweepResult",
    "Problem",
    "check_monotone",
    "transform_u",
    "solve_v",
    "alpha_sweep",
    "cross_section",
]

log = logging.getLogger(__name__)


class NoMonotoneAlpha(RuntimeError):
    """Raised by :func:`alpha_sweep`; ``result`` still holds every solved alpha."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to set up and solve one problem.

    ``alpha`` selects a fixed-alpha run; otherwise ``sweep = (k_min, k_max)``
    runs alpha = 2**-k for k = k_min..k_max.  ``nx``/``ny`` are only used by
    rectangular domains; the L-shape grid is set by ``level``.

    ``solver`` is ``"direct"`` (sparse LU) or ``"cg"``.  CG controls the
    residual only in norm, so interior values of v far below ``tol`` are noise
    and the sign test in :func:`check_monotone` cannot be trusted there.
    """

    domain: DomainSpec = field(default_factory=DomainSpec)
    level: int = 1
    nx: int = 64
    ny: int = 64
    degree: int = 1
    lumping: bool = False
    coeff: CoefficientField = field(default_factory=CoefficientField)
    alpha: float | None = None
    sweep: tuple = (3, 8)
    monotone_eps: float = 0.0
    solver: str = "direct"
    tol: float = 1e-10
    diagonal: str = "up"

    def __post_init__(self):
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError("alpha must be positive")
        k_min, k_max = self.sweep
        if k_min > k_max:
            raise ValueError("sweep needs k_min <= k_max")
        if self.solver not in ("direct", "cg"):
            raise ValueError(f"unknown solver {self.solver!r}")

    def build_mesh(self):
        if self.domain.shape == "lshape":
            return build_lshape(self.level, self.diagonal)
        return build_rect(self.nx, self.ny, self.domain, self.diagonal)

    @property
    def alphas(self):
        if self.alpha is not None:
            return [self.alpha]
        k_min, k_max = self.sweep
        return [2.0**-k for k in range(k_min, k_max + 1)]


@dataclass
class SolveResult:
    alpha: float
    v: np.ndarray
    monotone: bool
    v_min_interior: float
    v_max_interior: float
    stats: SolveStats
    u: np.ndarray | None = None  # NaN marks undefined entries

    @property
    def k(self):
        k = -np.log2(self.alpha)
        return int(round(k)) if np.isclose(k, round(k)) else None


@dataclass
class SweepResult:
    per_alpha: list
    selected: int | None

    @property
    def selected_result(self):
        return None if self.selected is None else self.per_alpha[self.selected]


def check_monotone(v, interior_dofs, eps=0.0):
    """Discrete maximum principle eps < v < 1 on the interior DOFs.

    >>> check_monotone([1.0, 0.5, 0.5, 1.0], [1, 2])
    (True, 0.5, 0.5)
    """
    vi = np.asarray(v, dtype=float)[np.asarray(interior_dofs, dtype=np.int64)]
    if vi.size == 0:
        return True, np.nan, np.nan
    lo, hi = float(vi.min()), float(vi.max())
    return bool(lo > eps and hi < 1.0), lo, hi


def transform_u(v, alpha):
    """u = -alpha ln v where v > 0, NaN elsewhere (never clamped)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    v = np.asarray(v, dtype=float)
    u = np.full(v.shape, np.nan)
    pos = v > 0
    u[pos] = -alpha * np.log(v[pos])
    return u


class Problem:
    """Mesh, space and alpha-independent matrices for one configuration.

    ``alpha^2 K + M`` is formed per alpha, so sweeps assemble only once.
    """

    def __init__(self, config):
        self.config = config
        self.mesh = config.build_mesh()
        self.space = build_space(self.mesh, config.degree)

    @cached_property
    def matrices(self):
        t = time.perf_counter()
        K, M = assemble_matrices(self.space, self.config.coeff, self.config.lumping)
        log.debug("assembled %d dofs in %.2fs", self.space.n_dofs, time.perf_counter() - t)
        return K, M

    def solve(self, alpha):
        cfg = self.config
        K, M = self.matrices
        system = reduce_system(self.space, K, M, alpha, cfg.lumping)
        A, b = system.matrix, system.rhs
        if cfg.solver == "direct":
            x = spla.splu(A.tocsc()).solve(b) if len(b) else np.zeros(0)
            bnorm = np.linalg.norm(b)
            res = np.linalg.norm(b - A @ x) / bnorm if bnorm else 0.0
            stats = SolveStats(0, float(res))
        else:
            x, stats = solve_spd(A, b, SolverConfig(rel_tol=cfg.tol))
        v = system.expand(x)
        ok, lo, hi = check_monotone(v, system.interior, cfg.monotone_eps)
        log.info("alpha=%g monotone=%s v_min=%.3e v_max=%.6f", alpha, ok, lo, hi)
        return SolveResult(alpha, v, ok, lo, hi, stats)


def solve_v(config, alpha, problem=None):
    """Solve the auxiliary diffusion-reaction problem for one alpha (u left unset)."""
    problem = problem or Problem(config)
    return problem.solve(alpha)


def alpha_sweep(config, problem=None):
    """Halve alpha from 2**-k_min to 2**-k_max and keep the last monotone result.

    All alphas are solved for reporting; the selection stops at the first
    non-monotone one.  ``u`` is filled in for every result (undefined where
    v <= 0).
    """
    problem = problem or Problem(config)
    results, selected = [], None
    in_prefix = True
    for n, alpha in enumerate(config.alphas):
        res = problem.solve(alpha)
        res.u = transform_u(res.v, alpha)
        results.append(res)
        in_prefix = in_prefix and res.monotone
        if in_prefix:
            selected = n
    if selected is None:
        raise NoMonotoneAlpha(
            f"alpha = {config.alphas[0]:g} already violates the maximum principle",
            SweepResult(results, None),
        )
    return SweepResult(results, selected)


def cross_section(space, u, n_samples=257, end=(1.0, 1.0)):
    """Samples of ``u`` along the segment from (0, 0) to ``end`` (the diagonal by default).

    Returns ``(t, values)`` with ``t`` the fraction along the segment; samples in
    triangles touching an undefined DOF are NaN.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    t = np.linspace(0.0, 1.0, n_samples)
    pts = t[:, None] * np.asarray(end, dtype=float)[None, :]
    with np.errstate(invalid="ignore"):
        vals = evaluate_field(space, u, pts)
    return t, vals
