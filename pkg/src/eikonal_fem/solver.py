"""Preconditioned conjugate gradients for the SPD systems produced by assembly."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SolverConfig", "SolveStats", "NoConvergence", "NotPositiveDefinite", "solve_spd"]


class NoConvergence(RuntimeError):
    def __init__(self, iterations, residual):
        super().__init__(f"CG did not converge in {iterations} iterations (relative residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


class NotPositiveDefinite(ArithmeticError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-10
    max_iters: int | None = None  # None means 10 * n
    preconditioner: str = "jacobi"  # or "none"

    def __post_init__(self):
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.preconditioner not in ("jacobi", "none"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")


@dataclass(frozen=True)
class SolveStats:
    iterations: int
    final_relative_residual: float


def solve_spd(A, b, cfg=None, x0=None):
    """Solve ``A x = b`` for symmetric positive definite ``A``.

    Stops once ``||b - A x|| <= rel_tol * ||b||``, checked on the true
    residual.  Raises :class:`NotPositiveDefinite` on a non-positive
    curvature ``p^T A p`` and :class:`NoConvergence` when the iteration
    budget runs out.
    """
    cfg = cfg or SolverConfig()
    b = np.asarray(b, dtype=float)
    n = len(b)
    if A.shape != (n, n):
        raise ValueError(f"matrix shape {A.shape} does not match rhs length {n}")
    max_iters = cfg.max_iters if cfg.max_iters is not None else 10 * max(n, 1)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), SolveStats(0, 0.0)

    if cfg.preconditioner == "jacobi":
        d = np.asarray(A.diagonal(), dtype=float)
        if np.any(d <= 0):
            raise NotPositiveDefinite("non-positive diagonal entry")
        dinv = 1.0 / d
    else:
        dinv = None

    r = b - A @ x
    z = r * dinv if dinv is not None else r.copy()
    p = z.copy()
    rz = r @ z
    tol = cfg.rel_tol * bnorm
    res = np.linalg.norm(r)
    it = 0
    while res > tol:
        if it >= max_iters:
            raise NoConvergence(it, res / bnorm)
        Ap = A @ p
        pAp = p @ Ap
        if not pAp > 0:
            raise NotPositiveDefinite(f"p^T A p = {pAp:.3e} at iteration {it}")
        step = rz / pAp
        x += step * p
        r -= step * Ap
        it += 1
        res = np.linalg.norm(r)
        if res <= tol:
            # guard against drift of the recursive residual
            r = b - A @ x
            res = np.linalg.norm(r)
            if res <= tol:
                break
        z = r * dinv if dinv is not None else r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, SolveStats(it, res / bnorm)
