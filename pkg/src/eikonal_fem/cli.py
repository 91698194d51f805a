"""Command line front end: parse flags, run the driver, write CSV/VTK/JSON."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

import numpy as np

from .driver import NoMonotoneAlpha, Problem, RunConfig, SweepResult, alpha_sweep, cross_section, transform_u
from .fem import SUPPORTED_DEGREES, CoefficientField
from .mesh import SIDES, DomainSpec, write_vtk
from .oracle import BoundaryPolygon, error_norms

__all__ = ["UsageError", "CliConfig", "parse_args", "run", "main", "summary"]

EMIT_KINDS = ("csv", "vtk", "json")
SCHEMA_VERSION = 1


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class CliConfig:
    run: RunConfig
    output_prefix: str = "eikonal"
    emit: frozenset = frozenset({"json"})
    samples: int = 257


def _parser():
    p = _Parser(prog="eikonal-fem", description="Anisotropic eikonal solver via the exponential transform.")
    p.add_argument("--domain", choices=("lshape", "rect"), default="lshape")
    p.add_argument("--rect-size", nargs=2, type=float, metavar=("W", "H"), default=(1.0, 1.0))
    p.add_argument("--nx", type=int, default=64)
    p.add_argument("--ny", type=int, default=None)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--lumping", action="store_true")
    p.add_argument("--a1sq", type=float, default=1.0)
    p.add_argument("--a2sq", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--sweep", nargs=2, type=int, metavar=("KMIN", "KMAX"), default=None)
    p.add_argument("--samples", type=int, default=257)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--solver", choices=("direct", "cg"), default="direct")
    p.add_argument("--monotone-eps", type=float, default=0.0)
    p.add_argument("--diagonal", choices=("up", "down"), default="up")
    p.add_argument("--emit", default="json", help="comma list of csv,vtk,json")
    p.add_argument("--output", default="eikonal", help="output path prefix")
    p.add_argument("--neumann", default="", help="rect only: comma list of left,right,top,bottom")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _split(value):
    return [s.strip() for s in value.split(",") if s.strip()]


def parse_args(argv=None):
    """Validated :class:`CliConfig` from command line flags; raises :class:`UsageError`."""
    ns = _parser().parse_args(argv)
    if ns.alpha is not None and ns.sweep is not None:
        raise UsageError("--alpha conflicts with --sweep; give one of them")
    if ns.degree not in SUPPORTED_DEGREES:
        raise UsageError(f"--degree: UnsupportedDegree {ns.degree} (supported: 1, 2, 3)")
    if ns.lumping and ns.degree != 1:
        raise UsageError("--lumping: LumpingUnsupported for --degree > 1")
    if ns.alpha is not None and not ns.alpha > 0:
        raise UsageError("--alpha must be positive")
    if not (ns.a1sq > 0 and ns.a2sq > 0):
        raise UsageError("--a1sq/--a2sq must be positive")
    if ns.samples < 2:
        raise UsageError("--samples must be at least 2")
    if not 0 < ns.tol < 1:
        raise UsageError("--tol must lie in (0, 1)")
    emit = _split(ns.emit)
    if not emit:
        raise UsageError("--emit: nothing to emit")
    bad = set(emit) - set(EMIT_KINDS)
    if bad:
        raise UsageError(f"--emit: unknown kinds {sorted(bad)}")
    neumann = _split(ns.neumann)
    if neumann and ns.domain != "rect":
        raise UsageError("--neumann is only allowed with --domain rect")
    if set(neumann) - set(SIDES):
        raise UsageError(f"--neumann: sides must be among {', '.join(SIDES)}")
    sweep = tuple(ns.sweep) if ns.sweep is not None else (3, 8)
    if sweep[0] > sweep[1]:
        raise UsageError("--sweep: KMIN must not exceed KMAX")

    try:
        if ns.domain == "rect":
            w, h = ns.rect_size
            domain = DomainSpec.rect(w, h, neumann)
            nx = ns.nx
            ny = ns.ny if ns.ny is not None else max(1, round(nx * h / w))
        else:
            domain = DomainSpec("lshape")
            nx, ny = ns.nx, ns.ny or ns.nx
        if nx < 1 or ny < 1:
            raise ValueError("--nx/--ny must be at least 1")
        if ns.level < 0:
            raise ValueError("--level must be non-negative")
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    run_cfg = RunConfig(
        domain=domain,
        level=ns.level,
        nx=nx,
        ny=ny,
        degree=ns.degree,
        lumping=ns.lumping,
        coeff=CoefficientField(ns.a1sq, ns.a2sq),
        alpha=ns.alpha,
        sweep=sweep,
        monotone_eps=ns.monotone_eps,
        solver=ns.solver,
        tol=ns.tol,
        diagonal=ns.diagonal,
    )
    if ns.verbose:
        logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    return CliConfig(run_cfg, ns.output, frozenset(emit), ns.samples)


def _num(x):
    """12 significant digits; NaN and infinities become None."""
    if x is None or not np.isfinite(x):
        return None
    return float(f"{x:.12g}")


def _oracle_applies(cfg):
    return cfg.coeff.is_constant and all(m.value == "dirichlet" for m in cfg.domain.markers.values())


def _tag(res):
    return f"k{res.k}" if res.k is not None else f"alpha{res.alpha:.6g}"


def _section_end(domain):
    if domain.shape == "lshape":
        return (1.0, 1.0)
    s = min(domain.width, domain.height)
    return (s, s)


def summary(config, problem, sweep):
    """JSON-ready dict describing every solved alpha."""
    cfg = config.run
    poly = BoundaryPolygon.from_domain(cfg.domain) if _oracle_applies(cfg) else None
    entries = []
    for res in sweep.per_alpha:
        l_inf = l2 = None
        if poly is not None and res.monotone and np.all(np.isfinite(res.u)):
            rep = error_norms(problem.space, res.u, poly, cfg.coeff.a1sq, cfg.coeff.a2sq)
            l_inf, l2 = _num(rep.l_inf), _num(rep.l2)
        entries.append({
            "alpha": _num(res.alpha),
            "k": res.k,
            "monotone": res.monotone,
            "v_min": _num(res.v_min_interior),
            "v_max": _num(res.v_max_interior),
            "iterations": res.stats.iterations,
            "relative_residual": _num(res.stats.final_relative_residual),
            "l_inf": l_inf,
            "l2": l2,
        })
    sel = sweep.selected_result
    return {
        "schema": SCHEMA_VERSION,
        "config": {
            "domain": cfg.domain.shape,
            "level": cfg.level if cfg.domain.shape == "lshape" else None,
            "nx": cfg.nx if cfg.domain.shape == "rect" else None,
            "ny": cfg.ny if cfg.domain.shape == "rect" else None,
            "degree": cfg.degree,
            "lumping": cfg.lumping,
            "a1sq": _num(cfg.coeff.a1sq),
            "a2sq": _num(cfg.coeff.a2sq),
            "solver": cfg.solver,
            "diagonal": cfg.diagonal,
            "n_dofs": problem.space.n_dofs,
        },
        "selected_alpha": _num(sel.alpha) if sel else None,
        "selected_k": sel.k if sel else None,
        "results": entries,
    }


def _write_csv(path, t, u):
    with open(path, "w") as f:
        f.write("t,u\n")
        for ti, ui in zip(t, u):
            f.write(f"{ti:.12g},{ui:.12g}\n" if np.isfinite(ui) else f"{ti:.12g},nan\n")


def _write_outputs(config, problem, sweep):
    prefix = config.output_prefix
    mesh = problem.mesh
    nv = mesh.n_vertices
    for res in sweep.per_alpha:
        tag = _tag(res)
        if "csv" in config.emit:
            t, u = cross_section(problem.space, res.u, config.samples, _section_end(config.run.domain))
            _write_csv(f"{prefix}_{tag}.csv", t, u)
        if "vtk" in config.emit:
            u = res.u[:nv]
            defined = np.isfinite(u)
            write_vtk(
                f"{prefix}_{tag}.vtk",
                mesh,
                {"v": res.v[:nv], "u": np.where(defined, u, -1.0), "u_defined": defined.astype(np.int64)},
                title=f"eikonal alpha={res.alpha:.12g}",
            )
    if "json" in config.emit:
        with open(f"{prefix}.json", "w") as f:
            json.dump(summary(config, problem, sweep), f, indent=2, sort_keys=True)
            f.write("\n")


def run(config):
    """Execute a parsed configuration; returns the process exit code."""
    cfg = config.run
    try:
        problem = Problem(cfg)
        if cfg.alpha is not None:
            res = problem.solve(cfg.alpha)
            res.u = transform_u(res.v, cfg.alpha)
            sweep = SweepResult([res], 0 if res.monotone else None)
            code = 0
        else:
            try:
                sweep = alpha_sweep(cfg, problem)
                code = 0
            except NoMonotoneAlpha as exc:
                print(f"eikonal-fem: {exc}", file=sys.stderr)
                sweep = exc.result
                code = 2
        _write_outputs(config, problem, sweep)
    except Exception as exc:  # noqa: BLE001 - every failure maps to exit code 1
        print(f"eikonal-fem: error: {exc}", file=sys.stderr)
        return 1
    return code


def main(argv=None):
    try:
        config = parse_args(argv)
    except UsageError as exc:
        _parser().print_usage(sys.stderr)
        print(f"eikonal-fem: error: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
