"""Build and run structural, dispersion and lattice analyses from a :class:`RunConfig`."""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .assembly import apply_bcs, assemble_system
from .config import RunConfig
from .dispersion import MediumParams, sweep as dispersion_sweep
from .elements import (
    BeamSection,
    PlateSection,
    Quadrature,
    beam_b_matrices,
    beam_constitutive,
    gradient_energy_ratio,
    plate_constitutive,
    plate_kinematic_rows,
)
from .fracops import FractionalParams
from .lattice import LatticeSpec, SmoothField, continualization_error
from .mesh import build_uniform_1d, build_uniform_2d
from .output import DISPERSION_COLUMNS, LATTICE_COLUMNS, SWEEP_COLUMNS, Table
from .solvers import ModalResult, StaticResult, modal_solve, static_solve

__all__ = ["StructuralCase", "build_system", "solve_case", "run_structural", "run_sweep", "run_dispersion", "run_lattice_check", "run"]


@dataclass(frozen=True)
class StructuralCase:
    """Everything needed to solve one structural problem (picklable)."""

    structure: str
    mode: str
    geometry: dict
    material: dict
    load: dict
    bc: str
    mesh: dict
    n_modes: int = 1

    @classmethod
    def from_config(cls, cfg: RunConfig, mode: str | None = None) -> "StructuralCase":
        if mode is None:
            mode = cfg.sweep["mode"] if cfg.analysis == "sweep" else cfg.analysis.split("-")[1]
        return cls(cfg.structure, mode, cfg.geometry, cfg.material, cfg.load, cfg.bc, cfg.mesh, cfg.output["n_modes"])

    @property
    def grid_label(self) -> str:
        if self.structure == "beam":
            return str(self.mesh["n_elem"])
        return f"{self.mesh['nx']}x{self.mesh['ny']}"

    def section(self, l_star: float):
        g, m = self.geometry, self.material
        if self.structure == "beam":
            return BeamSection(g["L"], g["b"], g["h"], m["E"], m["nu"], m["rho"], m["Ks"], l_star)
        return PlateSection(g["L"], g["B"], g["h"], m["E"], m["nu"], m["rho"], m["Ks"], l_star)


def build_system(case: StructuralCase, params: FractionalParams):
    """Assemble one case and apply its boundary conditions."""
    sec = case.section(params.l_star)
    quad = Quadrature(case.mesh["quad_full"], case.mesh["quad_shear"])
    if case.structure == "beam":
        mesh = build_uniform_1d(sec.L, case.mesh["n_elem"])
        kin = beam_b_matrices(mesh, sec, params, quad)
        S = beam_constitutive(sec)
    else:
        mesh = build_uniform_2d(sec.L, sec.B, case.mesh["nx"], case.mesh["ny"])
        kin = plate_kinematic_rows(mesh, sec, params, quad)
        S = plate_constitutive(sec)
    loads = case.load if case.mode == "static" else {}
    return apply_bcs(assemble_system(mesh, kin, S, sec, loads), case.bc)


def solve_case(case: StructuralCase, params: FractionalParams):
    """Assemble and solve one case; returns a static or modal result."""
    system = build_system(case, params)
    if case.mode == "static":
        return static_solve(system)
    return modal_solve(system, case.n_modes)


def _rows(case: StructuralCase, params: FractionalParams, result, baseline, runtime: float) -> list[dict]:
    common = {
        "alpha1": float(params.alpha1),
        "alpha2": float(params.alpha2),
        "lf": params.l_f,
        "lstar": params.l_star,
        "n_elem_or_grid": case.grid_label,
        "runtime_s": runtime,
    }
    if isinstance(result, StaticResult):
        return [{**common, "quantity": "w_max", "value": result.w_max, "baseline": baseline.w_max,
                 "ratio": result.w_max / baseline.w_max}]
    rows = []
    for k, (f, fb) in enumerate(zip(result.f0, baseline.f0)):
        name = "f0" if k == 0 else f"f{k}"
        rows.append({**common, "quantity": name, "value": float(f), "baseline": float(fb), "ratio": float(f / fb)})
    return rows


def _timed(case: StructuralCase, params: FractionalParams):
    t0 = time.perf_counter()
    res = solve_case(case, params)
    return res, time.perf_counter() - t0


def _metadata(cfg: RunConfig, case: StructuralCase) -> dict:
    return {
        "config": cfg.echo(),
        "eta_xxx_ratio_estimate": gradient_energy_ratio(case.geometry["h"], case.geometry["L"]),
    }


def run_structural(cfg: RunConfig) -> Table:
    """Single beam/plate run with its classical baseline on the same mesh."""
    case = StructuralCase.from_config(cfg)
    params = cfg.fractional
    result, dt = _timed(case, params)
    baseline = result if params.is_classical else solve_case(case, FractionalParams.classical())
    runtime = dt if cfg.output["timing"] else 0.0
    table = Table(SWEEP_COLUMNS, _rows(case, params, result, baseline, runtime), _metadata(cfg, case))
    if isinstance(result, StaticResult):
        table.metadata["static_residual"] = result.residual
        table.metadata["w_max_location"] = result.w_max_location.tolist()
    return table


def _sweep_worker(args):
    case, p = args
    return _timed(case, FractionalParams(*p))


def run_sweep(cfg: RunConfig, threads: int = 1) -> Table:
    """Cartesian grid over ``(alpha1, alpha2, l_f, l_star)``, rows in grid order."""
    case = StructuralCase.from_config(cfg)
    sw = cfg.sweep
    grid = list(itertools.product(sw["alpha1"], sw["alpha2"], sw["l_f"], sw["l_star"]))
    baseline = solve_case(case, FractionalParams.classical())
    jobs = [(case, p) for p in grid]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_sweep_worker, jobs))
    else:
        outcomes = [_sweep_worker(j) for j in jobs]
    rows = []
    for p, (res, dt) in zip(grid, outcomes):
        rows += _rows(case, FractionalParams(*p), res, baseline, dt if cfg.output["timing"] else 0.0)
    return Table(SWEEP_COLUMNS, rows, _metadata(cfg, case))


def run_dispersion(cfg: RunConfig) -> Table:
    d = cfg.dispersion
    medium = MediumParams(d["E"], d["rho"], d["alpha1"], d["alpha2"], d["l_star"], d["rho_prime"])
    pts = dispersion_sweep(d["kmin"], d["kmax"], d["n"], medium, bool(d["inertia_gradient"]))
    rows = [
        {"k": p.k, "ReZ": p.re, "ImZ": p.im, "b_bar": p.b_bar, "phi": p.phi, "stable": p.stable, "causal": p.causal}
        for p in pts
    ]
    return Table(DISPERSION_COLUMNS, rows, {"config": cfg.echo()})


def run_lattice_check(cfg: RunConfig) -> Table:
    c = cfg.lattice
    spec = LatticeSpec(c["n"], c["l_star"], c["E"], c["A"], c["alpha1"], c["alpha2"], c["horizon_particles"])
    field = SmoothField.sine(c["amplitude"], c["wavenumber"])
    refinements = [c["l_star"] / 2**k for k in range(c["halvings"] + 1)]
    table = continualization_error(field, spec, refinements)
    rows = [dict(vars(r)) for r in table]
    errors = np.array([r.error for r in table])
    meta = {"config": cfg.echo(), "monotone": bool(np.all(np.diff(errors) < 0))}
    return Table(LATTICE_COLUMNS, rows, meta)


def run(cfg: RunConfig, threads: int = 1) -> Table:
    if cfg.analysis == "sweep":
        return run_sweep(cfg, threads)
    if cfg.analysis == "dispersion":
        return run_dispersion(cfg)
    if cfg.analysis == "lattice-check":
        return run_lattice_check(cfg)
    return run_structural(cfg)
