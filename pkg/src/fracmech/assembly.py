"""Global stiffness, mass and load assembly; essential boundary conditions.

Degrees of freedom are field-blocked: ``dof = field * n_nodes + node``.
Because every kinematic row is a tensor product of per-direction factors
and the Gauss rules are tensor products too, each stiffness block is a sum
of Kronecker products of small 1D integrals ``A.T @ diag(w) @ C``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Union

import numpy as np
import scipy.sparse as sp

from .elements import (
    BEAM_FIELDS,
    PLATE_FIELDS,
    BeamSection,
    Kinematics,
    PlateSection,
    interpolation_matrix,
)
from .mesh import Mesh1D, Mesh2D

__all__ = [
    "GlobalSystem",
    "ReducedSystem",
    "BC_CASES",
    "assemble_stiffness",
    "assemble_mass",
    "assemble_force",
    "assemble_system",
    "constrained_dofs",
    "apply_bcs",
]

BC_CASES = ("CC", "SS", "CCCC", "SSSS")

Load = Union[float, Callable[..., np.ndarray]]


@dataclass(frozen=True, eq=False)
class GlobalSystem:
    """Unconstrained system ``K U = F`` with mass ``M``.

    ``blocks`` partitions the DOFs into groups that ``K`` and ``M`` never
    couple (membrane versus bending), so solvers may treat them apart.
    """

    K: np.ndarray
    M: sp.csr_matrix
    F: np.ndarray
    mesh: Union[Mesh1D, Mesh2D]
    fields: tuple[str, ...]
    bc_mask: np.ndarray = None
    blocks: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        n = self.n_dof
        if self.K.shape != (n, n) or self.M.shape != (n, n) or self.F.shape != (n,):
            raise ValueError("K, M and F dimensions disagree with the mesh")
        if self.bc_mask is None:
            object.__setattr__(self, "bc_mask", np.zeros(n, dtype=bool))
        if not self.blocks:
            object.__setattr__(self, "blocks", (np.arange(n),))

    @property
    def n_nodes(self) -> int:
        return self.mesh.n_nodes

    @property
    def n_dof(self) -> int:
        return self.n_nodes * len(self.fields)

    def dof(self, node, field_name: str):
        """Global index of ``field_name`` at ``node`` (the dof map)."""
        return self.fields.index(field_name) * self.n_nodes + np.asarray(node)

    def field_values(self, U, field_name: str) -> np.ndarray:
        k = self.fields.index(field_name)
        return np.asarray(U)[k * self.n_nodes:(k + 1) * self.n_nodes]


@dataclass(frozen=True, eq=False)
class ReducedSystem:
    """System restricted to the free DOFs."""

    K: np.ndarray
    M: sp.csr_matrix
    F: np.ndarray
    free: np.ndarray
    blocks: tuple[np.ndarray, ...]
    parent: GlobalSystem = field(repr=False)

    @property
    def n_dof(self) -> int:
        return len(self.free)

    def expand(self, U_free) -> np.ndarray:
        U = np.zeros(self.parent.n_dof)
        U[self.free] = U_free
        return U


def _split_blocks(fields: tuple[str, ...], n_nodes: int) -> tuple[np.ndarray, ...]:
    groups = ((0,), (1, 2)) if fields == BEAM_FIELDS else ((0, 1), (2, 3, 4))
    return tuple(
        np.concatenate([np.arange(k * n_nodes, (k + 1) * n_nodes) for k in g]) for g in groups
    )


def _line_integral(A, w, C):
    return A.T @ (w[:, None] * C)


def assemble_stiffness(kin: Kinematics, S: np.ndarray) -> np.ndarray:
    """``K = sum_g w_g B_g^T S B_g`` over all Gauss points, as a dense array.

    ``S`` must not couple rows living on different quadrature groups.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (kin.n_rows, kin.n_rows):
        raise ValueError(f"constitutive matrix must be {kin.n_rows}x{kin.n_rows}, got {S.shape}")
    if not np.allclose(S, S.T, rtol=1e-14, atol=0.0):
        raise ValueError("constitutive matrix must be symmetric")
    for i, g in enumerate(kin.groups):
        for h in kin.groups[i + 1:]:
            if np.any(S[np.ix_(g.rows, h.rows)]):
                raise ValueError(f"constitutive matrix couples groups {g.name!r} and {h.name!r}")
    nf, nn = len(kin.fields), kin.n_nodes
    blocks: dict[tuple[int, int], np.ndarray] = {}
    for g in kin.groups:
        Sg = S[np.ix_(g.rows, g.rows)]
        for r, terms_r in enumerate(g.terms):
            for s, terms_s in enumerate(g.terms):
                c = Sg[r, s]
                if c == 0.0:
                    continue
                for t in terms_r:
                    for u in terms_s:
                        if t.field > u.field:
                            continue  # lower blocks mirrored at the end
                        mat = c * t.coeff * u.coeff
                        piece = None
                        for A, C, w in zip(t.factors, u.factors, g.weights):
                            f = _line_integral(A, w, C)
                            piece = f if piece is None else np.kron(piece, f)
                        piece *= mat
                        key = (t.field, u.field)
                        if key in blocks:
                            blocks[key] += piece
                        else:
                            blocks[key] = piece
    K = np.zeros((nf * nn, nf * nn))
    for (a, b), blk in blocks.items():
        sa, sb = slice(a * nn, (a + 1) * nn), slice(b * nn, (b + 1) * nn)
        if a == b:
            K[sa, sa] = 0.5 * (blk + blk.T)
        else:
            K[sa, sb] += blk
            K[sb, sa] += blk.T
    return K


def _mass_weights(section) -> list[float]:
    if isinstance(section, BeamSection):
        I0, I2 = section.rho * section.A, section.rho * section.I
        return [I0, I0, I2]
    I0, I2 = section.rho * section.h, section.rho * section.h**3 / 12.0
    return [I0, I0, I0, I2, I2]


def _line_mass(line: Mesh1D, npts: int = 3) -> np.ndarray:
    x, w, e = line.gauss_points(npts)
    L = interpolation_matrix(line, x, e)
    m = _line_integral(L, w, L)
    return 0.5 * (m + m.T)


def assemble_mass(mesh, section) -> sp.csr_matrix:
    """Consistent mass with inertias ``(I0, I0, I2)`` (beam) or
    ``(I0, I0, I0, I2, I2)`` (plate)."""
    if isinstance(mesh, Mesh1D):
        base = sp.csr_matrix(_line_mass(mesh))
    else:
        base = sp.kron(_line_mass(mesh.line_x), _line_mass(mesh.line_y), format="csr")
    base.eliminate_zeros()
    return sp.kron(sp.diags(_mass_weights(section)), base, format="csr")


def _load_on_line(line: Mesh1D, q: Load, npts: int = 3) -> np.ndarray:
    x, w, e = line.gauss_points(npts)
    L = interpolation_matrix(line, x, e)
    vals = q(x) if callable(q) else np.full(len(x), float(q))
    return L.T @ (w * np.asarray(vals, dtype=float))


def _load_on_plate(mesh: Mesh2D, q: Load, npts: int = 3) -> np.ndarray:
    xs, wx, ex = mesh.line_x.gauss_points(npts)
    ys, wy, ey = mesh.line_y.gauss_points(npts)
    Lx = interpolation_matrix(mesh.line_x, xs, ex)
    Ly = interpolation_matrix(mesh.line_y, ys, ey)
    if callable(q):
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        vals = np.asarray(q(X, Y), dtype=float) * np.ones_like(X)
    else:
        vals = np.full((len(xs), len(ys)), float(q))
    return (Lx.T @ (wx[:, None] * vals * wy[None, :]) @ Ly).ravel()


_BEAM_LOADS = {"Fx": "u0", "Fz": "w0", "Mtheta": "theta0"}
_PLATE_LOADS = {"Fx": "u0", "Fy": "v0", "Fz": "w0", "Mtheta_x": "theta_x", "Mtheta_y": "theta_y"}


def assemble_force(mesh, loads: Mapping[str, Load], npts: int = 3) -> np.ndarray:
    """Consistent load vector for distributed loads.

    Beam keys: ``Fx``, ``Fz`` (N/m) and ``Mtheta`` (N m/m), each a constant
    or a callable of ``x``.  Plate keys: ``Fx``, ``Fy``, ``Fz`` (Pa) and
    ``Mtheta_x``, ``Mtheta_y``, constants or callables of ``(x, y)``.
    ``npts`` Gauss points per element direction integrate the load; raise
    it for loads that are not polynomial over an element.
    """
    beam = isinstance(mesh, Mesh1D)
    names = _BEAM_LOADS if beam else _PLATE_LOADS
    fields = BEAM_FIELDS if beam else PLATE_FIELDS
    nn = mesh.n_nodes
    F = np.zeros(len(fields) * nn)
    for key, q in loads.items():
        if key not in names:
            raise KeyError(f"unknown load {key!r}; expected one of {sorted(names)}")
        k = fields.index(names[key])
        F[k * nn:(k + 1) * nn] += _load_on_line(mesh, q, npts) if beam else _load_on_plate(mesh, q, npts)
    return F


def assemble_system(mesh, kin: Kinematics, S: np.ndarray, section, loads=None) -> GlobalSystem:
    K = assemble_stiffness(kin, S)
    M = assemble_mass(mesh, section)
    F = assemble_force(mesh, loads or {})
    fields = kin.fields
    return GlobalSystem(K, M, F, mesh, fields, blocks=_split_blocks(fields, mesh.n_nodes))


def constrained_dofs(system: GlobalSystem, bc_case: str) -> np.ndarray:
    """Sorted global indices fixed by ``bc_case``."""
    mesh = system.mesh
    d = system.dof
    if bc_case in ("CC", "SS"):
        if not isinstance(mesh, Mesh1D):
            raise ValueError(f"{bc_case} applies to beams")
        ends = np.array([0, mesh.n_nodes - 1])
        names = BEAM_FIELDS if bc_case == "CC" else ("u0", "w0")
        fixed = [d(ends, f) for f in names]
    elif bc_case in ("CCCC", "SSSS"):
        if not isinstance(mesh, Mesh2D):
            raise ValueError(f"{bc_case} applies to plates")
        b = mesh.boundary
        edges = np.unique(np.concatenate(list(b.values())))
        if bc_case == "CCCC":
            fixed = [d(edges, f) for f in PLATE_FIELDS]
        else:
            # hard simple support: the rotation about the edge normal is held
            x_edges = np.concatenate([b["x0"], b["x1"]])
            y_edges = np.concatenate([b["y0"], b["y1"]])
            fixed = [d(edges, f) for f in ("u0", "v0", "w0")]
            fixed += [d(x_edges, "theta_y"), d(y_edges, "theta_x")]
    else:
        raise ValueError(f"unknown boundary condition {bc_case!r}; expected one of {BC_CASES}")
    return np.unique(np.concatenate(fixed))


def apply_bcs(system: GlobalSystem, bc_case: str) -> ReducedSystem:
    fixed = constrained_dofs(system, bc_case)
    mask = np.zeros(system.n_dof, dtype=bool)
    mask[fixed] = True
    system = replace(system, bc_mask=mask)
    free = np.flatnonzero(~mask)
    position = np.full(system.n_dof, -1)
    position[free] = np.arange(len(free))
    blocks = tuple(position[b[~mask[b]]] for b in system.blocks)
    K = system.K[np.ix_(free, free)]
    M = system.M[free][:, free].tocsr()
    return ReducedSystem(K, M, system.F[free], free, blocks, system)
