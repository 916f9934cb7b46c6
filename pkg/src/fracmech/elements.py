"""Beam and plate kinematics: shape functions, fractional B-rows, constitutive matrices.

Kinematic rows are stored in factored form.  Every row of a B-matrix is a
sum of :class:`Term` objects, each acting on one field through a tensor
product of per-direction matrices (a single factor for the beam, an x and a
y factor for the plate).  Tensor-product Gauss rules let the assembler form
stiffness blocks as Kronecker products of small 1D integrals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fracops import DegenerateHorizonError, FractionalParams, as_order, weighted_power_moments
from .mesh import Mesh1D, Mesh2D, HorizonMap, build_horizon_map

__all__ = [
    "BEAM_FIELDS",
    "PLATE_FIELDS",
    "BEAM_ROWS",
    "PLATE_ROWS",
    "BeamSection",
    "PlateSection",
    "Quadrature",
    "Term",
    "RowGroup",
    "Kinematics",
    "BRow",
    "shape_functions_1d",
    "interpolation_matrix",
    "local_derivative_matrix",
    "fractional_derivative_matrix",
    "fractional_b_row",
    "beam_b_matrices",
    "plate_kinematic_rows",
    "beam_constitutive",
    "plate_constitutive",
    "plane_stress_matrix",
    "gradient_energy_ratio",
]

BEAM_FIELDS = ("u0", "w0", "theta0")
PLATE_FIELDS = ("u0", "v0", "w0", "theta_x", "theta_y")

BEAM_ROWS = ("N_xx", "Q_xz", "M_xx", "Nbar_xxz", "Nbar_xzx")
PLATE_ROWS = (
    "N_xx", "N_yy", "N_xy",
    "M_xx", "M_yy", "M_xy",
    "Q_xz", "Q_yz",
    "Nbar_xxz", "Nbar_yyz", "Nbar_xyz",
    "Nbar_xzx", "Nbar_xzy", "Nbar_yzx", "Nbar_yzy",
)


@dataclass(frozen=True)
class BeamSection:
    L: float
    b: float
    h: float
    E: float
    nu: float
    rho: float
    Ks: float = 5.0 / 6.0
    l_star: float = 0.0

    def __post_init__(self):
        for name in ("L", "b", "h", "E", "rho"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.Ks <= 1:
            raise ValueError("shear correction factor must lie in (0, 1]")
        if self.l_star < 0:
            raise ValueError("l_star must be non-negative")

    @property
    def A(self) -> float:
        return self.b * self.h

    @property
    def I(self) -> float:
        return self.b * self.h**3 / 12.0

    @property
    def G(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))


@dataclass(frozen=True)
class PlateSection:
    L: float
    B: float
    h: float
    E: float
    nu: float
    rho: float
    Ks: float = 5.0 / 6.0
    l_star: float = 0.0

    def __post_init__(self):
        for name in ("L", "B", "h", "E", "rho"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.Ks <= 1:
            raise ValueError("shear correction factor must lie in (0, 1]")
        if self.l_star < 0:
            raise ValueError("l_star must be non-negative")

    @property
    def G(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def D(self) -> float:
        return self.E * self.h**3 / (12.0 * (1.0 - self.nu**2))


@dataclass(frozen=True)
class Quadrature:
    """Gauss points per element direction: ``full`` for axial, bending and
    gradient rows, ``shear`` for the transverse-shear rows (selective
    reduced integration by default)."""

    full: int = 3
    shear: int = 2


# ---------------------------------------------------------------- 1D pieces

# dN/dxi = C0 + C1 * xi for the nodes at xi = -1, 0, 1
_C0 = np.array([-0.5, 0.0, 0.5])
_C1 = np.array([1.0, -2.0, 1.0])


def shape_functions_1d(xi):
    """Quadratic Lagrange basis on ``[-1, 1]`` and its ``xi``-derivatives."""
    xi = np.asarray(xi, dtype=float)
    N = np.stack([0.5 * xi * (xi - 1.0), 1.0 - xi**2, 0.5 * xi * (xi + 1.0)], axis=-1)
    dN = _C0 + _C1 * xi[..., None]
    return N, dN


def interpolation_matrix(mesh: Mesh1D, points, elems=None) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    elems = mesh.element_of(pts) if elems is None else np.asarray(elems)
    N, _ = shape_functions_1d(mesh.local_coordinate(pts, elems))
    out = np.zeros((len(pts), mesh.n_nodes))
    rows = np.arange(len(pts))[:, None]
    out[rows, mesh.connectivity[elems]] = N
    return out


def local_derivative_matrix(mesh: Mesh1D, points, elems=None) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    elems = mesh.element_of(pts) if elems is None else np.asarray(elems)
    _, dN = shape_functions_1d(mesh.local_coordinate(pts, elems))
    out = np.zeros((len(pts), mesh.n_nodes))
    rows = np.arange(len(pts))[:, None]
    out[rows, mesh.connectivity[elems]] = dN * (2.0 / mesh.h)
    return out


def fractional_derivative_matrix(
    mesh: Mesh1D,
    hmap: HorizonMap,
    alpha,
    elems=None,
) -> np.ndarray:
    """Rows of ``D^alpha`` at the points of ``hmap`` over the nodes of ``mesh``.

    Row ``q`` integrates the attenuation kernel against the first derivative
    of the shape functions of every element meeting the horizon of point
    ``q``, using closed-form distance moments.  A side whose horizon is
    empty contributes half the local derivative.
    """
    a = float(as_order(alpha))
    pts = hmap.points
    elems = mesh.element_of(pts) if elems is None else np.asarray(elems)
    local = local_derivative_matrix(mesh, pts, elems)
    if a >= 1.0:
        return local
    out = np.zeros((len(pts), mesh.n_nodes))
    h = mesh.h
    bounds = mesh.bounds
    for q, x in enumerate(pts):
        lA, lB = hmap.l_A[q], hmap.l_B[q]
        ids = hmap.elements[q]
        a_e, b_e = bounds[ids, 0], bounds[ids, 1]
        xi_x = 2.0 * (x - 0.5 * (a_e + b_e)) / h
        row = np.zeros((len(ids), 3))
        for sign, r1, r2, length in (
            (+1.0, np.maximum(a_e - x, 0.0), np.minimum(b_e - x, lB), lB),
            (-1.0, np.maximum(x - b_e, 0.0), np.minimum(x - a_e, lA), lA),
        ):
            if length <= 0.0:
                continue
            r2 = np.maximum(r2, r1)
            R = weighted_power_moments(r1, r2, length, a, 1)
            row += (2.0 / h) * (
                (_C0 + _C1 * xi_x[:, None]) * R[:, 0:1]
                + _C1 * (sign * 2.0 / h) * R[:, 1:2]
            )
        np.add.at(out[q], mesh.connectivity[ids].ravel(), row.ravel())
        half_local = 0.5 * ((lA <= 0.0) + (lB <= 0.0))
        if half_local:
            out[q] += half_local * local[q]
    return out


@dataclass(frozen=True)
class BRow:
    """Sparse row over global degrees of freedom."""

    indices: np.ndarray
    values: np.ndarray
    n_dof: int

    def __matmul__(self, U) -> float:
        return float(np.dot(self.values, np.asarray(U)[self.indices]))

    def dense(self) -> np.ndarray:
        out = np.zeros(self.n_dof)
        np.add.at(out, self.indices, self.values)
        return out


def fractional_b_row(
    mesh,
    field: str,
    x,
    alpha,
    l_f: float,
    direction: int = 0,
    fields: Sequence[str] | None = None,
) -> BRow:
    """``D^alpha`` of one field at one point as a row over global DOFs.

    DOFs are field-blocked: ``dof = field_index * n_nodes + node``.
    """
    if l_f <= 0.0 and float(as_order(alpha)) < 1.0:
        raise DegenerateHorizonError("a fractional row needs a positive horizon length")
    if isinstance(mesh, Mesh1D):
        fields = fields or BEAM_FIELDS
        xs = np.atleast_1d(float(x))
        row = fractional_derivative_matrix(mesh, build_horizon_map(mesh, xs, l_f), alpha)[0]
    else:
        fields = fields or PLATE_FIELDS
        lines = (mesh.line_x, mesh.line_y)
        along = lines[direction]
        xs = np.atleast_1d(float(x[direction]))
        g = fractional_derivative_matrix(along, build_horizon_map(along, xs, l_f), alpha)[0]
        other = lines[1 - direction]
        interp = interpolation_matrix(other, np.atleast_1d(float(x[1 - direction])))[0]
        row = np.kron(g, interp) if direction == 0 else np.kron(interp, g)
    n_nodes = row.size
    k = fields.index(field)
    nz = np.flatnonzero(row)
    return BRow(nz + k * n_nodes, row[nz], n_nodes * len(fields))


# ------------------------------------------------------------ factored rows


@dataclass(frozen=True, eq=False)
class Term:
    field: int
    factors: tuple[np.ndarray, ...]
    coeff: float = 1.0


@dataclass(frozen=True, eq=False)
class RowGroup:
    """Rows sharing one tensor Gauss rule; ``rows`` index the stacked B."""

    name: str
    rows: tuple[int, ...]
    terms: tuple[tuple[Term, ...], ...]
    weights: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class Kinematics:
    """Stacked fractional B-matrix of a structure, grouped by quadrature."""

    n_rows: int
    fields: tuple[str, ...]
    node_counts: tuple[int, ...]
    groups: tuple[RowGroup, ...]

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.node_counts))

    @property
    def n_dof(self) -> int:
        return self.n_nodes * len(self.fields)

    def dense(self, group: int | str = 0) -> np.ndarray:
        """Materialise ``(n_points, n_group_rows, n_dof)`` for one group.

        Meant for inspection and tests on small meshes.
        """
        g = self._group(group)
        n_pts = int(np.prod([len(w) for w in g.weights]))
        out = np.zeros((n_pts, len(g.rows), self.n_dof))
        for r, terms in enumerate(g.terms):
            for t in terms:
                mat = t.factors[0]
                for fac in t.factors[1:]:
                    mat = np.kron(mat, fac)
                sl = slice(t.field * self.n_nodes, (t.field + 1) * self.n_nodes)
                out[:, r, sl] += t.coeff * mat
        return out

    def point_weights(self, group: int | str = 0) -> np.ndarray:
        g = self._group(group)
        w = g.weights[0]
        for extra in g.weights[1:]:
            w = np.kron(w, extra)
        return w

    def _group(self, group):
        if isinstance(group, str):
            for g in self.groups:
                if g.name == group:
                    return g
            raise KeyError(group)
        return self.groups[group]


@dataclass(frozen=True, eq=False)
class _LineOps:
    """Per-direction interpolation and derivative matrices at one Gauss rule."""

    weights: np.ndarray
    L: np.ndarray
    D1: np.ndarray
    D2: np.ndarray


def _line_ops(mesh: Mesh1D, npts: int, params: FractionalParams) -> _LineOps:
    x, w, elem = mesh.gauss_points(npts)
    hmap = build_horizon_map(mesh, x, params.l_f)
    L = interpolation_matrix(mesh, x, elem)
    D1 = fractional_derivative_matrix(mesh, hmap, params.alpha1, elem)
    if float(params.alpha2) == float(params.alpha1):
        D2 = D1
    else:
        D2 = fractional_derivative_matrix(mesh, hmap, params.alpha2, elem)
    return _LineOps(w, L, D1, D2)


def beam_b_matrices(
    mesh: Mesh1D,
    section: BeamSection,
    params: FractionalParams,
    quad: Quadrature = Quadrature(),
) -> Kinematics:
    """Stacked rows ``[D1 u0, D1 w0 - theta0, D1 theta0, D1 theta0, D2 theta0]``.

    ``D1``/``D2`` denote RC derivatives of orders ``alpha1``/``alpha2``.  The
    shear row lives on the reduced Gauss rule.
    """
    if abs(mesh.L - section.L) > 1e-12 * section.L:
        raise ValueError("mesh length does not match the section length")
    u, w, th = range(3)
    F = _line_ops(mesh, quad.full, params)
    S = _line_ops(mesh, quad.shear, params)
    full = RowGroup(
        "full",
        (0, 2, 3, 4),
        (
            (Term(u, (F.D1,)),),
            (Term(th, (F.D1,)),),
            (Term(th, (F.D1,)),),
            (Term(th, (F.D2,)),),
        ),
        (F.weights,),
    )
    shear = RowGroup(
        "shear",
        (1,),
        ((Term(w, (S.D1,)), Term(th, (S.L,), -1.0)),),
        (S.weights,),
    )
    return Kinematics(5, BEAM_FIELDS, (mesh.n_nodes,), (full, shear))


def plate_kinematic_rows(
    mesh: Mesh2D,
    section: PlateSection,
    params: FractionalParams,
    quad: Quadrature = Quadrature(),
) -> Kinematics:
    """The fifteen stacked plate rows (membrane, bending, shear, gradients).

    Gradient rows keep only the strain gradients that survive exactly
    through the thickness: transverse gradients of the in-plane strains
    (``alpha1`` rows on the rotations) and in-plane gradients of the
    transverse shear strains (``alpha2`` rows on the rotations).
    """
    u, v, w, tx, ty = range(5)
    Fx = _line_ops(mesh.line_x, quad.full, params)
    Fy = _line_ops(mesh.line_y, quad.full, params)
    Sx = _line_ops(mesh.line_x, quad.shear, params)
    Sy = _line_ops(mesh.line_y, quad.shear, params)

    def dx(f, order=1):
        return Term(f, ((Fx.D1 if order == 1 else Fx.D2), Fy.L))

    def dy(f, order=1):
        return Term(f, (Fx.L, (Fy.D1 if order == 1 else Fy.D2)))

    full = RowGroup(
        "full",
        (0, 1, 2, 3, 4, 5, 8, 9, 10, 11, 12, 13, 14),
        (
            (dx(u),),
            (dy(v),),
            (dy(u), dx(v)),
            (dx(tx),),
            (dy(ty),),
            (dy(tx), dx(ty)),
            (dx(tx),),
            (dy(ty),),
            (dy(tx), dx(ty)),
            (dx(tx, 2),),
            (dy(tx, 2),),
            (dx(ty, 2),),
            (dy(ty, 2),),
        ),
        (Fx.weights, Fy.weights),
    )
    shear = RowGroup(
        "shear",
        (6, 7),
        (
            (Term(w, (Sx.D1, Sy.L)), Term(tx, (Sx.L, Sy.L), -1.0)),
            (Term(w, (Sx.L, Sy.D1)), Term(ty, (Sx.L, Sy.L), -1.0)),
        ),
        (Sx.weights, Sy.weights),
    )
    return Kinematics(15, PLATE_FIELDS, (mesh.line_x.n_nodes, mesh.line_y.n_nodes), (full, shear))


# ------------------------------------------------------------ constitutive


def beam_constitutive(section: BeamSection) -> np.ndarray:
    """Diagonal pairing of the five beam resultants with their strains."""
    s = section
    l2 = s.l_star**2
    return np.diag([s.E * s.A, s.Ks * s.G * s.A, s.E * s.I, l2 * s.E * s.A, s.Ks * l2 * s.G * s.A])


def plane_stress_matrix(E: float, nu: float) -> np.ndarray:
    c = E / (1.0 - nu**2)
    return c * np.array([[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, 0.5 * (1.0 - nu)]])


def plate_constitutive(section: PlateSection) -> np.ndarray:
    """Block-diagonal 15x15 constitutive matrix for :data:`PLATE_ROWS`."""
    s = section
    Q = plane_stress_matrix(s.E, s.nu)
    l2 = s.l_star**2
    S = np.zeros((15, 15))
    S[0:3, 0:3] = s.h * Q
    S[3:6, 3:6] = s.h**3 / 12.0 * Q
    S[6:8, 6:8] = s.Ks * s.G * s.h * np.eye(2)
    S[8:11, 8:11] = l2 * s.h * Q
    S[11:15, 11:15] = s.Ks * l2 * s.G * s.h * np.eye(4)
    return S


def gradient_energy_ratio(h: float, L: float) -> float:
    """Order-of-magnitude energy ratio of the neglected axial strain gradient
    to the retained transverse one, ``(h/L)**2 / 12``."""
    return (h / L) ** 2 / 12.0
