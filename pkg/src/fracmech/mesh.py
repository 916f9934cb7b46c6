"""Structured quadratic meshes and horizon bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.special import roots_legendre

from .fracops import Horizon

__all__ = [
    "Mesh1D",
    "Mesh2D",
    "HorizonMap",
    "build_uniform_1d",
    "build_uniform_2d",
    "horizon_at",
    "horizon_lengths",
    "elements_in_horizon",
    "build_horizon_map",
    "gauss_rule",
]


def gauss_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points and weights on [-1, 1]."""
    xi, w = roots_legendre(n)
    return np.asarray(xi), np.asarray(w)


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Uniform line of three-noded elements on ``[0, L]``."""

    L: float
    n_elem: int
    nodes: np.ndarray = field(repr=False)
    connectivity: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def h(self) -> float:
        return self.L / self.n_elem

    @cached_property
    def bounds(self) -> np.ndarray:
        """``(n_elem, 2)`` element end coordinates."""
        c = self.connectivity
        return np.column_stack([self.nodes[c[:, 0]], self.nodes[c[:, 2]]])

    def element_of(self, x) -> np.ndarray:
        """Index of the element containing ``x`` (right-closed at ``L``)."""
        e = np.floor(np.asarray(x, dtype=float) / self.h).astype(int)
        return np.clip(e, 0, self.n_elem - 1)

    def local_coordinate(self, x, elem) -> np.ndarray:
        a = self.bounds[elem, 0]
        return 2.0 * (np.asarray(x) - a) / self.h - 1.0

    def gauss_points(self, npts: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Global Gauss points, weights (with Jacobian) and owning element."""
        xi, w = gauss_rule(npts)
        a = self.bounds[:, 0][:, None]
        x = a + 0.5 * self.h * (xi[None, :] + 1.0)
        elem = np.repeat(np.arange(self.n_elem), npts)
        weights = np.tile(0.5 * self.h * w, self.n_elem)
        return x.ravel(), weights, elem


def _uniform_line(L: float, n_elem: int) -> Mesh1D:
    if L <= 0:
        raise ValueError(f"length must be positive, got {L}")
    nodes = np.linspace(0.0, L, 2 * n_elem + 1)
    conn = np.column_stack([2 * np.arange(n_elem) + k for k in range(3)])
    return Mesh1D(float(L), int(n_elem), nodes, conn)


def build_uniform_1d(L: float, n_elem: int) -> Mesh1D:
    if n_elem < 2:
        raise ValueError(f"need at least 2 elements, got {n_elem}")
    return _uniform_line(L, n_elem)


@dataclass(frozen=True, eq=False)
class Mesh2D:
    """Tensor-product grid of nine-noded quadrilaterals on ``[0, L] x [0, B]``.

    Node ``(ix, iy)`` has index ``ix * (2 ny + 1) + iy``; element
    ``(ex, ey)`` has index ``ex * ny + ey``.
    """

    L: float
    B: float
    nx: int
    ny: int
    line_x: Mesh1D = field(repr=False)
    line_y: Mesh1D = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.line_x.n_nodes * self.line_y.n_nodes

    @property
    def n_elem(self) -> int:
        return self.nx * self.ny

    @cached_property
    def nodes(self) -> np.ndarray:
        X, Y = np.meshgrid(self.line_x.nodes, self.line_y.nodes, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    def node_index(self, ix, iy):
        return np.asarray(ix) * self.line_y.n_nodes + np.asarray(iy)

    @cached_property
    def connectivity(self) -> np.ndarray:
        conn = np.empty((self.n_elem, 9), dtype=int)
        for ex in range(self.nx):
            for ey in range(self.ny):
                ix = 2 * ex + np.repeat(np.arange(3), 3)
                iy = 2 * ey + np.tile(np.arange(3), 3)
                conn[ex * self.ny + ey] = self.node_index(ix, iy)
        return conn

    @cached_property
    def boundary(self) -> dict[str, np.ndarray]:
        """Node lists per side: ``x0``, ``x1`` (normal along x), ``y0``, ``y1``."""
        nxn, nyn = self.line_x.n_nodes, self.line_y.n_nodes
        iy = np.arange(nyn)
        ix = np.arange(nxn)
        return {
            "x0": self.node_index(0, iy),
            "x1": self.node_index(nxn - 1, iy),
            "y0": self.node_index(ix, 0),
            "y1": self.node_index(ix, nyn - 1),
        }

    def element_areas(self) -> np.ndarray:
        return np.full(self.n_elem, self.line_x.h * self.line_y.h)


def build_uniform_2d(L: float, B: float, nx: int, ny: int) -> Mesh2D:
    if nx < 1 or ny < 1:
        raise ValueError("need at least one element per direction")
    return Mesh2D(float(L), float(B), int(nx), int(ny), _uniform_line(L, nx), _uniform_line(B, ny))


def horizon_lengths(x, l_f: float, lower: float, upper: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``(l_A, l_B)``: nominal ``l_f`` truncated by the domain."""
    x = np.asarray(x, dtype=float)
    l_A = np.minimum(l_f, x - lower)
    l_B = np.minimum(l_f, upper - x)
    return np.maximum(l_A, 0.0), np.maximum(l_B, 0.0)


def horizon_at(x, l_f: float, bounds):
    """Horizon at ``x`` for domain ``bounds``.

    Scalar ``x`` with ``bounds=(lower, upper)`` gives one :class:`Horizon`;
    a point ``(x, y, ...)`` with one ``(lower, upper)`` pair per axis gives a
    tuple, one horizon per direction.
    """
    if np.ndim(x) == 0:
        lo, hi = bounds
        return Horizon.truncated(float(x), l_f, lo, hi)
    return tuple(Horizon.truncated(float(xi), l_f, lo, hi) for xi, (lo, hi) in zip(x, bounds))


def _intersecting(bounds: np.ndarray, x: float, l_A: float, l_B: float) -> np.ndarray:
    a, b = bounds[:, 0], bounds[:, 1]
    if l_A + l_B <= 0:
        return np.flatnonzero((a <= x) & (b >= x))[:1]
    return np.flatnonzero((a < x + l_B) & (b > x - l_A))


def elements_in_horizon(x, direction: int, mesh, l_f: float) -> np.ndarray:
    """Elements whose extent along ``direction`` meets the horizon of ``x``.

    For a plate only the strip of elements sharing the point's transverse
    coordinate is returned, since each fractional derivative acts along a
    single Cartesian axis.
    """
    if isinstance(mesh, Mesh1D):
        if direction != 0:
            raise ValueError("a line mesh only has direction 0")
        l_A, l_B = horizon_lengths(float(x), l_f, 0.0, mesh.L)
        return _intersecting(mesh.bounds, float(x), float(l_A), float(l_B))
    if direction not in (0, 1):
        raise ValueError("plate directions are 0 (x) and 1 (y)")
    lines = (mesh.line_x, mesh.line_y)
    along, across = lines[direction], lines[1 - direction]
    s, t = float(x[direction]), float(x[1 - direction])
    l_A, l_B = horizon_lengths(s, l_f, 0.0, along.L)
    hits = _intersecting(along.bounds, s, float(l_A), float(l_B))
    tb = across.bounds
    strip = np.flatnonzero((tb[:, 0] <= t) & (tb[:, 1] >= t))
    if direction == 0:
        ids = hits[:, None] * mesh.ny + strip[None, :]
    else:
        ids = strip[:, None] * mesh.ny + hits[None, :]
    return np.sort(ids.ravel())


@dataclass(frozen=True, eq=False)
class HorizonMap:
    """Horizons and intersecting elements for evaluation points on a line."""

    points: np.ndarray
    l_A: np.ndarray
    l_B: np.ndarray
    elements: tuple[np.ndarray, ...]

    def horizon(self, q: int) -> Horizon:
        return Horizon(float(self.l_A[q]), float(self.l_B[q]))

    def __len__(self) -> int:
        return len(self.points)


def build_horizon_map(mesh: Mesh1D, points: Sequence[float], l_f: float) -> HorizonMap:
    pts = np.asarray(points, dtype=float)
    l_A, l_B = horizon_lengths(pts, l_f, 0.0, mesh.L)
    elems = tuple(_intersecting(mesh.bounds, x, a, b) for x, a, b in zip(pts, l_A, l_B))
    return HorizonMap(pts, l_A, l_B, elems)
