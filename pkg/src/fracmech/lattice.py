"""1D lattice with power-law long-range springs and its continuum limit.

The discrete cell energy is kept in square-of-sums form,

    U_i = k0 / 2 * (S_1(i)**2 + S_2(i)**2 / 4),

with ``S_m(i)`` a kernel-weighted sum of central differences ``delta^m u_j``
over the ``horizon_particles`` neighbours on each side.  Kernel weights are
integrated over each particle cell (the self cell included), so the sums are
exact for linear fields and converge to the real-line RC derivatives

    Dbar^{a_m} u(x) = 1 / (2 Gamma(m - a_m)) int |x - s|**(m - 1 - a_m) u^(m)(s) ds

over the window ``|x - s| <= (H + 1/2) l_star``.  With that scaling
``S_m(i) = l_star**m * Dbar^{a_m} u(x_i)`` in the limit, and the lattice
energy tends to ``1/2 E A int [(Dbar^{a1} u)**2 + l_star**2 / 4 (Dbar^{a2} u)**2] dx``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.special import gamma, rgamma

from .fracops import FractionalOrder, Horizon, RCQuadrature, rc_derivative_point
from .mesh import gauss_rule

__all__ = [
    "LatticeSpec",
    "LatticeState",
    "SmoothField",
    "ContinualizationRow",
    "spring_stiffness",
    "discrete_riesz_sum",
    "discrete_riesz_sums",
    "lattice_potential_energy",
    "continuum_potential_energy",
    "continualization_error",
]


@dataclass(frozen=True)
class LatticeSpec:
    """Chain of ``n`` particles at spacing ``l_star``.

    ``alpha1`` lies in ``(0, 1]`` and ``alpha2`` is the raw strain-gradient
    order in ``(1, 2]``; the upper ends give the local limits.
    """

    n: int
    l_star: float
    E: float
    A: float
    alpha1: float
    alpha2: float
    horizon_particles: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("a chain needs at least three particles")
        if not (self.l_star > 0 and self.E > 0 and self.A > 0):
            raise ValueError("l_star, E and A must be positive")
        if not 0 < self.alpha1 <= 1:
            raise ValueError(f"alpha1 must lie in (0, 1], got {self.alpha1}")
        if not 1 < self.alpha2 <= 2:
            raise ValueError(f"alpha2 must lie in (1, 2], got {self.alpha2}")
        if self.horizon_particles < 1:
            raise ValueError("horizon must reach at least one neighbour")

    @property
    def k0(self) -> float:
        return self.E * self.A / self.l_star

    @property
    def c1(self) -> float:
        return self.l_star**2 / 4.0 * float(rgamma(1.0 - self.alpha1))

    @property
    def c2(self) -> float:
        return self.l_star**4 / 4.0 * float(rgamma(2.0 - self.alpha2))

    @property
    def window(self) -> float:
        """Half-width of the interaction window, ``(H + 1/2) l_star``."""
        return (self.horizon_particles + 0.5) * self.l_star

    @property
    def length(self) -> float:
        return (self.n - 1) * self.l_star

    @property
    def interior(self) -> np.ndarray:
        """Cells whose whole stencil lies inside the chain."""
        H = self.horizon_particles
        return np.arange(H + 1, self.n - H - 1)


@dataclass(frozen=True, eq=False)
class LatticeState:
    u: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if u.shape != x.shape or u.ndim != 1:
            raise ValueError("u and x must be matching 1D arrays")
        dx = np.diff(x)
        if len(dx) and not np.allclose(dx, dx[0], rtol=1e-9, atol=0.0):
            raise ValueError("particles must be uniformly spaced")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "x", x)

    @classmethod
    def sample(cls, u: Callable[[np.ndarray], np.ndarray], spec: LatticeSpec, x0: float = 0.0):
        x = x0 + spec.l_star * np.arange(spec.n)
        return cls(np.asarray(u(x), dtype=float) * np.ones_like(x), x)


@dataclass(frozen=True)
class SmoothField:
    """A displacement field with closed-form first and second derivatives."""

    u: Callable[[np.ndarray], np.ndarray]
    du: Callable[[np.ndarray], np.ndarray]
    d2u: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "SmoothField":
        p = np.polynomial.Polynomial(coeffs)
        return cls(p, p.deriv(1), p.deriv(2))

    @classmethod
    def sine(cls, amplitude: float, wavenumber: float) -> "SmoothField":
        a, k = amplitude, wavenumber
        return cls(
            lambda x: a * np.sin(k * np.asarray(x)),
            lambda x: a * k * np.cos(k * np.asarray(x)),
            lambda x: -a * k * k * np.sin(k * np.asarray(x)),
        )


def spring_stiffness(i: int, j: int, spec: LatticeSpec) -> float:
    """Diagnostic pair stiffness ``k0 [c1 / r**(2 a1) + c2 / r**(2 a2 - 2)]``."""
    if i == j:
        raise ValueError("a particle has no spring to itself")
    r = abs(i - j) * spec.l_star
    return spec.k0 * (spec.c1 / r ** (2 * spec.alpha1) + spec.c2 / r ** (2 * spec.alpha2 - 2))


def _kernel_exponent(order: float, m: int) -> float:
    return m - 1 - order


def _cell_weights(spec: LatticeSpec, order: float, m: int) -> np.ndarray:
    """``int_{cell d} |s|**beta ds`` for offsets ``d = -H..H``."""
    beta = _kernel_exponent(order, m)
    H, l = spec.horizon_particles, spec.l_star
    d = np.arange(-H, H + 1)
    lo = np.abs(d) * l - 0.5 * l
    hi = lo + l
    e = beta + 1.0
    w = (hi**e - np.maximum(lo, 0.0) ** e) / e
    w[d == 0] = 2.0 * (0.5 * l) ** e / e
    return w


def _differences(u: np.ndarray, l: float, m: int) -> np.ndarray:
    """Central differences at particles ``1..n-2`` (padded with NaN)."""
    out = np.full_like(u, np.nan)
    if m == 1:
        out[1:-1] = (u[2:] - u[:-2]) / (2.0 * l)
    elif m == 2:
        out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / l**2
    else:
        raise ValueError("derivative_order must be 1 or 2")
    return out


def discrete_riesz_sums(state: LatticeState, order: float, derivative_order: int, spec: LatticeSpec):
    """``S_m`` at every particle; NaN where the stencil leaves the chain."""
    m = derivative_order
    l = spec.l_star
    delta = _differences(state.u, l, m)
    if order == m:
        return l**m * delta  # local limit: the kernel collapses onto the cell
    coef = l**m * 0.5 * float(rgamma(m - order))
    w = _cell_weights(spec, order, m)
    H = spec.horizon_particles
    out = np.full_like(state.u, np.nan)
    n = len(state.u)
    for i in range(1, n - 1):
        lo, hi = max(i - H, 1), min(i + H, n - 2)
        out[i] = coef * np.dot(w[lo - i + H:hi - i + H + 1], delta[lo:hi + 1])
    return out


def discrete_riesz_sum(state: LatticeState, i: int, order: float, derivative_order: int, spec: LatticeSpec) -> float:
    """Kernel-weighted sum ``S_m(i)`` of central differences around particle ``i``.

    Neighbours are taken up to ``horizon_particles`` away and clipped where
    their own central difference would leave the chain.
    """
    n = len(state.u)
    if not 1 <= i <= n - 2:
        raise ValueError(f"particle {i} is within one particle of the chain end")
    return float(discrete_riesz_sums(state, order, derivative_order, spec)[i])


def lattice_potential_energy(state: LatticeState, spec: LatticeSpec) -> float:
    """Total energy of the interior cells (full stencils only)."""
    idx = spec.interior
    if len(idx) == 0:
        raise ValueError("chain too short for its horizon: no interior cells")
    S1 = discrete_riesz_sums(state, spec.alpha1, 1, spec)[idx]
    S2 = discrete_riesz_sums(state, spec.alpha2, 2, spec)[idx]
    return float(0.5 * spec.k0 * np.sum(S1**2 + 0.25 * S2**2))


def _real_line_derivative(f, df, x: float, order: float, m: int, W: float, quad: RCQuadrature) -> float:
    """``Dbar^{order}`` over the window ``[x - W, x + W]`` via the bounded RC form."""
    a = -_kernel_exponent(order, m)
    if a == 1.0:
        return float(df(np.array([x]))[0])
    scale = W ** (1.0 - a) / float(gamma(2.0 - a))
    return scale * rc_derivative_point(f, x, FractionalOrder.unchecked(a), Horizon(W, W), quad, df=df)


def continuum_potential_energy(
    field: SmoothField,
    spec: LatticeSpec,
    x0: float = 0.0,
    panels: int = 64,
    quad: RCQuadrature | None = None,
) -> float:
    """Continuum energy over the span of the lattice's interior cells."""
    quad = quad or RCQuadrature(n=32)
    idx = spec.interior
    l = spec.l_star
    lo = x0 + idx[0] * l - 0.5 * l
    hi = x0 + idx[-1] * l + 0.5 * l
    xi, wi = gauss_rule(6)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    xs = (0.5 * (edges[:-1] + edges[1:]))[:, None] + half[:, None] * xi[None, :]
    ws = half[:, None] * wi[None, :]
    W = spec.window
    total = 0.0
    for x, w in zip(xs.ravel(), ws.ravel()):
        d1 = _real_line_derivative(field.u, field.du, x, spec.alpha1, 1, W, quad)
        d2 = _real_line_derivative(field.du, field.d2u, x, spec.alpha2, 2, W, quad)
        total += w * (d1**2 + 0.25 * l**2 * d2**2)
    return float(0.5 * spec.E * spec.A * total)


@dataclass(frozen=True)
class ContinualizationRow:
    l_star: float
    n: int
    horizon_particles: int
    lattice_energy: float
    continuum_energy: float
    error: float


def continualization_error(
    u_field: SmoothField,
    spec: LatticeSpec,
    refinements: Sequence[float],
) -> list[ContinualizationRow]:
    """Lattice versus continuum energy for each spacing in ``refinements``.

    The chain length and the physical interaction window of ``spec`` are
    held fixed while the spacing changes.  The error is relative to the
    continuum energy, or absolute when that energy vanishes.
    """
    length = spec.length
    reach = spec.horizon_particles * spec.l_star
    rows = []
    for l in refinements:
        n = int(round(length / l)) + 1
        H = max(1, int(round(reach / l)))
        s = replace(spec, n=n, l_star=float(l), horizon_particles=H)
        state = LatticeState.sample(u_field.u, s)
        lat = lattice_potential_energy(state, s)
        cont = continuum_potential_energy(u_field, s)
        err = abs(lat - cont) / cont if cont > 0 else abs(lat - cont)
        rows.append(ContinualizationRow(float(l), n, H, lat, cont, err))
    return rows
