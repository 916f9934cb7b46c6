"""Longitudinal-wave dispersion of the 1D fractional continuum.

The complex phase velocity is

.. math::

    Z = \\sqrt{E/\\rho}\\,\\Big[-e^{i\\pi\\alpha_1} k^{2(\\alpha_1-1)}
        + e^{i\\pi(\\alpha_1+\\alpha_2)} k^{2(\\alpha_1+\\alpha_2-1)} l_*^2/4\\Big]^{1/2}
        \\phi^{-1},
    \\qquad \\phi = 1 + \\rho' l_*^2 k^2 / (3\\rho),

taken on the branch with ``Re(Z) >= 0``.  ``Im(Z)`` carries the sign of the
bracket's imaginary part ``b_bar``, so a medium is stable where
``b_bar <= 0``.  Trigonometric factors use degree-based functions so that
integer orders give exact zeros and the classical limit is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import cosdg, sindg

from .fracops import FractionalOrder, as_order

__all__ = [
    "MediumParams",
    "DispersionPoint",
    "StabilityTable",
    "phase_velocity",
    "phase_velocity_array",
    "stability_region",
    "sweep",
    "loglog_slope",
]


@dataclass(frozen=True)
class MediumParams:
    E: float
    rho: float
    alpha1: FractionalOrder
    alpha2: FractionalOrder
    l_star: float = 0.0
    rho_prime: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha1", as_order(self.alpha1))
        object.__setattr__(self, "alpha2", as_order(self.alpha2))
        if not self.E > 0 or not self.rho > 0:
            raise ValueError("E and rho must be positive")
        if self.l_star < 0 or self.rho_prime < 0:
            raise ValueError("l_star and rho_prime must be non-negative")

    @property
    def c0(self) -> float:
        return float(np.sqrt(self.E / self.rho))


@dataclass(frozen=True)
class DispersionPoint:
    k: float
    Z: complex
    b_bar: float
    phi: float

    @property
    def re(self) -> float:
        return self.Z.real

    @property
    def im(self) -> float:
        return self.Z.imag

    @property
    def stable(self) -> bool:
        return self.Z.imag <= 0.0

    @property
    def causal(self) -> bool:
        return self.Z.real > 0.0


def _bracket(k, a1: float, a2: float, l_star: float):
    """Real and imaginary parts of the bracket (``b_bar`` is the latter)."""
    k = np.asarray(k, dtype=float)
    p1 = k ** (2.0 * (a1 - 1.0))
    p2 = k ** (2.0 * (a1 + a2 - 1.0)) * (0.25 * l_star**2)
    d1, d2 = 180.0 * a1, 180.0 * (a1 + a2)
    re = -cosdg(d1) * p1 + cosdg(d2) * p2
    im = -sindg(d1) * p1 + sindg(d2) * p2
    return re, im


def phase_velocity_array(k, p: MediumParams, include_inertia_gradient: bool = False):
    """Vectorised ``(Z, b_bar, phi)`` over an array of wavenumbers."""
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)):
        raise ValueError("wavenumbers must be positive")
    re, im = _bracket(k, float(p.alpha1), float(p.alpha2), p.l_star)
    root = np.sqrt(re + 1j * im)
    root = np.where(root.real < 0, -root, root)
    if include_inertia_gradient:
        phi = 1.0 + p.rho_prime * p.l_star**2 * k**2 / (3.0 * p.rho)
    else:
        phi = np.ones_like(k)
    return p.c0 * root / phi, im, phi


def phase_velocity(k: float, p: MediumParams, include_inertia_gradient: bool = False) -> DispersionPoint:
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k}")
    Z, b, phi = phase_velocity_array(np.array([k]), p, include_inertia_gradient)
    return DispersionPoint(float(k), complex(Z[0]), float(b[0]), float(phi[0]))


@dataclass(frozen=True, eq=False)
class StabilityTable:
    """Verdicts on an ``(alpha1, alpha2, k)`` grid, arrays indexed in that order."""

    alpha1: np.ndarray
    alpha2: np.ndarray
    k: np.ndarray
    b_bar: np.ndarray
    Z: np.ndarray

    @property
    def stable(self) -> np.ndarray:
        return self.b_bar <= 0.0

    @property
    def causal(self) -> np.ndarray:
        return self.Z.real > 0.0

    @property
    def fraction_admissible(self) -> float:
        return float(np.mean(self.stable & self.causal & (self.Z.imag <= 0.0)))


def stability_region(
    alpha1_grid: Sequence[float],
    alpha2_grid: Sequence[float],
    k_grid: Sequence[float],
    p: MediumParams,
    checked: bool = True,
) -> StabilityTable:
    """Evaluate ``b_bar`` and ``Z`` over a grid of orders and wavenumbers.

    ``checked=False`` lets the grid leave ``[0.5, 1]`` to probe the
    unstable region.
    """
    make = FractionalOrder if checked else FractionalOrder.unchecked
    a1s = np.asarray(alpha1_grid, dtype=float)
    a2s = np.asarray(alpha2_grid, dtype=float)
    ks = np.asarray(k_grid, dtype=float)
    b = np.empty((len(a1s), len(a2s), len(ks)))
    Z = np.empty(b.shape, dtype=complex)
    for i, a1 in enumerate(a1s):
        for j, a2 in enumerate(a2s):
            q = MediumParams(p.E, p.rho, make(a1), make(a2), p.l_star, p.rho_prime)
            Z[i, j], b[i, j], _ = phase_velocity_array(ks, q)
    return StabilityTable(a1s, a2s, ks, b, Z)


def sweep(
    k_min: float,
    k_max: float,
    n_points: int,
    p: MediumParams,
    include_inertia_gradient: bool = False,
) -> list[DispersionPoint]:
    """Log-spaced samples of the dispersion relation."""
    if n_points < 2:
        raise ValueError("a sweep needs at least two points")
    if not 0 < k_min < k_max:
        raise ValueError("need 0 < k_min < k_max")
    ks = np.geomspace(k_min, k_max, n_points)
    Z, b, phi = phase_velocity_array(ks, p, include_inertia_gradient)
    return [DispersionPoint(float(k), complex(z), float(bb), float(f)) for k, z, bb, f in zip(ks, Z, b, phi)]


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log|y|`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x)), np.log(np.abs(np.asarray(y))), 1)[0])
