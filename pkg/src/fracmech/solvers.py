"""Static and modal solution of reduced systems, plus non-dimensional ratios."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, eigsh

__all__ = [
    "NumericalFailure",
    "StaticResult",
    "ModalResult",
    "static_solve",
    "modal_solve",
    "nondimensionalize",
    "RESIDUAL_TOL",
]

RESIDUAL_TOL = 1e-10
DENSE_EIG_LIMIT = 2000


class NumericalFailure(RuntimeError):
    """Indefinite stiffness, failed factorization or eigensolver breakdown."""


@dataclass(frozen=True, eq=False)
class StaticResult:
    U: np.ndarray
    w_max: float
    w_max_location: np.ndarray
    residual: float
    w_bar: Optional[float] = None


@dataclass(frozen=True, eq=False)
class ModalResult:
    omega0: np.ndarray
    modes: np.ndarray
    omega_bar: Optional[float] = None

    @property
    def f0(self) -> np.ndarray:
        return self.omega0 / (2.0 * np.pi)


def _blocks(system) -> tuple[np.ndarray, ...]:
    return getattr(system, "blocks", None) or (np.arange(system.K.shape[0]),)


def _cholesky(K: np.ndarray):
    try:
        return sla.cho_factor(K, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"stiffness is not positive definite: {exc}") from exc


def _transverse(system, U):
    """``(w_max, location)`` with ``w_max`` the peak of ``|w0|``."""
    parent = getattr(system, "parent", None)
    if parent is None or "w0" not in parent.fields:
        return float(np.max(np.abs(U))) if U.size else 0.0, np.array([])
    w = parent.field_values(U, "w0")
    i = int(np.argmax(np.abs(w)))
    nodes = parent.mesh.nodes
    return float(abs(w[i])), np.atleast_1d(nodes[i]).astype(float)


def static_solve(system) -> StaticResult:
    """Solve ``K U = F`` block by block with Cholesky factorizations.

    Raises :class:`NumericalFailure` when ``K`` is not positive definite or
    the relative residual exceeds :data:`RESIDUAL_TOL`.
    """
    K, F = system.K, system.F
    U = np.zeros_like(F)
    for b in _blocks(system):
        if not np.any(F[b]):
            continue
        Kb = K[np.ix_(b, b)]
        U[b] = sla.cho_solve(_cholesky(Kb), F[b])
    norm_F = np.linalg.norm(F)
    res = np.linalg.norm(K @ U - F)
    residual = res / norm_F if norm_F > 0 else res
    if not residual < RESIDUAL_TOL:
        raise NumericalFailure(f"static residual {residual:.3e} exceeds {RESIDUAL_TOL:g}")
    U_full = system.expand(U) if hasattr(system, "expand") else U
    w_max, loc = _transverse(system, U_full)
    return StaticResult(U_full, w_max, loc, float(residual))


def _block_eigs(K: np.ndarray, M, k: int) -> tuple[np.ndarray, np.ndarray]:
    n = K.shape[0]
    k = min(k, n)
    if n <= DENSE_EIG_LIMIT:
        Md = M.toarray() if sp.issparse(M) else np.asarray(M)
        try:
            lam, V = sla.eigh(K, Md, subset_by_index=[0, k - 1])
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"eigensolver failed: {exc}") from exc
        return lam, V
    factor = _cholesky(K)
    opinv = LinearOperator(K.shape, matvec=lambda v: sla.cho_solve(factor, v), dtype=float)
    try:
        _, V = eigsh(K, k=k, M=M, sigma=0.0, which="LM", OPinv=opinv)
    except Exception as exc:  # ARPACK raises its own error types
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    # Rayleigh-Ritz on the converged subspace: M-orthonormal, sorted
    lam, Y = sla.eigh(V.T @ (K @ V), V.T @ (M @ V))
    return lam, V @ Y


def modal_solve(system, n_modes: int = 1) -> ModalResult:
    """Smallest ``n_modes`` eigenpairs of the pencil ``(K, M)``.

    Small blocks use a dense symmetric-definite solver; large ones use
    shift-invert Lanczos around zero with a Cholesky factor of ``K``.
    Mode shapes are M-orthonormal.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be at least 1")
    K, M = system.K, system.M
    n = K.shape[0]
    lams, vecs = [], []
    for b in _blocks(system):
        Mb = M[b][:, b] if sp.issparse(M) else np.asarray(M)[np.ix_(b, b)]
        lam, V = _block_eigs(K[np.ix_(b, b)], Mb, n_modes)
        full = np.zeros((n, V.shape[1]))
        full[b] = V
        lams.append(lam)
        vecs.append(full)
    lam = np.concatenate(lams)
    V = np.hstack(vecs)
    order = np.argsort(lam, kind="stable")[:n_modes]
    lam, V = lam[order], V[:, order]
    if np.any(lam <= 0.0) or not np.all(np.isfinite(lam)):
        raise NumericalFailure(f"non-positive eigenvalue {lam.min():.3e}; pencil is not definite")
    if hasattr(system, "expand"):
        V = np.column_stack([system.expand(v) for v in V.T])
    return ModalResult(np.sqrt(lam), V)


def nondimensionalize(result, classical_baseline) -> float:
    """``w_max / w_max_classical`` or ``omega_1 / omega_1_classical``."""
    if isinstance(result, StaticResult):
        base = classical_baseline.w_max if isinstance(classical_baseline, StaticResult) else float(classical_baseline)
        return result.w_max / base
    if isinstance(result, ModalResult):
        if isinstance(classical_baseline, ModalResult):
            base = classical_baseline.omega0[0]
        else:
            base = float(classical_baseline)
        return float(result.omega0[0] / base)
    raise TypeError(f"cannot non-dimensionalize {type(result).__name__}")
