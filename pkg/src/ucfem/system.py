"""Saddle-point system in the unknowns ``(u, y, z)`` and its direct solution.

Block layout (``y`` holds the trace-mode coefficients, ``z`` the interior
values of the Lagrange multiplier)::

    [ B_uu + D_omega + S   B_uy    A[:, interior] ] [u]   [rhs_u]
    [ B_uy^T               B_yy    0              ] [y] = [0    ]
    [ A[interior, :]       0       0              ] [z]   [rhs_z]
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import ScaledForms
from .fe_space import FeFunction

RESIDUAL_TOL = 1e-10


class SolverError(RuntimeError):
    """Factorisation failed or the solution misses the residual tolerance."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class BlockSystem:
    matrix: sp.csc_matrix
    rhs: np.ndarray
    n_u: int
    n_y: int
    n_z: int
    interior: np.ndarray
    scaled: ScaledForms

    @property
    def u_slice(self) -> slice:
        return slice(0, self.n_u)

    @property
    def y_slice(self) -> slice:
        return slice(self.n_u, self.n_u + self.n_y)

    @property
    def z_slice(self) -> slice:
        return slice(self.n_u + self.n_y, self.n_u + self.n_y + self.n_z)

    @property
    def shape(self):
        return self.matrix.shape

    def with_rhs(self, rhs) -> "BlockSystem":
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != self.rhs.shape:
            raise ValueError(f"rhs has shape {rhs.shape}, expected {self.rhs.shape}")
        return BlockSystem(self.matrix, rhs, self.n_u, self.n_y, self.n_z, self.interior, self.scaled)

    def dump(self, path) -> Path:
        """Write the matrix in Matrix Market coordinate format."""
        path = Path(path)
        if path.suffix != ".mtx":
            path = path.with_name(path.name + ".mtx")
        scipy.io.mmwrite(str(path), self.matrix.tocoo(), field="real", symmetry="general")
        return path


@dataclass(frozen=True)
class Solution:
    u_h: FeFunction
    y: np.ndarray
    z_h: FeFunction
    residual: float


def build_system(scaled: ScaledForms, rhs) -> BlockSystem:
    rhs_u, rhs_y, rhs_z = (np.asarray(r, dtype=float) for r in rhs)
    interior = scaled.dofmap.interior
    n_u = scaled.A.shape[0]
    n_y = scaled.B_yy.shape[0]
    n_z = len(interior)
    if scaled.B_uy.shape != (n_u, n_y):
        raise ValueError(f"B_uy has shape {scaled.B_uy.shape}, expected {(n_u, n_y)}")
    for name, m in (("D_omega", scaled.D_omega), ("S", scaled.S), ("B_uu", scaled.B_uu)):
        if m.shape != (n_u, n_u):
            raise ValueError(f"{name} has shape {m.shape}, expected {(n_u, n_u)}")
    if rhs_u.shape != (n_u,) or rhs_y.shape != (n_y,) or rhs_z.shape != (n_z,):
        raise ValueError("right-hand side blocks do not match the system dimensions")

    a_zu = scaled.A[interior, :]
    top = scaled.B_uu + scaled.D_omega + scaled.S
    b_yy = sp.csr_matrix(scaled.B_yy)
    matrix = sp.bmat(
        [
            [top, scaled.B_uy, a_zu.T],
            [scaled.B_uy.T, b_yy, None],
            [a_zu, None, None],
        ],
        format="csc",
    )
    matrix.sum_duplicates()
    matrix.sort_indices()
    return BlockSystem(matrix, np.concatenate([rhs_u, rhs_y, rhs_z]), n_u, n_y, n_z,
                       interior, scaled)


def _relative_residual(matrix, x, b) -> float:
    nb = np.linalg.norm(b)
    r = np.linalg.norm(matrix @ x - b)
    return float(r / nb) if nb > 0 else float(r)


def solve(system: BlockSystem, tol: float = RESIDUAL_TOL, refine_steps: int = 3) -> Solution:
    """Sparse LU solve with a few steps of iterative refinement."""
    b = system.rhs
    try:
        lu = spla.splu(system.matrix)
    except RuntimeError as exc:
        raise SolverError(f"sparse factorisation failed: {exc}") from exc
    x = lu.solve(b)
    residual = _relative_residual(system.matrix, x, b)
    for _ in range(refine_steps):
        if residual <= tol or not np.isfinite(residual):
            break
        x = x + lu.solve(b - system.matrix @ x)
        residual = _relative_residual(system.matrix, x, b)
    if not np.isfinite(residual) or residual > tol:
        raise SolverError(f"relative residual {residual:.3e} exceeds {tol:.1e}", residual)

    mesh = system.scaled.mesh
    z = np.zeros(system.n_u)
    z[system.interior] = x[system.z_slice]
    return Solution(
        u_h=FeFunction(mesh, x[system.u_slice]),
        y=x[system.y_slice].copy(),
        z_h=FeFunction(mesh, z),
        residual=residual,
    )


def project_trace(u: np.ndarray, scaled: ScaledForms) -> np.ndarray:
    """Mode coefficients of the boundary-form projection of the trace of ``u``."""
    return np.linalg.solve(scaled.B_yy, -(scaled.B_uy.T @ u))


def eliminate_y_check(solution: Solution, scaled: ScaledForms) -> float:
    """Largest deviation between the solved ``y`` and a fresh projection of ``u_h``.

    The recomputation uses only the diagonal of the mode Grams, which are
    diagonal for the sine basis.
    """
    forms = scaled.forms
    h = scaled.h
    u = solution.u_h.coefficients
    num = h * (forms.C_M.T @ u) + h**3 * (forms.C_K.T @ u)
    den = h * np.diag(forms.M_N) + h**3 * np.diag(forms.K_N)
    return float(np.max(np.abs(solution.y - num / den), initial=0.0))


def trace_residual_operator(scaled: ScaledForms) -> sp.csr_matrix:
    """Matrix of the boundary form with the trace projection eliminated (Schur complement)."""
    b_uy = scaled.B_uy.toarray()
    rows = np.flatnonzero(np.any(b_uy != 0, axis=1))
    corr = b_uy[rows] @ np.linalg.solve(scaled.B_yy, b_uy[rows].T)
    n = scaled.B_uu.shape[0]
    r, c = np.meshgrid(rows, rows, indexing="ij")
    low_rank = sp.coo_matrix((corr.ravel(), (r.ravel(), c.ravel())), shape=(n, n))
    return (scaled.B_uu - low_rank).tocsr()


def eliminated_operator(scaled: ScaledForms) -> sp.csr_matrix:
    """Matrix of the form ``g`` on ``V_h x V_h0`` (``y`` eliminated)."""
    interior = scaled.dofmap.interior
    a_zu = scaled.A[interior, :]
    top = trace_residual_operator(scaled) + scaled.D_omega + scaled.S
    return sp.bmat([[top, a_zu.T], [a_zu, None]], format="csr")
