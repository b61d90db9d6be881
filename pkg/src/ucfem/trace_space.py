"""Finite-dimensional Dirichlet trace spaces on the boundary of the unit square.

A trace basis exposes the mode values and tangential derivatives along the top
edge, parametrised by ``x``; all modes vanish on the remaining three sides.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh
from .quadrature import EdgeRule, gauss_legendre


@dataclass(frozen=True)
class SineTraceBasis:
    """Modes ``sqrt(2) sin(k pi x)`` on the top edge, ``k = 1..n_modes``."""

    n_modes: int

    def __post_init__(self):
        if isinstance(self.n_modes, bool) or not isinstance(self.n_modes, (int, np.integer)) \
                or self.n_modes < 1:
            raise ValueError(f"n_modes must be positive, got {self.n_modes}")

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(1, self.n_modes + 1)

    def values(self, x) -> np.ndarray:
        """Mode values at top-edge abscissae ``x``; shape ``x.shape + (n_modes,)``."""
        x = np.asarray(x, dtype=float)[..., None]
        return np.sqrt(2.0) * np.sin(self.wavenumbers * np.pi * x)

    def derivatives(self, x) -> np.ndarray:
        """Derivatives along ``+x`` on the top edge."""
        k = self.wavenumbers
        x = np.asarray(x, dtype=float)[..., None]
        return np.sqrt(2.0) * k * np.pi * np.cos(k * np.pi * x)

    def boundary_values(self, x, y) -> np.ndarray:
        """Mode values at arbitrary boundary points (zero off the top edge)."""
        x = np.asarray(x, dtype=float)
        on_top = (np.asarray(y) == 1.0)[..., None]
        return np.where(on_top, self.values(x), 0.0)

    def evaluate(self, coefficients, x) -> np.ndarray:
        """Trace ``sum_k c_k phi_k`` at top-edge abscissae."""
        return self.values(x) @ np.asarray(coefficients, dtype=float)


def _top_edges(mesh: Mesh):
    """Top-edge vertex pairs ordered so that x increases from first to second."""
    edges = mesh.boundary_edges[mesh.top_edge_mask()]
    x = mesh.vertices[:, 0]
    swap = x[edges[:, 0]] > x[edges[:, 1]]
    edges = edges.copy()
    edges[swap] = edges[swap][:, ::-1]
    return edges


def gram_matrices(basis: SineTraceBasis, mesh: Mesh, rule: EdgeRule | None = None):
    """Boundary mass and tangential-stiffness Gram matrices of the modes."""
    rule = rule or gauss_legendre()
    edges = _top_edges(mesh)
    xa = mesh.vertices[edges[:, 0], 0]
    xb = mesh.vertices[edges[:, 1], 0]
    length = xb - xa
    xq = xa[:, None] + rule.points[None, :] * length[:, None]
    wq = rule.weights[None, :] * length[:, None]
    phi = basis.values(xq)
    dphi = basis.derivatives(xq)
    mass = np.einsum("eq,eqn,eqm->nm", wq, phi, phi)
    stiff = np.einsum("eq,eqn,eqm->nm", wq, dphi, dphi)
    return mass, stiff


def coupling_blocks(basis: SineTraceBasis, mesh: Mesh, rule: EdgeRule | None = None):
    """FE-to-mode couplings ``int psi_i phi_k`` and ``int psi_i' phi_k'`` over the boundary.

    Returns two sparse matrices of shape (n_vertices, n_modes); only vertices on
    the top edge have non-zero rows.
    """
    rule = rule or gauss_legendre()
    edges = _top_edges(mesh)
    xa = mesh.vertices[edges[:, 0], 0]
    xb = mesh.vertices[edges[:, 1], 0]
    length = xb - xa
    t = rule.points[None, :]
    xq = xa[:, None] + t * length[:, None]
    wq = rule.weights[None, :] * length[:, None]
    phi = basis.values(xq)
    dphi = basis.derivatives(xq)
    # hats on an edge: 1 - t and t; tangential derivatives -1/L and 1/L
    hat = np.stack([1.0 - t + 0 * xq, t + 0 * xq], axis=1)  # (e, 2, q)
    dhat = np.stack([-1.0 / length, 1.0 / length], axis=1)  # (e, 2)
    cm = np.einsum("eq,ejq,eqn->ejn", wq, hat, phi)
    ck = np.einsum("eq,ej,eqn->ejn", wq, dhat, dphi)

    n_modes = basis.n_modes
    rows = np.repeat(edges.reshape(-1), n_modes)
    cols = np.tile(np.arange(n_modes), 2 * len(edges))
    shape = (mesh.n_vertices, n_modes)
    c_mass = sp.coo_matrix((cm.reshape(-1), (rows, cols)), shape=shape).tocsr()
    c_stiff = sp.coo_matrix((ck.reshape(-1), (rows, cols)), shape=shape).tocsr()
    return c_mass, c_stiff


def nodal_mode_values(basis: SineTraceBasis, mesh: Mesh) -> np.ndarray:
    """Mode values at every vertex (zero away from the top edge), shape (n_vertices, n_modes)."""
    v = mesh.vertices
    return basis.boundary_values(v[:, 0], v[:, 1])


def interpolated_blocks(basis: SineTraceBasis, mesh: Mesh, boundary_mass, boundary_stiffness):
    """Gram and coupling blocks with each mode replaced by its P1 boundary interpolant.

    On a uniform top edge the interpolated sines are eigenvectors of the P1
    boundary mass and stiffness matrices, so both Grams stay diagonal.
    """
    phi = nodal_mode_values(basis, mesh)
    c_mass = sp.csr_matrix(boundary_mass @ phi)
    c_stiff = sp.csr_matrix(boundary_stiffness @ phi)
    return c_mass, c_stiff, phi.T @ (boundary_mass @ phi), phi.T @ (boundary_stiffness @ phi)
