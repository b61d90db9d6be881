"""Assembly of the bilinear forms and load vectors of the stabilised method.

Scalings follow the semiclassical convention: the Laplace form carries ``h^2``,
the boundary form ``h`` (values) and ``h^3`` (tangential derivatives), the
gradient-jump penalty ``h^3`` and the data fidelity ``h^2``.

The jump penalty sums over each interior face once.  Summing over element
boundaries instead would count every face twice and double the penalty.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fe_space import DofMap, barycentric_gradients
from .mesh import Mesh
from .quadrature import TriangleRule, dunavant4
from .trace_space import SineTraceBasis, coupling_blocks, gram_matrices, interpolated_blocks

TRACE_MODES = ("interpolated", "exact")

_P1_MASS = (np.ones((3, 3)) + np.eye(3)) / 12.0


def _coo(rows, cols, vals, shape):
    # duplicates are summed; canonical CSR keeps assembly order-independent
    m = sp.coo_matrix((np.ravel(vals), (np.ravel(rows), np.ravel(cols))), shape=shape).tocsr()
    m.sum_duplicates()
    m.sort_indices()
    return m


def _element_pattern(triangles):
    rows = np.repeat(triangles, 3, axis=1)
    cols = np.tile(triangles, (1, 3))
    return rows, cols


def local_stiffness(coords) -> np.ndarray:
    """Element stiffness matrix ``int grad psi_i . grad psi_j`` on one triangle."""
    coords = np.asarray(coords, dtype=float)[None]
    g = barycentric_gradients(coords)[0]
    e1 = coords[0, 1] - coords[0, 0]
    e2 = coords[0, 2] - coords[0, 0]
    area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    return area * g @ g.T


def assemble_stiffness(mesh: Mesh, dofmap: DofMap | None = None) -> sp.csr_matrix:
    coords = mesh.element_coords()
    g = barycentric_gradients(coords)
    area = np.abs(mesh.areas())
    local = area[:, None, None] * np.einsum("eid,ejd->eij", g, g)
    rows, cols = _element_pattern(mesh.triangles)
    n = mesh.n_vertices
    return _coo(rows, cols, local.reshape(len(area), 9), (n, n))


def assemble_mass(mesh: Mesh, mask=None) -> sp.csr_matrix:
    """P1 mass matrix, restricted to the flagged elements when ``mask`` is given."""
    tris = mesh.triangles
    area = np.abs(mesh.areas())
    if mask is not None:
        tris = tris[mask]
        area = area[mask]
    local = area[:, None] * _P1_MASS.reshape(1, 9)
    rows, cols = _element_pattern(tris)
    n = mesh.n_vertices
    return _coo(rows, cols, local, (n, n))


def assemble_omega_mass(mesh: Mesh, dofmap: DofMap | None = None) -> sp.csr_matrix:
    return assemble_mass(mesh, mesh.omega_flags)


def assemble_jump(mesh: Mesh, dofmap: DofMap | None = None, h: float | None = None) -> sp.csr_matrix:
    """Gradient-jump penalty ``sum_F h^3 int_F [d_nu u][d_nu v]`` over interior faces."""
    h = mesh.h if h is None else h
    grads = barycentric_gradients(mesh.element_coords())
    left, right = mesh.face_elements[:, 0], mesh.face_elements[:, 1]
    nu = mesh.face_normals
    d = mesh.vertices[mesh.interior_faces[:, 1]] - mesh.vertices[mesh.interior_faces[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    # jump of the normal derivative, left minus right
    jl = np.einsum("fkd,fd->fk", grads[left], nu)
    jr = -np.einsum("fkd,fd->fk", grads[right], nu)
    dofs = np.hstack([mesh.triangles[left], mesh.triangles[right]])
    jv = np.hstack([jl, jr])
    local = (h**3 * length)[:, None, None] * jv[:, :, None] * jv[:, None, :]
    rows = np.repeat(dofs, 6, axis=1)
    cols = np.tile(dofs, (1, 6))
    n = mesh.n_vertices
    return _coo(rows, cols, local.reshape(len(length), 36), (n, n))


def jump_penalty(mesh: Mesh, u, h: float | None = None) -> float:
    """Value of the jump penalty at vertex values ``u``, summed face by face.

    Agrees with the quadratic form of :func:`assemble_jump` but avoids its
    cancellation, so affine fields give exactly-small values.
    """
    h = mesh.h if h is None else h
    u = np.asarray(u, dtype=float)
    grads = barycentric_gradients(mesh.element_coords())
    elem_grad = np.einsum("ekd,ek->ed", grads, u[mesh.triangles])
    left, right = mesh.face_elements[:, 0], mesh.face_elements[:, 1]
    jump = np.einsum("fd,fd->f", elem_grad[left] - elem_grad[right], mesh.face_normals)
    d = mesh.vertices[mesh.interior_faces[:, 1]] - mesh.vertices[mesh.interior_faces[:, 0]]
    return float(h**3 * np.sum(np.hypot(d[:, 0], d[:, 1]) * jump**2))


def assemble_boundary(mesh: Mesh):
    """P1 boundary mass and tangential stiffness over every boundary edge."""
    e = mesh.boundary_edges
    d = mesh.vertices[e[:, 1]] - mesh.vertices[e[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    mass = length[:, None] * (np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0).reshape(1, 4)
    stiff = (1.0 / length)[:, None] * np.array([[1.0, -1.0], [-1.0, 1.0]]).reshape(1, 4)
    rows = np.repeat(e, 2, axis=1)
    cols = np.tile(e, (1, 2))
    n = mesh.n_vertices
    return _coo(rows, cols, mass, (n, n)), _coo(rows, cols, stiff, (n, n))


def load_vector(g, mesh: Mesh, mask=None, rule: TriangleRule | None = None) -> np.ndarray:
    """``int g psi_i`` over all elements (or the flagged subset) for every vertex."""
    rule = rule or dunavant4()
    tris = mesh.triangles
    coords = mesh.element_coords()
    area = np.abs(mesh.areas())
    if mask is not None:
        tris, coords, area = tris[mask], coords[mask], area[mask]
    xq = rule.map(coords)
    gq = np.broadcast_to(np.asarray(g(xq[..., 0], xq[..., 1]), dtype=float), xq.shape[:-1])
    local = area[:, None] * ((gq * rule.weights) @ rule.points)
    return np.bincount(tris.ravel(), weights=local.ravel(), minlength=mesh.n_vertices)


def assemble_rhs(mesh: Mesh, dofmap: DofMap, q, f, n_modes: int, h: float | None = None):
    """Right-hand sides ``(rhs_u, rhs_y, rhs_z)``.

    The residual term pairing ``f`` with ``h^2 Laplace(v)`` vanishes for
    piecewise-linear ``v`` and is omitted.
    """
    h = mesh.h if h is None else h
    rhs_u = h**2 * load_vector(q, mesh, mesh.omega_flags)
    rhs_z = h**2 * load_vector(f, mesh)[dofmap.interior]
    return rhs_u, np.zeros(n_modes), rhs_z


@dataclass(frozen=True)
class FormMatrices:
    """Unscaled building blocks (the jump penalty already carries its ``h^3``)."""

    mesh: Mesh
    dofmap: DofMap
    basis: SineTraceBasis
    K: sp.csr_matrix
    M_omega: sp.csr_matrix
    J: sp.csr_matrix
    M_bnd: sp.csr_matrix
    K_bnd: sp.csr_matrix
    C_M: sp.csr_matrix
    C_K: sp.csr_matrix
    M_N: np.ndarray
    K_N: np.ndarray
    trace_modes: str = "interpolated"


@dataclass(frozen=True)
class ScaledForms:
    forms: FormMatrices
    h: float
    gamma: float
    A: sp.csr_matrix
    D_omega: sp.csr_matrix
    S: sp.csr_matrix
    B_uu: sp.csr_matrix
    B_uy: sp.csr_matrix
    B_yy: np.ndarray

    @property
    def mesh(self) -> Mesh:
        return self.forms.mesh

    @property
    def dofmap(self) -> DofMap:
        return self.forms.dofmap


def assemble_forms(mesh: Mesh, basis: SineTraceBasis, dofmap: DofMap | None = None,
                   trace_modes: str = "interpolated") -> FormMatrices:
    """Assemble every unscaled block.

    ``trace_modes`` selects how the trace modes enter the boundary form:
    ``"interpolated"`` uses their P1 boundary interpolants, ``"exact"``
    integrates the analytic modes against the P1 traces by Gauss quadrature.
    The exact variant leaves a mismatch of order ``h^5`` in the boundary form
    of the interpolated exact solution, which pollutes coarse-mesh results.
    """
    if trace_modes not in TRACE_MODES:
        raise ValueError(f"trace_modes must be one of {TRACE_MODES}, got {trace_modes!r}")
    dofmap = dofmap or DofMap.from_mesh(mesh)
    m_bnd, k_bnd = assemble_boundary(mesh)
    if trace_modes == "exact":
        c_m, c_k = coupling_blocks(basis, mesh)
        m_n, k_n = gram_matrices(basis, mesh)
    else:
        c_m, c_k, m_n, k_n = interpolated_blocks(basis, mesh, m_bnd, k_bnd)
    return FormMatrices(
        mesh=mesh,
        dofmap=dofmap,
        basis=basis,
        K=assemble_stiffness(mesh, dofmap),
        M_omega=assemble_omega_mass(mesh, dofmap),
        J=assemble_jump(mesh, dofmap),
        M_bnd=m_bnd,
        K_bnd=k_bnd,
        C_M=c_m,
        C_K=c_k,
        M_N=m_n,
        K_N=k_n,
        trace_modes=trace_modes,
    )


def scale_forms(forms: FormMatrices, gamma: float = 0.0) -> ScaledForms:
    if not np.isfinite(gamma) or gamma < 0:
        raise ValueError(f"gamma must be a non-negative number, got {gamma}")
    h = forms.mesh.h
    stab = (gamma * forms.J).tocsr()
    stab.eliminate_zeros()
    return ScaledForms(
        forms=forms,
        h=h,
        gamma=float(gamma),
        A=(h**2 * forms.K).tocsr(),
        D_omega=(h**2 * forms.M_omega).tocsr(),
        S=stab,
        B_uu=(h * forms.M_bnd + h**3 * forms.K_bnd).tocsr(),
        B_uy=(-(h * forms.C_M + h**3 * forms.C_K)).tocsr(),
        B_yy=h * forms.M_N + h**3 * forms.K_N,
    )
