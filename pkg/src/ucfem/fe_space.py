"""Continuous piecewise-linear Lagrange space on a triangulation."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .mesh import Mesh
from .quadrature import TriangleRule, dunavant4


@dataclass(frozen=True)
class DofMap:
    """Vertex-based degrees of freedom.

    The interior DOFs span the homogeneous subspace (functions vanishing on
    the boundary).
    """

    n_dofs: int
    boundary: np.ndarray
    interior: np.ndarray
    cell_dofs: np.ndarray

    @classmethod
    def from_mesh(cls, mesh: Mesh) -> "DofMap":
        boundary = mesh.boundary_vertices()
        is_bnd = np.zeros(mesh.n_vertices, dtype=bool)
        is_bnd[boundary] = True
        return cls(
            n_dofs=mesh.n_vertices,
            boundary=boundary,
            interior=np.flatnonzero(~is_bnd),
            cell_dofs=mesh.triangles,
        )

    @property
    def n_interior(self) -> int:
        return len(self.interior)


def barycentric_gradients(coords: np.ndarray) -> np.ndarray:
    """Gradients of the three hat functions on each triangle, shape (n_el, 3, 2)."""
    e1 = coords[:, 1] - coords[:, 0]
    e2 = coords[:, 2] - coords[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    g1 = np.column_stack([e2[:, 1], -e2[:, 0]]) / det[:, None]
    g2 = np.column_stack([-e1[:, 1], e1[:, 0]]) / det[:, None]
    return np.stack([-g1 - g2, g1, g2], axis=1)


@dataclass(frozen=True, eq=False)
class FeFunction:
    """A P1 function given by its vertex values."""

    mesh: Mesh
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        if c.shape != (self.mesh.n_vertices,):
            raise ValueError(
                f"expected {self.mesh.n_vertices} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @cached_property
    def gradients(self) -> np.ndarray:
        """Constant gradient on every element, shape (n_triangles, 2)."""
        grads = barycentric_gradients(self.mesh.element_coords())
        local = self.coefficients[self.mesh.triangles]
        return np.einsum("ek,ekd->ed", local, grads)

    def element_gradient(self, triangle: int) -> np.ndarray:
        return self.gradients[triangle]

    def at_quadrature(self, rule: TriangleRule) -> np.ndarray:
        """Values at the rule's points on every element, shape (n_triangles, m)."""
        return self.coefficients[self.mesh.triangles] @ rule.points.T

    def __call__(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        tri = self.mesh.locate(points)
        coords = self.mesh.element_coords()[tri]
        lam = _barycentric(coords, points)
        return np.einsum("pk,pk->p", lam, self.coefficients[self.mesh.triangles[tri]])

    def __add__(self, other: "FeFunction") -> "FeFunction":
        return FeFunction(self.mesh, self.coefficients + other.coefficients)

    def __sub__(self, other: "FeFunction") -> "FeFunction":
        return FeFunction(self.mesh, self.coefficients - other.coefficients)

    def __mul__(self, scalar: float) -> "FeFunction":
        return FeFunction(self.mesh, scalar * self.coefficients)

    __rmul__ = __mul__


def _barycentric(coords: np.ndarray, points: np.ndarray) -> np.ndarray:
    e1 = coords[:, 1] - coords[:, 0]
    e2 = coords[:, 2] - coords[:, 0]
    r = points - coords[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    l1 = (r[:, 0] * e2[:, 1] - r[:, 1] * e2[:, 0]) / det
    l2 = (e1[:, 0] * r[:, 1] - e1[:, 1] * r[:, 0]) / det
    return np.column_stack([1.0 - l1 - l2, l1, l2])


def interpolate(g, mesh: Mesh) -> FeFunction:
    """Nodal interpolant of ``g(x, y)``."""
    v = mesh.vertices
    vals = np.broadcast_to(np.asarray(g(v[:, 0], v[:, 1]), dtype=float), (mesh.n_vertices,))
    if not np.all(np.isfinite(vals)):
        raise ValueError("interpolated field is not finite at every vertex")
    return FeFunction(mesh, vals)


def element_gradient(u: FeFunction, triangle: int) -> np.ndarray:
    return u.element_gradient(triangle)


def error_norms(u_exact, grad_exact, u_h: FeFunction, rule: TriangleRule | None = None):
    """L2, H1-seminorm and H1 errors between an analytic field and ``u_h``.

    ``grad_exact(x, y)`` returns the pair ``(du/dx, du/dy)``.
    """
    rule = rule or dunavant4()
    mesh = u_h.mesh
    xq = rule.map(mesh.element_coords())
    x, y = xq[..., 0], xq[..., 1]
    area = np.abs(mesh.areas())
    diff = np.asarray(u_exact(x, y)) - u_h.at_quadrature(rule)
    gx, gy = grad_exact(x, y)
    dgx = np.asarray(gx) - u_h.gradients[:, 0:1]
    dgy = np.asarray(gy) - u_h.gradients[:, 1:2]
    l2_sq = np.sum(area * (diff**2 @ rule.weights))
    semi_sq = np.sum(area * ((dgx**2 + dgy**2) @ rule.weights))
    return float(np.sqrt(l2_sq)), float(np.sqrt(semi_sq)), float(np.sqrt(l2_sq + semi_sq))


def _sq_integral(mesh, rule, *fields):
    xq = rule.map(mesh.element_coords())
    x, y = xq[..., 0], xq[..., 1]
    area = np.abs(mesh.areas())
    total = 0.0
    for f in fields:
        total += np.sum(area * (np.broadcast_to(np.asarray(f(x, y), dtype=float), x.shape) ** 2
                                @ rule.weights))
    return float(total)


def h2_seminorm(hessian, mesh: Mesh, rule: TriangleRule | None = None) -> float:
    """``|u|_{H^2}`` from ``hessian(x, y) -> (uxx, uxy, uyy)``; the mixed term counts twice."""
    rule = rule or dunavant4()
    xq = rule.map(mesh.element_coords())
    x, y = xq[..., 0], xq[..., 1]
    uxx, uxy, uyy = (np.broadcast_to(np.asarray(c, dtype=float), x.shape) for c in hessian(x, y))
    area = np.abs(mesh.areas())
    return float(np.sqrt(np.sum(area * ((uxx**2 + 2 * uxy**2 + uyy**2) @ rule.weights))))


def h2_norm(u, gradient, hessian, mesh: Mesh, rule: TriangleRule | None = None) -> float:
    """Full ``H^2`` norm of an analytic field by quadrature."""
    rule = rule or dunavant4()
    l2 = _sq_integral(mesh, rule, u)
    h1 = _sq_integral(mesh, rule, lambda x, y: gradient(x, y)[0], lambda x, y: gradient(x, y)[1])
    semi2 = h2_seminorm(hessian, mesh, rule) ** 2
    return float(np.sqrt(l2 + h1 + semi2))
