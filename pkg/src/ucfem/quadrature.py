"""Quadrature rules on triangles and boundary edges."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class TriangleRule:
    """Rule on a triangle in barycentric form.

    Weights sum to one; the integral over a triangle ``K`` is approximated by
    ``|K| * sum(w * f(points))``.
    """

    points: np.ndarray  # (m, 3) barycentric coordinates
    weights: np.ndarray  # (m,)
    degree: int

    def map(self, coords: np.ndarray) -> np.ndarray:
        """Physical quadrature points for triangles ``coords`` of shape (..., 3, 2)."""
        return np.einsum("qk,...kd->...qd", self.points, coords)


@dataclass(frozen=True)
class EdgeRule:
    """Gauss-Legendre rule on ``[0, 1]`` with weights summing to one."""

    points: np.ndarray
    weights: np.ndarray

    @property
    def degree(self) -> int:
        return 2 * len(self.points) - 1


@lru_cache(maxsize=None)
def dunavant4() -> TriangleRule:
    """Symmetric six-point rule exact for polynomials of degree four."""
    s = np.sqrt
    r = s(38.0 - 44.0 * s(2.0 / 5.0))
    a1 = (8.0 - s(10.0) + r) / 18.0
    a2 = (8.0 - s(10.0) - r) / 18.0
    q = s(213125.0 - 53320.0 * s(10.0))
    w1 = (620.0 + q) / 3720.0
    w2 = (620.0 - q) / 3720.0
    pts, wts = [], []
    for a, w in ((a1, w1), (a2, w2)):
        b = 1.0 - 2.0 * a
        pts += [(b, a, a), (a, b, a), (a, a, b)]
        wts += [w, w, w]
    return TriangleRule(np.array(pts), np.array(wts), degree=4)


@lru_cache(maxsize=None)
def gauss_legendre(m: int = 10) -> EdgeRule:
    if m < 1:
        raise ValueError("m must be positive")
    x, w = np.polynomial.legendre.leggauss(m)
    return EdgeRule(0.5 * (x + 1.0), 0.5 * w)


def integrate_triangle(f, triangle, rule: TriangleRule | None = None) -> float:
    """Approximate the integral of ``f(x, y)`` over one triangle (3x2 vertex array)."""
    rule = rule or dunavant4()
    triangle = np.asarray(triangle, dtype=float)
    e1 = triangle[1] - triangle[0]
    e2 = triangle[2] - triangle[0]
    area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    xq = rule.map(triangle)
    return float(area * np.dot(rule.weights, f(xq[:, 0], xq[:, 1])))


def integrate_mesh(f, mesh, rule: TriangleRule | None = None, mask=None) -> float:
    """Sum of triangle integrals of ``f`` over the mesh (optionally a subset)."""
    return float(np.sum(element_integrals(f, mesh, rule, mask)))


def element_integrals(f, mesh, rule: TriangleRule | None = None, mask=None) -> np.ndarray:
    rule = rule or dunavant4()
    coords = mesh.element_coords()
    areas = np.abs(mesh.areas())
    if mask is not None:
        coords = coords[mask]
        areas = areas[mask]
    xq = rule.map(coords)
    vals = f(xq[..., 0], xq[..., 1])
    return areas * (np.asarray(vals) * rule.weights).sum(axis=-1)


def integrate_edge(f, edge, rule: EdgeRule | None = None) -> float:
    """Line integral of ``f(x, y)`` over the segment ``edge`` (2x2 endpoint array)."""
    rule = rule or gauss_legendre()
    edge = np.asarray(edge, dtype=float)
    length = np.hypot(*(edge[1] - edge[0]))
    x = edge[0] + rule.points[:, None] * (edge[1] - edge[0])
    return float(length * np.dot(rule.weights, f(x[:, 0], x[:, 1])))
