"""Structured triangulations of the unit square.

Each of the ``n x n`` grid cells is split along the diagonal running from its
lower-left to its upper-right corner.  Vertex ``(i, j)`` (column ``i``, row
``j``) has global index ``j * (n + 1) + i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TOP = "Top"
OTHER = "Other"

OMEGA_X_LEFT = 0.1
OMEGA_X_RIGHT = 0.9
OMEGA_Y_BOTTOM = 0.25


def in_omega(x, y):
    """Indicator of the observation region touching left, bottom and right sides."""
    x = np.asarray(x)
    y = np.asarray(y)
    return (x < OMEGA_X_LEFT) | (x > OMEGA_X_RIGHT) | (y < OMEGA_Y_BOTTOM)


@dataclass(frozen=True)
class Mesh:
    """Immutable triangulation with face and boundary bookkeeping.

    Attributes
    ----------
    n : int
        Number of subdivisions per side.
    vertices : ndarray, shape (n_vertices, 2)
    triangles : ndarray, shape (n_triangles, 3)
        Vertex indices in counter-clockwise order.
    interior_faces : ndarray, shape (n_faces, 2)
        Vertex pairs of interior edges.
    face_elements : ndarray, shape (n_faces, 2)
        ``(left, right)`` element indices for each interior face.
    face_normals : ndarray, shape (n_faces, 2)
        Unit normals pointing from the left to the right element.
    boundary_edges : ndarray, shape (n_boundary, 2)
        Vertex pairs, oriented counter-clockwise around the square.
    boundary_elements : ndarray, shape (n_boundary,)
    boundary_tags : tuple of str
        ``"Top"`` or ``"Other"`` for each boundary edge.
    omega_flags : ndarray of bool, shape (n_triangles,)
    """

    n: int
    vertices: np.ndarray
    triangles: np.ndarray
    interior_faces: np.ndarray
    face_elements: np.ndarray
    face_normals: np.ndarray
    boundary_edges: np.ndarray
    boundary_elements: np.ndarray
    boundary_tags: tuple
    omega_flags: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        """Maximum element diameter."""
        return float(np.sqrt(2.0) / self.n)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def element_coords(self) -> np.ndarray:
        """Vertex coordinates per triangle, shape (n_triangles, 3, 2)."""
        return self.vertices[self.triangles]

    def areas(self) -> np.ndarray:
        """Signed areas of all triangles."""
        p = self.element_coords()
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def barycenters(self) -> np.ndarray:
        return self.element_coords().mean(axis=1)

    def top_edge_mask(self) -> np.ndarray:
        return np.array([tag == TOP for tag in self.boundary_tags], dtype=bool)

    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_edges)

    def locate(self, points) -> np.ndarray:
        """Index of a triangle containing each point (closed unit square)."""
        points = np.asarray(points, dtype=float)
        n = self.n
        i = np.clip(np.floor(points[:, 0] * n).astype(int), 0, n - 1)
        j = np.clip(np.floor(points[:, 1] * n).astype(int), 0, n - 1)
        fx = points[:, 0] * n - i
        fy = points[:, 1] * n - j
        upper = fy > fx
        return 2 * (j * n + i) + upper.astype(int)


def classify_omega(mesh: Mesh) -> np.ndarray:
    """Flag triangles whose barycenter lies in the observation region.

    Classification is exact when ``n`` is a multiple of 20, since the region
    boundaries then coincide with grid lines.
    """
    c = mesh.barycenters()
    return np.asarray(in_omega(c[:, 0], c[:, 1]), dtype=bool)


def build_structured_mesh(n: int) -> Mesh:
    """Uniform diagonal-split triangulation of ``[0, 1]^2`` with ``n`` cells per side."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")

    ticks = np.arange(n + 1) / n
    xx, yy = np.meshgrid(ticks, ticks)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    jj, ii = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    ii = ii.ravel()
    jj = jj.ravel()
    v00 = vid(ii, jj)
    v10 = vid(ii + 1, jj)
    v11 = vid(ii + 1, jj + 1)
    v01 = vid(ii, jj + 1)
    # cell k -> lower triangle 2k, upper triangle 2k + 1
    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    triangles[0::2] = np.column_stack([v00, v10, v11])
    triangles[1::2] = np.column_stack([v00, v11, v01])

    # local edge k of a triangle is opposite local vertex k
    local = np.array([[1, 2], [2, 0], [0, 1]])
    half = triangles[:, local].reshape(-1, 2)
    owner = np.repeat(np.arange(triangles.shape[0]), 3)
    opposite = triangles.reshape(-1)
    key = np.sort(half, axis=1)
    order = np.lexsort((owner, key[:, 1], key[:, 0]))
    key, half, owner, opposite = key[order], half[order], owner[order], opposite[order]
    _, first, counts = np.unique(key, axis=0, return_index=True, return_counts=True)

    shared = first[counts == 2]
    faces = key[shared]
    face_elements = np.column_stack([owner[shared], owner[shared + 1]])
    d = vertices[faces[:, 1]] - vertices[faces[:, 0]]
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / np.hypot(d[:, 0], d[:, 1])[:, None]
    to_opp = vertices[opposite[shared]] - vertices[faces[:, 0]]
    flip = np.einsum("ij,ij->i", normals, to_opp) > 0
    normals[flip] *= -1.0

    single = first[counts == 1]
    # half-edges keep the counter-clockwise orientation of their triangle
    bnd = half[single]
    bnd_elem = owner[single]
    on_top = (vertices[bnd[:, 0], 1] == 1.0) & (vertices[bnd[:, 1], 1] == 1.0)
    tags = tuple(TOP if t else OTHER for t in on_top)

    mesh = Mesh(
        n=n,
        vertices=vertices,
        triangles=triangles,
        interior_faces=faces,
        face_elements=face_elements,
        face_normals=normals,
        boundary_edges=bnd,
        boundary_elements=bnd_elem,
        boundary_tags=tags,
        omega_flags=np.zeros(2 * n * n, dtype=bool),
    )
    object.__setattr__(mesh, "omega_flags", classify_omega(mesh))
    for arr in (mesh.vertices, mesh.triangles, mesh.interior_faces, mesh.face_elements,
                mesh.face_normals, mesh.boundary_edges, mesh.boundary_elements, mesh.omega_flags):
        arr.setflags(write=False)
    return mesh


def boundary_tangent(mesh: Mesh, edge) -> np.ndarray:
    """Unit tangent of a boundary edge; ``(1, 0)`` on the top edge.

    ``edge`` is either an index into ``mesh.boundary_edges`` or a vertex pair.
    Side edges are oriented towards increasing coordinate.
    """
    if np.ndim(edge) == 0:
        a, b = mesh.boundary_edges[int(edge)]
    else:
        a, b = (int(v) for v in edge)
        key = {a, b}
        if not any(set(e) == key for e in mesh.boundary_edges.tolist()):
            raise ValueError(f"({a}, {b}) is not a boundary edge")
    d = mesh.vertices[b] - mesh.vertices[a]
    d = d / np.hypot(*d)
    # orient along +x / +y
    if d[0] < 0 or (d[0] == 0 and d[1] < 0):
        d = -d
    return d
