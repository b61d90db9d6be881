"""Seeded smooth perturbations of the observation data."""
from __future__ import annotations

import numpy as np

from .mesh import Mesh, build_structured_mesh
from .quadrature import dunavant4

N_FOURIER = 8
REFERENCE_N = 80


def _l2_omega(g, mesh: Mesh) -> float:
    rule = dunavant4()
    mask = mesh.omega_flags
    xq = rule.map(mesh.element_coords()[mask])
    vals = g(xq[..., 0], xq[..., 1])
    return float(np.sqrt(np.sum(np.abs(mesh.areas()[mask]) * (vals**2 @ rule.weights))))


def noise_field(delta: float, seed: int, mesh: Mesh | None = None):
    """Cosine series with ``8 x 8`` uniform random coefficients, scaled to ``||.||_{L2(omega)} = delta``.

    The norm is measured by quadrature on ``mesh`` (an aligned ``n = 80``
    mesh by default).
    """
    if not np.isfinite(delta) or delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if delta == 0:
        return lambda x, y: np.zeros(np.shape(x))
    rng = np.random.default_rng(seed)
    coef = rng.uniform(-1.0, 1.0, size=(N_FOURIER, N_FOURIER))
    k = np.arange(N_FOURIER) * np.pi

    def raw(x, y):
        x = np.asarray(x, dtype=float)[..., None]
        y = np.asarray(y, dtype=float)[..., None]
        cx = np.cos(k * x)
        cy = np.cos(k * y)
        return np.einsum("...j,jk,...k->...", cx, coef, cy)

    mesh = mesh or build_structured_mesh(REFERENCE_N)
    scale = delta / _l2_omega(raw, mesh)
    return lambda x, y: scale * raw(x, y)


def add_noise(q, delta: float, seed: int = 0, mesh: Mesh | None = None):
    """Return ``q + q_delta`` with a seeded smooth ``q_delta`` of norm ``delta`` on the observed region."""
    if delta == 0:
        return q
    q_delta = noise_field(delta, seed, mesh)
    return lambda x, y: q(x, y) + q_delta(x, y)
