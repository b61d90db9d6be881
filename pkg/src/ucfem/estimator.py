"""A posteriori error estimator, triple norm and convergence diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .assembly import ScaledForms, jump_penalty
from .fe_space import FeFunction, error_norms, h2_norm
from .quadrature import EdgeRule, TriangleRule, dunavant4, gauss_legendre
from .system import Solution, project_trace


@dataclass(frozen=True)
class EstimatorBreakdown:
    data_term: float
    jump_term: float
    trace_term: float
    residual_term: float

    @property
    def total(self) -> float:
        return self.data_term + self.jump_term + self.trace_term + self.residual_term

    def as_dict(self) -> dict:
        d = asdict(self)
        d["total"] = self.total
        return d


@dataclass(frozen=True)
class TripleNorm:
    """Squared addends of the method's energy-type norm."""

    trace: float
    data: float
    stabilization: float
    multiplier: float

    @property
    def squared(self) -> float:
        return self.trace + self.data + self.stabilization + self.multiplier

    @property
    def value(self) -> float:
        return float(np.sqrt(self.squared))


def _quadratic(matrix, x) -> float:
    return float(x @ (matrix @ x))


def _l2_sq(g, mesh, mask=None, rule: TriangleRule | None = None) -> float:
    rule = rule or dunavant4()
    coords = mesh.element_coords()
    area = np.abs(mesh.areas())
    if mask is not None:
        coords, area = coords[mask], area[mask]
    xq = rule.map(coords)
    vals = np.broadcast_to(np.asarray(g(xq[..., 0], xq[..., 1]), dtype=float), xq.shape[:-1])
    return float(np.sum(area * (vals**2 @ rule.weights)))


def _omega_misfit_sq(u_h: FeFunction, q, rule: TriangleRule | None = None) -> float:
    rule = rule or dunavant4()
    mesh = u_h.mesh
    mask = mesh.omega_flags
    xq = rule.map(mesh.element_coords()[mask])
    qv = np.broadcast_to(np.asarray(q(xq[..., 0], xq[..., 1]), dtype=float), xq.shape[:-1])
    diff = u_h.at_quadrature(rule)[mask] - qv
    return float(np.sum(np.abs(mesh.areas()[mask]) * (diff**2 @ rule.weights)))


def compute_estimator(solution: Solution, scaled: ScaledForms, q, f) -> EstimatorBreakdown:
    """Computable bound on ``h ||u - u_h||_{H^1}`` (up to a constant).

    The trace term uses the solved mode coefficients, which are the
    boundary-form projection of the trace of ``u_h``.  For piecewise-linear
    ``u_h`` the elementwise Laplacian vanishes, leaving ``h^2 ||f||`` as the
    residual term.
    """
    h = scaled.h
    u = solution.u_h.coefficients
    y = solution.y
    forms = scaled.forms
    b_val = _quadratic(scaled.B_uu, u) + 2.0 * float(u @ (scaled.B_uy @ y)) + float(y @ scaled.B_yy @ y)
    return EstimatorBreakdown(
        data_term=float(h * np.sqrt(_omega_misfit_sq(solution.u_h, q))),
        jump_term=float(np.sqrt(jump_penalty(scaled.mesh, u, scaled.h))),
        trace_term=float(np.sqrt(max(b_val, 0.0))),
        residual_term=float(h**2 * np.sqrt(_l2_sq(f, scaled.mesh))),
    )


def triple_norm(scaled: ScaledForms, u: FeFunction, z: FeFunction) -> TripleNorm:
    """Triple norm of a pair of finite element functions.

    The stabilisation addend is the (unweighted) jump penalty; the Laplacian
    part vanishes on piecewise-linear functions.
    """
    uc = u.coefficients
    zc = z.coefficients
    y = project_trace(uc, scaled)
    trace = _quadratic(scaled.B_uu, uc) + 2.0 * uc @ (scaled.B_uy @ y) + y @ (scaled.B_yy @ y)
    return TripleNorm(
        trace=max(float(trace), 0.0),
        data=_quadratic(scaled.D_omega, uc),
        stabilization=jump_penalty(scaled.mesh, uc, scaled.h),
        multiplier=_quadratic(scaled.A, zc),
    )


def _boundary_trace_residual_sq(scaled: ScaledForms, exact, u_h: FeFunction,
                                rule: EdgeRule | None = None) -> float:
    """``min_y B(u - u_h - y, 0)`` over the analytic trace modes, by edge quadrature."""
    rule = rule or gauss_legendre()
    mesh = scaled.mesh
    basis = scaled.forms.basis
    h = scaled.h
    e = mesh.boundary_edges
    pa, pb = mesh.vertices[e[:, 0]], mesh.vertices[e[:, 1]]
    d = pb - pa
    length = np.hypot(d[:, 0], d[:, 1])
    tangent = d / length[:, None]
    t = rule.points[None, :]
    xq = pa[:, None, :] + t[..., None] * d[:, None, :]
    wq = rule.weights[None, :] * length[:, None]
    x, y = xq[..., 0], xq[..., 1]

    c = u_h.coefficients
    uh_val = c[e[:, 0], None] * (1.0 - t) + c[e[:, 1], None] * t
    uh_der = ((c[e[:, 1]] - c[e[:, 0]]) / length)[:, None]
    gx, gy = exact.gradient(x, y)
    err = exact.u(x, y) - uh_val
    err_der = gx * tangent[:, 0:1] + gy * tangent[:, 1:2] - uh_der

    on_top = (y == 1.0)
    phi = np.where(on_top[..., None], basis.values(x), 0.0)
    # +x orientation on the top edge; flip when the edge runs the other way
    sign = np.sign(tangent[:, 0])[:, None, None]
    dphi = np.where(on_top[..., None], sign * basis.derivatives(x), 0.0)

    gram = h * np.einsum("eq,eqn,eqm->nm", wq, phi, phi) + h**3 * np.einsum("eq,eqn,eqm->nm", wq, dphi, dphi)
    proj = h * np.einsum("eq,eq,eqn->n", wq, err, phi) + h**3 * np.einsum("eq,eq,eqn->n", wq, err_der, dphi)
    full = h * np.sum(wq * err**2) + h**3 * np.sum(wq * err_der**2)
    return float(max(full - proj @ np.linalg.solve(gram, proj), 0.0))


def triple_norm_error(solution: Solution, scaled: ScaledForms, exact) -> TripleNorm:
    """Triple norm of ``(u - u_h, z_h)`` for an analytic ``u`` with data ``exact.f``."""
    h = scaled.h
    mesh = scaled.mesh
    u_h = solution.u_h
    return TripleNorm(
        trace=_boundary_trace_residual_sq(scaled, exact, u_h),
        data=h**2 * _omega_misfit_sq(u_h, exact.u),
        stabilization=jump_penalty(mesh, u_h.coefficients, h) + h**4 * _l2_sq(exact.f, mesh),
        multiplier=_quadratic(scaled.A, solution.z_h.coefficients),
    )


def constant_ratio(exact, u_h: FeFunction) -> float:
    """``||u - u_h||_{H^1} / (h ||u||_{H^2})`` with the full ``H^2`` norm."""
    mesh = u_h.mesh
    norm2 = h2_norm(exact.u, exact.gradient, exact.hessian, mesh)
    if norm2 == 0.0:
        raise ValueError("the exact solution has zero H^2 norm")
    err = error_norms(exact.u, exact.gradient, u_h)[2]
    return err / (mesh.h * norm2)


def fit_rate(pairs, min_points: int = 3) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pairs must be a sequence of (h, error)")
    if len(arr) < min_points:
        raise ValueError(f"need at least {min_points} pairs, got {len(arr)}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError("h and error values must be positive and finite")
    lh, le = np.log(arr[:, 0]), np.log(arr[:, 1])
    if np.ptp(lh) == 0:
        raise ValueError("h values must not all coincide")
    slope, _ = np.polyfit(lh, le, 1)
    return float(slope)
