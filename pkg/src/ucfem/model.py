"""Estimator-style front end for the unique continuation solver."""
from __future__ import annotations

from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from . import _validation as val
from .assembly import TRACE_MODES, assemble_forms, assemble_rhs, scale_forms
from .estimator import compute_estimator
from .mesh import build_structured_mesh
from .system import build_system, solve
from .trace_space import SineTraceBasis


class UniqueContinuationFEM(RegressorMixin, BaseEstimator):
    """Stabilised finite element reconstruction of a Poisson solution.

    ``fit`` takes the observation ``q`` on the region touching the left,
    bottom and right sides of the unit square and the source ``f``, and
    solves for a P1 field whose top-edge trace is close to the span of
    ``n_modes`` sine modes.  ``predict`` evaluates the reconstruction.

    Parameters
    ----------
    n : int, default=40
        Cells per side of the structured mesh.
    n_modes : int, default=5
        Dimension of the trace space.
    gamma : float, default=0.0
        Weight of the gradient-jump stabiliser.
    trace_modes : {"interpolated", "exact"}, default="interpolated"
        How the sine modes enter the boundary form.

    Attributes
    ----------
    mesh_, scaled_forms_, system_, solution_
        Intermediate objects of the last fit.
    u_h_, z_h_ : FeFunction
        Reconstruction and Lagrange multiplier.
    y_ : ndarray of shape (n_modes,)
        Mode coefficients of the projected trace.
    estimate_ : EstimatorBreakdown
        A posteriori error estimator.
    """

    def __init__(self, n=40, n_modes=5, gamma=0.0, trace_modes="interpolated"):
        self.n = n
        self.n_modes = n_modes
        self.gamma = gamma
        self.trace_modes = trace_modes

    def _validate(self):
        if self.trace_modes not in TRACE_MODES:
            raise ValueError(f"trace_modes must be one of {TRACE_MODES}, got {self.trace_modes!r}")
        return (val.check_mesh_size(self.n), val.check_n_modes(self.n_modes),
                val.check_gamma(self.gamma))

    def fit(self, q, f=None):
        """Solve with observation ``q`` and source ``f`` (callables of ``x, y`` or constants)."""
        n, n_modes, gamma = self._validate()
        q = val.check_field(q, "q")
        f = val.check_field(f, "f")
        mesh = build_structured_mesh(n)
        forms = assemble_forms(mesh, SineTraceBasis(n_modes), trace_modes=self.trace_modes)
        scaled = scale_forms(forms, gamma)
        system = build_system(scaled, assemble_rhs(mesh, forms.dofmap, q, f, n_modes))
        solution = solve(system)

        self.mesh_ = mesh
        self.h_ = mesh.h
        self.scaled_forms_ = scaled
        self.system_ = system
        self.solution_ = solution
        self.u_h_ = solution.u_h
        self.z_h_ = solution.z_h
        self.y_ = solution.y
        self.estimate_ = compute_estimator(solution, scaled, q, f)
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        """Evaluate the reconstruction at points ``X`` of shape (n_samples, 2)."""
        check_is_fitted(self, "u_h_")
        return self.u_h_(val.check_points(X))

    def trace(self, x):
        """Projected top-edge trace ``sum_k y_k phi_k`` at abscissae ``x``."""
        check_is_fitted(self, "y_")
        return SineTraceBasis(len(self.y_)).evaluate(self.y_, x)
