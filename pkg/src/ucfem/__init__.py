"""Stabilised finite elements for unique continuation with a finite-dimensional trace space."""
from .assembly import assemble_forms, scale_forms
from .estimator import compute_estimator, constant_ratio, fit_rate, triple_norm
from .fe_space import DofMap, FeFunction, interpolate
from .manufactured import manufactured
from .mesh import build_structured_mesh
from .model import UniqueContinuationFEM
from .system import SolverError, build_system, solve
from .trace_space import SineTraceBasis

__all__ = [
    "DofMap", "FeFunction", "SineTraceBasis", "SolverError", "UniqueContinuationFEM",
    "assemble_forms", "build_structured_mesh", "build_system", "compute_estimator",
    "constant_ratio", "fit_rate", "interpolate", "manufactured", "scale_forms", "solve",
    "triple_norm",
]
__version__ = "0.1.0"
