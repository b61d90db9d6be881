"""Input validation shared by the estimator and the experiment harness."""
from __future__ import annotations

import numbers
import warnings

import numpy as np
from sklearn.utils import check_array


def check_mesh_size(n, name: str = "n") -> int:
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {n!r}")
    if n < 2:
        raise ValueError(f"{name} must be at least 2, got {n}")
    if n % 20:
        warnings.warn(
            f"{name}={n} is not a multiple of 20; the observation region is only "
            "approximated by whole elements", stacklevel=3)
    return int(n)


def check_mesh_sizes(n_list) -> list[int]:
    sizes = [check_mesh_size(n, "mesh size") for n in n_list]
    if not sizes:
        raise ValueError("at least one mesh size is required")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"mesh sizes must be strictly increasing, got {sizes}")
    return sizes


def check_n_modes(N) -> int:
    if isinstance(N, bool) or not isinstance(N, numbers.Integral) or N < 1:
        raise ValueError(f"the trace dimension must be a positive integer, got {N!r}")
    return int(N)


def check_gamma(gamma) -> float:
    try:
        g = float(gamma)
    except (TypeError, ValueError):
        raise ValueError(f"gamma must be a real number, got {gamma!r}") from None
    if not np.isfinite(g) or g < 0:
        raise ValueError(f"gamma must be finite and non-negative, got {gamma!r}")
    return g


def check_field(field, name: str):
    """Accept a callable ``f(x, y)`` or a constant and return a callable."""
    if field is None:
        return lambda x, y: np.zeros(np.shape(x))
    if callable(field):
        return field
    if isinstance(field, numbers.Real):
        value = float(field)
        return lambda x, y: np.full(np.shape(x), value)
    raise TypeError(f"{name} must be callable or a real constant, got {type(field).__name__}")


def check_points(X) -> np.ndarray:
    """Points of the unit square as an (n_samples, 2) float array."""
    X = check_array(X, dtype=np.float64)
    if X.shape[1] != 2:
        raise ValueError(f"expected points with 2 coordinates, got {X.shape[1]}")
    if np.any(X < 0.0) or np.any(X > 1.0):
        raise ValueError("points must lie in the closed unit square")
    return X
