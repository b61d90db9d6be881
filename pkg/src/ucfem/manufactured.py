"""Closed-form test solutions ``y sin(k pi x)`` and their combinations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ManufacturedSolution:
    """Sum of terms ``c * y * sin(k pi x)`` with derived data.

    Every term is harmonic in ``y`` direction only, so ``-Laplace(u)`` is
    ``sum c (k pi)^2 y sin(k pi x)``.  The trace vanishes on the bottom, left
    and right sides and equals ``sum c sin(k pi x)`` on the top edge.
    """

    name: str
    terms: tuple  # ((coefficient, wavenumber), ...)

    def u(self, x, y):
        return sum(c * y * np.sin(k * np.pi * x) for c, k in self.terms)

    def gradient(self, x, y):
        ux = sum(c * k * np.pi * y * np.cos(k * np.pi * x) for c, k in self.terms)
        uy = sum(c * np.sin(k * np.pi * x) for c, k in self.terms)
        return ux, uy

    def hessian(self, x, y):
        uxx = sum(-c * (k * np.pi) ** 2 * y * np.sin(k * np.pi * x) for c, k in self.terms)
        uxy = sum(c * k * np.pi * np.cos(k * np.pi * x) for c, k in self.terms)
        uyy = 0.0 * np.asarray(x)
        return uxx, uxy, uyy

    def f(self, x, y):
        """Source ``-Laplace(u)``."""
        return sum(c * (k * np.pi) ** 2 * y * np.sin(k * np.pi * x) for c, k in self.terms)

    def q(self, x, y):
        """Observation data (the solution itself, used on the observed region)."""
        return self.u(x, y)

    def trace_coefficients(self, n_modes: int) -> np.ndarray:
        """Coefficients of the top-edge trace in the basis ``sqrt(2) sin(k pi x)``.

        Modes beyond ``n_modes`` are dropped, so the result is exact only when
        every wavenumber is at most ``n_modes``.
        """
        coef = np.zeros(n_modes)
        for c, k in self.terms:
            if k <= n_modes:
                coef[k - 1] += c / np.sqrt(2.0)
        return coef

    @property
    def max_wavenumber(self) -> int:
        return max(k for _, k in self.terms)


SOLUTION_IDS = ("simple", "perturbed", "modeN")


def manufactured(solution_id: str, N: int | None = None) -> ManufacturedSolution:
    """Look up a test solution.

    ``"simple"`` is ``y sin(pi x)``, ``"perturbed"`` adds ``y sin(2 pi x) / 100``
    and ``"modeN"`` is ``y sin(N pi x)``.
    """
    if solution_id == "simple":
        return ManufacturedSolution("simple", ((1.0, 1),))
    if solution_id == "perturbed":
        return ManufacturedSolution("perturbed", ((1.0, 1), (0.01, 2)))
    if solution_id == "modeN":
        if N is None or int(N) < 1:
            raise ValueError("modeN requires a positive N")
        return ManufacturedSolution(f"mode{int(N)}", ((1.0, int(N)),))
    raise ValueError(f"unknown solution id {solution_id!r}; expected one of {SOLUTION_IDS}")
