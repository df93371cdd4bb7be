"""Two-phase search helpers: grid sweeps plus derivative-free refinement.

All solvers use the same recipe: evaluate an objective on an antipodally
symmetric grid, pick the best node (ties broken lexicographically by node
coordinates, for determinism), then polish with a simplex-reflection
(Nelder-Mead) cascade under a fixed evaluation budget.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

REFINE_BUDGET = 500


def argbest(values: np.ndarray, nodes: np.ndarray) -> int:
    """Index of the minimal value; exact ties broken by lexicographic node order."""
    values = np.asarray(values, dtype=float)
    best = np.min(values)
    tied = np.flatnonzero(values == best)
    if tied.size == 1:
        return int(tied[0])
    coords = np.asarray(nodes, dtype=float)[tied].reshape(tied.size, -1)
    order = np.lexsort(coords.T[::-1])
    return int(tied[order[0]])


def refine(fun, x0, scale: float = 0.25, budget: int = REFINE_BUDGET,
           cascade: int = 3) -> tuple[np.ndarray, float]:
    """Nelder-Mead polish with restarts at shrinking initial simplex sizes."""
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    fx = float(fun(x))
    step = scale
    for _ in range(cascade):
        res = minimize(fun, x, method="Nelder-Mead",
                       options={"maxfev": budget, "xatol": 1e-14, "fatol": 1e-16,
                                "initial_simplex": _simplex_around(x, step)})
        if res.fun < fx:
            x, fx = np.atleast_1d(res.x), float(res.fun)
        step *= 1e-2
    return x, fx


def _simplex_around(x: np.ndarray, step: float) -> np.ndarray:
    d = x.size
    simplex = np.tile(x, (d + 1, 1))
    for i in range(d):
        simplex[i + 1, i] += step if x[i] == 0.0 else step * max(1.0, abs(x[i]))
    return simplex


def refine_on_sphere(fun, x0, scale: float = 0.2, budget: int = REFINE_BUDGET,
                     cascade: int = 3) -> tuple[np.ndarray, float]:
    """Minimize f over the unit sphere; ambient coordinates, renormalized."""

    def lifted(z):
        nz = np.linalg.norm(z)
        if nz < 1e-9:
            return np.inf
        return fun(z / nz)

    z, _ = refine(lifted, np.asarray(x0, dtype=float), scale=scale,
                  budget=budget, cascade=cascade)
    z = z / np.linalg.norm(z)
    return z, float(fun(z))


def refine_sphere_product(fun, x0, extra0, scale: float = 0.2,
                          budget: int = REFINE_BUDGET, cascade: int = 3):
    """Minimize f(direction, extras) jointly; direction lives on the sphere."""
    x0 = np.asarray(x0, dtype=float)
    extra0 = np.atleast_1d(np.asarray(extra0, dtype=float))
    d = x0.size

    def lifted(z):
        nz = np.linalg.norm(z[:d])
        if nz < 1e-9:
            return np.inf
        return fun(z[:d] / nz, z[d:])

    z, _ = refine(lifted, np.concatenate([x0, extra0]), scale=scale,
                  budget=budget, cascade=cascade)
    v = z[:d] / np.linalg.norm(z[:d])
    return v, z[d:], float(fun(v, z[d:]))
