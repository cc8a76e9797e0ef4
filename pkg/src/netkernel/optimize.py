"""Derivative-free minimization: Nelder-Mead simplex with box projection.

Small and self-contained so the fitting code controls the exact
termination rule (simplex function spread below ``fatol``, or the
iteration cap) and stays deterministic: no randomness, candidate points
are clipped into the feasible box before evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError

#: standard simplex coefficients: reflection, expansion, contraction, shrink
_RHO, _CHI, _PSI, _SIGMA = 1.0, 2.0, 0.5, 0.5


@dataclass(frozen=True)
class OptimizeResult:
    """Best point found, its value, and how the run ended."""

    x: np.ndarray
    fun: float
    iterations: int
    n_evals: int
    converged: bool


def nelder_mead(func, x0, bounds=None, fatol: float = 1e-8,
                max_iter: int = 2000, initial_step: float = 0.25,
                xatol: float = 1e-6) -> OptimizeResult:
    """Minimize ``func`` from ``x0`` with a projected Nelder-Mead simplex.

    ``bounds`` is an optional sequence of (lo, hi) pairs; every candidate
    is clipped into the box before evaluation.  The run converges when the
    spread max(f) - min(f) over the simplex drops below ``fatol`` and the
    simplex has collapsed to within ``xatol`` per coordinate (the second
    condition guards against f-ties across a still-wide simplex, e.g. a
    symmetric pair straddling a 1-d minimum); otherwise it stops at
    ``max_iter`` iterations with ``converged=False``.  ``func`` may return
    +inf to reject a region.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    if n == 0:
        raise InvalidParamsError("x0 must have at least one coordinate")
    if bounds is None:
        lo = np.full(n, -np.inf)
        hi = np.full(n, np.inf)
    else:
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
        if lo.size != n or np.any(lo > hi):
            raise InvalidParamsError("bounds must be (lo, hi) pairs, lo <= hi")

    def clip(x):
        return np.minimum(np.maximum(x, lo), hi)

    evals = 0

    def call(x):
        nonlocal evals
        evals += 1
        return float(func(x))

    simplex = [clip(x0)]
    for i in range(n):
        p = simplex[0].copy()
        step = initial_step if p[i] + initial_step <= hi[i] else -initial_step
        p[i] = np.clip(p[i] + step, lo[i], hi[i])
        simplex.append(p)
    simplex = np.array(simplex)
    values = np.array([call(p) for p in simplex])

    iterations = 0
    converged = False
    while iterations < max_iter:
        order = np.argsort(values, kind="stable")
        simplex = simplex[order]
        values = values[order]
        spread = values[-1] - values[0]
        width = float(np.max(np.abs(simplex - simplex[0])))
        if np.isfinite(spread) and spread < fatol and width < xatol:
            converged = True
            break
        iterations += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = clip(centroid + _RHO * (centroid - worst))
        f_reflected = call(reflected)
        if f_reflected < values[0]:
            expanded = clip(centroid + _CHI * (centroid - worst))
            f_expanded = call(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        else:
            if f_reflected < values[-1]:
                contracted = clip(centroid + _PSI * (centroid - worst))
            else:
                contracted = clip(centroid - _PSI * (centroid - worst))
            f_contracted = call(contracted)
            if f_contracted < min(f_reflected, values[-1]):
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                best = simplex[0]
                for k in range(1, n + 1):
                    simplex[k] = clip(best + _SIGMA * (simplex[k] - best))
                    values[k] = call(simplex[k])

    best = int(np.argmin(values))
    return OptimizeResult(x=simplex[best].copy(), fun=float(values[best]),
                          iterations=iterations, n_evals=evals,
                          converged=converged)
