"""Gaussian random fields on network x time designs: covariance assembly,
simulation, exact log-likelihood, and maximum-likelihood fitting.

A :class:`SpaceTimeDesign` pairs each network point with a time stamp.
Simulation draws ``y ~ Normal(0, Sigma + nugget*I)`` through a Cholesky
factor; draw ``rep`` of a run is a pure function of ``(seed, rep)``, so
replicates can be computed in any order or in parallel without changing
the output.  Fitting maximizes the exact Gaussian log-likelihood over
``(log sigma2, log c_S, log c_T)`` with a multi-start projected
Nelder-Mead simplex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky

from .errors import InvalidParamsError, NotPositiveDefiniteError
from .kernels import MODEL_SHORTCUTS, SpaceTimeKernel, gram
from .metrics import TIME_KINDS, distance_matrix
from .network import Network, PointOnNetwork, network_diameter
from .optimize import nelder_mead

#: relative jitter added to the diagonal on the single Cholesky retry
JITTER_SCALE = 1e-10

#: search box in natural-log space: sigma2, then c_S (times diameter D),
#: then c_T
LOG_SIGMA2_BOUNDS = (math.log(1e-6), math.log(1e3))
LOG_C_S_DIAM_FACTORS = (1e-3, 1e2)
LOG_C_T_BOUNDS = (math.log(1e-4), math.log(1e2))


@dataclass(frozen=True)
class SpaceTimeDesign:
    """Paired (point, time) observation rows on one network."""

    network: Network
    points: Tuple[PointOnNetwork, ...]
    times: np.ndarray
    time_kind: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if len(self.points) != times.size:
            raise InvalidParamsError(
                f"{len(self.points)} points but {times.size} times")
        if times.size == 0:
            raise InvalidParamsError("design must not be empty")
        if not np.all(np.isfinite(times)):
            raise InvalidParamsError("times must be finite")
        if self.time_kind not in TIME_KINDS:
            raise InvalidParamsError(f"time_kind must be one of {TIME_KINDS}")
        if self.time_kind == "circular" and not np.all(
                (times >= 0) & (times < 2 * np.pi)):
            raise InvalidParamsError("circular times must lie in [0, 2*pi)")

    @property
    def n(self) -> int:
        return self.times.size

    def distances(self, metric: str):
        return distance_matrix(self.network, self.points, metric)


@dataclass(frozen=True)
class SimSpec:
    """What to simulate: kernel, nugget variance, base seed."""

    kernel: SpaceTimeKernel
    nugget: float
    seed: int

    def __post_init__(self):
        if self.nugget < 0:
            raise InvalidParamsError("nugget must be nonnegative")


@dataclass(frozen=True)
class FitResult:
    """Maximum-likelihood estimates on the natural scale plus diagnostics."""

    sigma2: float
    c_S: float
    c_T: float
    loglik: float
    iterations: int
    converged: bool
    n_evals: int

    @property
    def estimates(self) -> Tuple[float, float, float]:
        return (self.sigma2, self.c_S, self.c_T)


def covariance_matrix(design: SpaceTimeDesign, kernel: SpaceTimeKernel,
                      nugget: float = 0.0) -> np.ndarray:
    """Gram matrix of the kernel over the design plus ``nugget`` on the
    diagonal."""
    if nugget < 0:
        raise InvalidParamsError("nugget must be nonnegative")
    if kernel.time != design.time_kind:
        raise InvalidParamsError(
            f"kernel time kind {kernel.time!r} does not match design "
            f"{design.time_kind!r}")
    dmat = design.distances(kernel.metric)
    cov = gram(kernel, dmat, design.times)
    if nugget:
        cov = cov + nugget * np.eye(design.n)
    return cov


def _chol_lower(cov: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with a single jittered retry."""
    try:
        return cholesky(cov, lower=True)
    except np.linalg.LinAlgError:
        pass
    jitter = JITTER_SCALE * np.trace(cov) / cov.shape[0]
    try:
        return cholesky(cov + jitter * np.eye(cov.shape[0]), lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"covariance matrix is not positive definite "
            f"(after one retry with jitter {jitter:g})") from exc


def simulate(design: SpaceTimeDesign, sim: SimSpec, n_reps: int) -> np.ndarray:
    """Draw ``n_reps`` zero-mean Gaussian vectors with covariance
    Sigma + nugget*I.

    Row ``rep`` depends only on ``(sim.seed, rep)``, never on ``n_reps``
    or evaluation order.
    """
    if n_reps < 1:
        raise InvalidParamsError("n_reps must be >= 1")
    cov = covariance_matrix(design, sim.kernel, sim.nugget)
    chol = _chol_lower(cov)
    draws = np.empty((n_reps, design.n))
    for rep in range(n_reps):
        rng = np.random.default_rng([sim.seed, rep])
        draws[rep] = chol @ rng.standard_normal(design.n)
    return draws


def loglik(design: SpaceTimeDesign, kernel: SpaceTimeKernel, nugget: float,
           y: np.ndarray) -> float:
    """Exact zero-mean Gaussian log-density of ``y`` under
    Sigma + nugget*I, via Cholesky (one jittered retry on failure)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (design.n,):
        raise InvalidParamsError(
            f"y has shape {y.shape}, expected ({design.n},)")
    cov = covariance_matrix(design, kernel, nugget)
    chol = _chol_lower(cov)
    alpha = np.linalg.solve(chol, y)
    logdet_half = float(np.log(np.diag(chol)).sum())
    return -0.5 * (design.n * math.log(2 * math.pi)
                   + 2.0 * logdet_half + float(alpha @ alpha))


ModelFamily = Union[str, Callable[[float, float, float], SpaceTimeKernel]]


def _resolve_family(model_family: ModelFamily):
    if callable(model_family):
        return model_family
    ctor = MODEL_SHORTCUTS.get(model_family)
    if ctor is None:
        raise InvalidParamsError(
            f"unknown model family {model_family!r}; expected one of "
            f"{sorted(MODEL_SHORTCUTS)} or a constructor "
            f"(sigma2, c_S, c_T) -> kernel")
    return ctor


def default_init(design: SpaceTimeDesign, y: np.ndarray,
                 nugget: float) -> Tuple[float, float, float]:
    """Data-driven starting point: moment-matched sigma2, quarter-diameter
    c_S, half-time-range c_T."""
    y = np.asarray(y, dtype=float)
    sigma2 = max(float(np.var(y)) - nugget, 1e-4)
    diam = network_diameter(design.network)
    c_s = diam / 4.0
    spread = float(design.times.max() - design.times.min())
    c_t = max(spread / 2.0, 1e-2)
    return (sigma2, c_s, c_t)


def fit(design: SpaceTimeDesign, model_family: ModelFamily, y: np.ndarray,
        nugget: float = 0.1, init: Tuple[float, float, float] = None,
        fatol: float = 1e-8, max_iter: int = 2000,
        n_starts: int = 3) -> FitResult:
    """Maximum-likelihood fit of (sigma2, c_S, c_T) for one model family.

    The search runs in natural-log space inside a fixed box (c_S bounds
    scale with the network diameter), from ``n_starts`` deterministic
    starting points: the initial guess and copies shifted by a factor of
    1.5 up and down.  A draw whose covariance fails to factorize scores
    -inf and the simplex moves away from it.  Non-convergence sets a flag;
    it is not an error.
    """
    y = np.asarray(y, dtype=float)
    ctor = _resolve_family(model_family)
    if init is None:
        init = default_init(design, y, nugget)
    if len(init) != 3 or any(v <= 0 for v in init):
        raise InvalidParamsError("init must be three positive values")

    diam = network_diameter(design.network)
    bounds = [LOG_SIGMA2_BOUNDS,
              (math.log(LOG_C_S_DIAM_FACTORS[0] * diam),
               math.log(LOG_C_S_DIAM_FACTORS[1] * diam)),
              LOG_C_T_BOUNDS]

    def objective(theta: np.ndarray) -> float:
        kernel = ctor(math.exp(theta[0]), math.exp(theta[1]),
                      math.exp(theta[2]))
        try:
            return -loglik(design, kernel, nugget, y)
        except NotPositiveDefiniteError:
            return np.inf

    theta0 = np.clip(np.log(np.asarray(init, dtype=float)),
                     [b[0] for b in bounds], [b[1] for b in bounds])
    shift = math.log(1.5)
    starts = [theta0]
    if n_starts >= 2:
        starts.append(np.clip(theta0 + shift, [b[0] for b in bounds],
                              [b[1] for b in bounds]))
    if n_starts >= 3:
        starts.append(np.clip(theta0 - shift, [b[0] for b in bounds],
                              [b[1] for b in bounds]))

    best = None
    for start in starts[:max(1, n_starts)]:
        result = nelder_mead(objective, start, bounds=bounds, fatol=fatol,
                             max_iter=max_iter)
        if best is None or result.fun < best.fun:
            best = result

    sigma2, c_s, c_t = (math.exp(v) for v in best.x)
    return FitResult(sigma2=sigma2, c_S=c_s, c_T=c_t, loglik=-best.fun,
                     iterations=best.iterations, converged=best.converged,
                     n_evals=best.n_evals)
