"""Empirical positive-definiteness auditing for kernels on networks.

``audit`` samples random space-time designs, assembles the Gram matrix,
and inspects the full symmetric eigenspectrum.  The figure of merit is
``min eigenvalue / max |eigenvalue|`` — a scale-free ratio, so verdicts
are invariant under rescaling the kernel variance.  A kernel passes when
that ratio never drops below ``-rel_tol`` over all trials.

``counterexample_search`` is the adversarial companion: randomized
restarts plus greedy perturbation of point offsets and times, minimizing
the smallest eigenvalue.  A negative find certifies non-positive-
definiteness (the found configuration is re-verified before reporting); a
null find is inconclusive.

Both accept either a kernel object or a raw callable ``f(D, U) ->
covariance`` (useful for injecting deliberately broken pseudo-kernels into
the harness).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidParamsError
from .metrics import distance_matrix, temporal_separation
from .network import Network, PointOnNetwork, sample_points

PASS = "pass"
FAIL = "fail"

#: per-trial dense eigensolve budget
MAX_TRIAL_SIZE = 500


@dataclass(frozen=True)
class AuditConfig:
    """Trial shape for an audit: points per trial, independent times per
    point, trial count, base seed, and the relative tolerance."""

    n_points: int
    n_times: int
    n_trials: int
    seed: int
    rel_tol: float = 1e-8

    def __post_init__(self):
        if self.n_points < 1 or self.n_times < 1:
            raise InvalidParamsError("n_points and n_times must be >= 1")
        if self.n_points * self.n_times > MAX_TRIAL_SIZE:
            raise InvalidParamsError(
                f"n_points * n_times = {self.n_points * self.n_times} "
                f"exceeds the per-trial budget of {MAX_TRIAL_SIZE}")
        if self.n_trials < 1:
            raise InvalidParamsError("n_trials must be >= 1")
        if self.rel_tol < 0:
            raise InvalidParamsError("rel_tol must be nonnegative")


@dataclass(frozen=True)
class AuditReport:
    """Worst observed eigenvalue ratio, the design achieving it, and the
    pass/fail verdict (pass iff min_eig_ratio >= -rel_tol)."""

    min_eig_ratio: float
    worst_points: Tuple[PointOnNetwork, ...]
    worst_times: Tuple[float, ...]
    verdict: str
    rel_tol: float
    n_trials: int

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def eigen_ratio(matrix: np.ndarray) -> float:
    """min eigenvalue over max |eigenvalue| of a symmetric matrix (0 for
    the zero matrix)."""
    eigs = np.linalg.eigvalsh(matrix)
    top = float(np.abs(eigs).max())
    if top == 0.0:
        return 0.0
    return float(eigs.min() / top)


def audit_matrix(matrix: np.ndarray, rel_tol: float = 1e-8):
    """Judge one symmetric matrix directly; returns (ratio, verdict)."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidParamsError("matrix must be square")
    ratio = eigen_ratio(0.5 * (matrix + matrix.T))
    return ratio, (PASS if ratio >= -rel_tol else FAIL)


def _resolve_kernel(spec, metric: Optional[str], time_kind: Optional[str]):
    """Normalize a kernel object or raw callable into
    (metric, time_kind, f(D, U) -> covariance)."""
    if hasattr(spec, "evaluate"):
        metric = metric or spec.metric
        time_kind = time_kind or spec.time
        func = spec.evaluate
    elif callable(spec):
        if metric is None or time_kind is None:
            raise InvalidParamsError(
                "callable kernels need explicit metric and time_kind")
        func = spec
    else:
        raise InvalidParamsError(
            f"cannot audit object of type {type(spec).__name__}")
    return metric, time_kind, func


def _trial_times(rng: np.random.Generator, n: int, time_kind: str) -> np.ndarray:
    if time_kind == "circular":
        return rng.random(n) * 2.0 * np.pi
    return rng.random(n)


def _gram_ratio(func, net, points, times, metric, time_kind) -> float:
    dvals = distance_matrix(net, points, metric).values
    seps = temporal_separation(times, kind=time_kind)
    cov = np.asarray(func(dvals, seps), dtype=float)
    return eigen_ratio(0.5 * (cov + cov.T))


def audit(spec, net: Network, cfg: AuditConfig, metric: Optional[str] = None,
          time_kind: Optional[str] = None) -> AuditReport:
    """Eigenspectrum audit over ``cfg.n_trials`` random designs.

    Each trial samples ``n_points`` locations uniformly by length and
    gives each ``n_times`` independent uniform time stamps (on [0, 1] for
    linear time, angles on [0, 2*pi) for circular).  Trial ``k`` uses seed
    ``cfg.seed XOR k``, so the report does not depend on execution order.
    """
    metric, time_kind, func = _resolve_kernel(spec, metric, time_kind)
    worst_ratio = np.inf
    worst_points: Tuple[PointOnNetwork, ...] = ()
    worst_times: Tuple[float, ...] = ()
    for trial in range(cfg.n_trials):
        trial_seed = cfg.seed ^ trial
        base_points = sample_points(net, cfg.n_points, seed=trial_seed)
        points = tuple(p for p in base_points for _ in range(cfg.n_times))
        rng = np.random.default_rng([trial_seed, len(points)])
        times = _trial_times(rng, len(points), time_kind)
        ratio = _gram_ratio(func, net, points, times, metric, time_kind)
        if ratio < worst_ratio:
            worst_ratio = ratio
            worst_points = points
            worst_times = tuple(float(t) for t in times)
    verdict = PASS if worst_ratio >= -cfg.rel_tol else FAIL
    return AuditReport(min_eig_ratio=float(worst_ratio),
                       worst_points=worst_points, worst_times=worst_times,
                       verdict=verdict, rel_tol=cfg.rel_tol,
                       n_trials=cfg.n_trials)


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a counterexample search.  ``found`` is True only when
    the archived configuration re-verifies at ratio <= -rel_tol."""

    found: bool
    points: Tuple[PointOnNetwork, ...]
    times: Tuple[float, ...]
    min_eig_ratio: float
    evaluations: int


def _sample_with_rng(net: Network, n: int, rng: np.random.Generator):
    eids = net.edge_ids
    lengths = np.array([net.edge(eid).length for eid in eids])
    weights = lengths / lengths.sum()
    points = []
    for _ in range(n):
        idx = int(rng.choice(len(eids), p=weights))
        frac = float(rng.random()) or 0.5
        points.append(PointOnNetwork("edge", eids[idx],
                                     float(frac * lengths[idx])))
    return points


def _perturb_point(net: Network, p: PointOnNetwork,
                   rng: np.random.Generator) -> PointOnNetwork:
    if p.is_vertex:
        eid, _, length = net.neighbors(p.ref)[rng.integers(len(net.neighbors(p.ref)))]
        frac = 0.05 + 0.9 * float(rng.random())
        return PointOnNetwork("edge", eid, float(frac * length))
    length = net.edge(p.ref).length
    offset = p.offset + (float(rng.random()) - 0.5) * 0.4 * length
    offset = min(max(offset, 1e-9 * length), (1 - 1e-9) * length)
    return PointOnNetwork("edge", p.ref, float(offset))


def _perturb_time(t: float, time_kind: str, rng: np.random.Generator) -> float:
    if time_kind == "circular":
        return float(np.mod(t + (rng.random() - 0.5) * 1.0, 2.0 * np.pi))
    return float(min(max(t + (rng.random() - 0.5) * 0.4, 0.0), 1.0))


def counterexample_search(spec, net: Network, budget: int, seed: int,
                          metric: Optional[str] = None,
                          time_kind: Optional[str] = None,
                          n_points: int = 12, n_times: int = 2,
                          rel_tol: float = 1e-8) -> SearchResult:
    """Adversarial search for a design with a negative Gram eigenvalue.

    Alternates randomized restarts with greedy single-coordinate
    perturbations (move one point along or across edges, or shift one
    time), keeping changes that push the smallest eigenvalue ratio down.
    ``budget`` counts Gram evaluations.  The best configuration is
    re-evaluated before ``found`` is reported, so a True result always
    carries a reproducible witness.
    """
    if budget < 1:
        raise InvalidParamsError("budget must be >= 1")
    metric, time_kind, func = _resolve_kernel(spec, metric, time_kind)
    rng = np.random.default_rng(seed)
    n_rows = n_points * n_times

    best_ratio = np.inf
    best_points: Tuple[PointOnNetwork, ...] = ()
    best_times: Tuple[float, ...] = ()
    evals = 0

    while evals < budget:
        points = [p for p in _sample_with_rng(net, n_points, rng)
                  for _ in range(n_times)]
        times = list(_trial_times(rng, n_rows, time_kind))
        ratio = _gram_ratio(func, net, points, times, metric, time_kind)
        evals += 1
        if ratio < best_ratio:
            best_ratio, best_points, best_times = \
                ratio, tuple(points), tuple(times)
        # greedy refinement around this restart
        steps = min(4 * n_rows, budget - evals)
        for _ in range(steps):
            k = int(rng.integers(n_rows))
            cand_points = list(points)
            cand_times = list(times)
            if rng.random() < 0.5:
                cand_times[k] = _perturb_time(times[k], time_kind, rng)
            else:
                cand_points[k] = _perturb_point(net, points[k], rng)
            cand_ratio = _gram_ratio(func, net, cand_points, cand_times,
                                     metric, time_kind)
            evals += 1
            if cand_ratio < ratio:
                points, times, ratio = cand_points, cand_times, cand_ratio
                if ratio < best_ratio:
                    best_ratio, best_points, best_times = \
                        ratio, tuple(points), tuple(times)

    if best_points:
        # re-verify the archived witness before claiming a find
        best_ratio = _gram_ratio(func, net, list(best_points),
                                 list(best_times), metric, time_kind)
    found = bool(best_points) and best_ratio <= -rel_tol
    return SearchResult(found=found, points=best_points,
                        times=tuple(float(t) for t in best_times),
                        min_eig_ratio=float(best_ratio), evaluations=evals)
