"""Parametric space-time covariance kernels for networks.

Building blocks:

- spatial correlation families ``phi`` with ``phi(0) = 1`` (Dagum,
  generalized Cauchy, Schilling, Matern, powered exponential, Askey);
- temporal scaling families ``psi`` (positive, nondecreasing);
- the nonseparable composition
  ``G(d, u) = sigma2 * psi(u/c_T)**(-alpha) * phi(d / (c_S * psi(u/c_T)**beta))``
  where ``beta > 0`` stretches spatial distance with temporal lag,
  ``beta < 0`` multiplies it, and ``beta = 0`` factorizes into a separable
  product;
- circular-time families built from a cosine series whose coefficients are
  driven by an inner completely-monotone-listed spatial correlation ``g``.

Named constructors :func:`model_T`, :func:`model_C1`, :func:`model_C2` and
:func:`model_askey_st` assemble the reference parameterizations used by the
simulation study.  Whether a given kernel is certified positive definite is
decided by :mod:`netkernel.validity`; this module only carries the family
whitelists (encoded parameter ranges for the Stieltjes, completely-monotone
and Bernstein classes) that the checker consumes.

All kernel and family objects are immutable and safe to share across
threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields as _dc_fields
from typing import ClassVar, Union

import numpy as np
from scipy.special import gamma as _gamma_fn, kv as _kv

from .errors import (
    InnerFamilyNotCompletelyMonotoneError,
    InvalidParamsError,
    MetricMismatchError,
)
from .metrics import (
    SPATIAL_METRICS,
    TIME_KINDS,
    DistanceMatrix,
    temporal_separation,
)

#: argument beyond which the Matern correlation underflows to an exact zero
_MATERN_CUTOFF = 700.0


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParamsError(msg)


def _as_value(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


# ---------------------------------------------------------------------------
# spatial correlation families phi (phi(0) = 1, nonincreasing)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpatialFamily:
    """Base for spatial correlation families; subclasses define
    ``correlation`` and validate their parameters on construction."""

    family_name: ClassVar[str] = ""

    def correlation(self, r):
        raise NotImplementedError

    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in _dc_fields(self)}


@dataclass(frozen=True)
class Dagum(SpatialFamily):
    """phi(r) = 1 - (r**b / (1 + r**b))**tau."""

    b: float
    tau: float
    family_name: ClassVar[str] = "dagum"

    def __post_init__(self):
        _check(self.b > 0 and self.tau > 0, "dagum needs b > 0 and tau > 0")

    def correlation(self, r):
        r = np.asarray(r, dtype=float)
        rb = r ** self.b
        return _as_value(1.0 - (rb / (1.0 + rb)) ** self.tau)


@dataclass(frozen=True)
class GenCauchy(SpatialFamily):
    """phi(r) = (1 + r**b_S)**(-delta_S)."""

    b_S: float
    delta_S: float
    family_name: ClassVar[str] = "gen_cauchy"

    def __post_init__(self):
        _check(self.b_S > 0 and self.delta_S > 0,
               "gen_cauchy needs b_S > 0 and delta_S > 0")

    def correlation(self, r):
        r = np.asarray(r, dtype=float)
        return _as_value((1.0 + r ** self.b_S) ** (-self.delta_S))


@dataclass(frozen=True)
class Schilling(SpatialFamily):
    """phi(r) = h(r)/h(0) with h(r) = (1 - exp(-2*sqrt(r+a))) / sqrt(r+a)."""

    a: float
    family_name: ClassVar[str] = "schilling"

    def __post_init__(self):
        _check(self.a > 0, "schilling needs a > 0")

    def correlation(self, r):
        r = np.asarray(r, dtype=float)
        root = np.sqrt(r + self.a)
        root0 = math.sqrt(self.a)
        h = (1.0 - np.exp(-2.0 * root)) / root
        h0 = (1.0 - math.exp(-2.0 * root0)) / root0
        # h is strictly decreasing, so the ratio is <= 1; clamp the
        # division's 1-ulp overshoot near r = 0
        return _as_value(np.minimum(h / h0, 1.0))


@dataclass(frozen=True)
class Matern(SpatialFamily):
    """phi(r) = 2**(1-nu)/Gamma(nu) * r**nu * K_nu(r), with phi(0) = 1.

    K_nu is the modified Bessel function of the second kind; nu = 1/2
    collapses to exp(-r).
    """

    nu: float
    family_name: ClassVar[str] = "matern"

    def __post_init__(self):
        _check(self.nu > 0, "matern needs nu > 0")

    def correlation(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r > 0) & (r < _MATERN_CUTOFF)
        safe = np.where(inside, r, 1.0)
        with np.errstate(invalid="ignore", over="ignore", under="ignore"):
            val = (2.0 ** (1.0 - self.nu) / _gamma_fn(self.nu)
                   * safe ** self.nu * _kv(self.nu, safe))
        # the correlation is <= 1 for every r; the Bessel product can
        # round 1 ulp above it as r -> 0
        val = np.minimum(val, 1.0)
        val = np.where(inside, val, np.where(r <= 0, 1.0, 0.0))
        return _as_value(val)


@dataclass(frozen=True)
class PowExp(SpatialFamily):
    """phi(r) = exp(-r**a)."""

    a: float
    family_name: ClassVar[str] = "pow_exp"

    def __post_init__(self):
        _check(0 < self.a <= 2, "pow_exp needs a in (0, 2]")

    def correlation(self, r):
        r = np.asarray(r, dtype=float)
        return _as_value(np.exp(-(r ** self.a)))


@dataclass(frozen=True)
class Askey(SpatialFamily):
    """phi(r) = max(1 - r, 0)**nu; compactly supported on [0, 1]."""

    nu: float
    family_name: ClassVar[str] = "askey"

    def __post_init__(self):
        _check(self.nu > 0, "askey needs nu > 0")

    def correlation(self, r):
        r = np.asarray(r, dtype=float)
        return _as_value(np.clip(1.0 - r, 0.0, None) ** self.nu)


SPATIAL_FAMILIES = {cls.family_name: cls
                    for cls in (Dagum, GenCauchy, Schilling, Matern, PowExp,
                                Askey)}


# ---------------------------------------------------------------------------
# temporal scaling families psi (positive, nondecreasing)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TemporalFamily:
    """Base for temporal scaling families; subclasses define ``value``."""

    family_name: ClassVar[str] = ""

    def value(self, t):
        raise NotImplementedError

    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in _dc_fields(self)}

    @property
    def at_zero(self) -> float:
        return float(self.value(np.asarray(0.0)))


@dataclass(frozen=True)
class DagumPsi(TemporalFamily):
    """psi(t) = 1 + (t**b / (1 + t**b))**tau."""

    b: float
    tau: float
    family_name: ClassVar[str] = "dagum"

    def __post_init__(self):
        _check(self.b > 0 and self.tau > 0, "dagum psi needs b > 0 and tau > 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        tb = t ** self.b
        return _as_value(1.0 + (tb / (1.0 + tb)) ** self.tau)


@dataclass(frozen=True)
class GenCauchyPsi(TemporalFamily):
    """psi(t) = (1 + t**a)**(b/a)."""

    a: float
    b: float
    family_name: ClassVar[str] = "gen_cauchy"

    def __post_init__(self):
        _check(self.a > 0 and self.b > 0,
               "gen_cauchy psi needs a > 0 and b > 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return _as_value((1.0 + t ** self.a) ** (self.b / self.a))


@dataclass(frozen=True)
class PowerPsi(TemporalFamily):
    """psi(t) = c + t**a; psi(0) = c may differ from 1."""

    a: float
    c: float
    family_name: ClassVar[str] = "power"

    def __post_init__(self):
        _check(self.a > 0 and self.c > 0, "power psi needs a > 0 and c > 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return _as_value(self.c + t ** self.a)


@dataclass(frozen=True)
class GneitingPsi(TemporalFamily):
    """psi(t) = 1 + t**a_T."""

    a_T: float
    family_name: ClassVar[str] = "gneiting"

    def __post_init__(self):
        _check(self.a_T > 0, "gneiting psi needs a_T > 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return _as_value(1.0 + t ** self.a_T)


TEMPORAL_FAMILIES = {cls.family_name: cls
                     for cls in (DagumPsi, GenCauchyPsi, PowerPsi, GneitingPsi)}


# ---------------------------------------------------------------------------
# class-membership whitelists (encoded parameter ranges; consumed by the
# validity checker and by the circular families' inner-correlation guard)
# ---------------------------------------------------------------------------

def is_stieltjes_listed(phi: SpatialFamily) -> bool:
    """Whether ``phi`` falls in the encoded Stieltjes catalog: Dagum with
    b, tau <= 1; generalized Cauchy with b_S <= 1; Schilling."""
    if isinstance(phi, Dagum):
        return phi.b <= 1 and phi.tau <= 1
    if isinstance(phi, GenCauchy):
        return phi.b_S <= 1
    return isinstance(phi, Schilling)


def is_completely_monotone_listed(phi: SpatialFamily) -> bool:
    """Whether ``phi`` falls in the encoded completely-monotone catalog:
    the Stieltjes catalog plus Matern with nu <= 1/2 and powered
    exponential with a <= 1."""
    if is_stieltjes_listed(phi):
        return True
    if isinstance(phi, Matern):
        return phi.nu <= 0.5
    if isinstance(phi, PowExp):
        return phi.a <= 1
    return False


def is_bernstein_listed(psi: TemporalFamily) -> bool:
    """Whether ``psi`` falls in the encoded Bernstein catalog: Dagum with
    b, tau <= 1; generalized Cauchy with a <= 1 and b <= a; power with
    a <= 1; the 1 + t**a_T family with a_T <= 2."""
    if isinstance(psi, DagumPsi):
        return psi.b <= 1 and psi.tau <= 1
    if isinstance(psi, GenCauchyPsi):
        return psi.a <= 1 and psi.b <= psi.a
    if isinstance(psi, PowerPsi):
        return psi.a <= 1
    if isinstance(psi, GneitingPsi):
        return psi.a_T <= 2
    return False


# ---------------------------------------------------------------------------
# the nonseparable space-time composition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GneitingKernel:
    """Space-time covariance
    ``G(d, u) = sigma2 * psi(u/c_T)**(-alpha) * phi(d / (c_S * psi(u/c_T)**beta))``.

    ``metric`` names the spatial metric the distances are meant to come
    from; ``time`` is ``"linear"`` (u = absolute lag) or ``"circular"``
    (u = arc separation in [0, pi]).
    """

    sigma2: float
    c_S: float
    c_T: float
    alpha: float
    beta: float
    phi: SpatialFamily
    psi: TemporalFamily
    metric: str = "resistance"
    time: str = "linear"

    model_name: ClassVar[str] = "gneiting"

    def __post_init__(self):
        _check(self.sigma2 > 0, "sigma2 must be positive")
        _check(self.c_S > 0, "c_S must be positive")
        _check(self.c_T > 0, "c_T must be positive")
        _check(math.isfinite(self.alpha), "alpha must be finite")
        _check(math.isfinite(self.beta), "beta must be finite")
        _check(isinstance(self.phi, SpatialFamily), "phi must be a SpatialFamily")
        _check(isinstance(self.psi, TemporalFamily), "psi must be a TemporalFamily")
        _check(self.metric in SPATIAL_METRICS,
               f"metric must be one of {SPATIAL_METRICS}")
        _check(self.time in TIME_KINDS, f"time must be one of {TIME_KINDS}")

    def evaluate(self, d, u):
        """Covariance at spatial distance ``d`` and temporal separation
        ``u`` (both scalars or broadcastable arrays)."""
        d = np.asarray(d, dtype=float)
        u = np.asarray(u, dtype=float)
        psit = np.asarray(self.psi.value(u / self.c_T))
        r = d / (self.c_S * psit ** self.beta)
        out = self.sigma2 * psit ** (-self.alpha) * self.phi.correlation(r)
        return _as_value(np.asarray(out))

    @property
    def variance(self) -> float:
        """Value at zero spatial and temporal lag,
        sigma2 * psi(0)**(-alpha)."""
        return float(self.evaluate(0.0, 0.0))

    def with_params(self, sigma2=None, c_S=None, c_T=None) -> "GneitingKernel":
        """Copy with the three free scale parameters replaced."""
        return GneitingKernel(
            sigma2=self.sigma2 if sigma2 is None else sigma2,
            c_S=self.c_S if c_S is None else c_S,
            c_T=self.c_T if c_T is None else c_T,
            alpha=self.alpha, beta=self.beta, phi=self.phi, psi=self.psi,
            metric=self.metric, time=self.time)


# ---------------------------------------------------------------------------
# circular-time families (cosine-series construction)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircularFamily:
    """Base for circular-time correlation families.  ``value(g, theta)``
    maps the inner spatial correlation ``g`` and the circular time
    separation ``theta`` (radians in [0, pi]) to a correlation; every
    family returns 1 at (g=1, theta=0)."""

    family_name: ClassVar[str] = ""

    def value(self, g, theta):
        raise NotImplementedError

    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in _dc_fields(self)}


@dataclass(frozen=True)
class NegBinomial(CircularFamily):
    """((1 - eps) / (1 - eps * g * cos(theta)))**tau."""

    eps: float
    tau: float
    family_name: ClassVar[str] = "neg_binomial"

    def __post_init__(self):
        _check(0 < self.eps < 1, "neg_binomial needs eps in (0, 1)")
        _check(self.tau > 0, "neg_binomial needs tau > 0")

    def value(self, g, theta):
        core = np.asarray(g) * np.cos(np.asarray(theta, dtype=float))
        return _as_value(((1.0 - self.eps) / (1.0 - self.eps * core)) ** self.tau)


@dataclass(frozen=True)
class Multiquadric(CircularFamily):
    """(1 - eps)**(2*tau) / (1 + eps**2 - 2*eps*g*cos(theta))**tau."""

    eps: float
    tau: float
    family_name: ClassVar[str] = "multiquadric"

    def __post_init__(self):
        _check(0 < self.eps < 1, "multiquadric needs eps in (0, 1)")
        _check(self.tau > 0, "multiquadric needs tau > 0")

    def value(self, g, theta):
        core = np.asarray(g) * np.cos(np.asarray(theta, dtype=float))
        denom = (1.0 + self.eps ** 2 - 2.0 * self.eps * core) ** self.tau
        return _as_value((1.0 - self.eps) ** (2.0 * self.tau) / denom)


@dataclass(frozen=True)
class SineSeries(CircularFamily):
    """exp(g*cos(theta) - 1) * (1 + g*cos(theta)) / 2."""

    family_name: ClassVar[str] = "sine_series"

    def value(self, g, theta):
        core = np.asarray(g) * np.cos(np.asarray(theta, dtype=float))
        return _as_value(np.exp(core - 1.0) * (1.0 + core) / 2.0)


@dataclass(frozen=True)
class SinePower(CircularFamily):
    """1 - 2**(-a) * (1 - g*cos(theta))**(a/2)."""

    a: float
    family_name: ClassVar[str] = "sine_power"

    def __post_init__(self):
        _check(0 < self.a <= 2, "sine_power needs a in (0, 2]")

    def value(self, g, theta):
        core = np.asarray(g) * np.cos(np.asarray(theta, dtype=float))
        return _as_value(1.0 - 2.0 ** (-self.a) * (1.0 - core) ** (self.a / 2.0))


@dataclass(frozen=True)
class AdaptedMultiquadric(CircularFamily):
    """((1 + g**2) * (1 - eps) / (1 + g**2 - 2*eps*g*cos(theta)))**tau."""

    eps: float
    tau: float
    family_name: ClassVar[str] = "adapted_multiquadric"

    def __post_init__(self):
        _check(0 < self.eps < 1, "adapted_multiquadric needs eps in (0, 1)")
        _check(self.tau > 0, "adapted_multiquadric needs tau > 0")

    def value(self, g, theta):
        g = np.asarray(g, dtype=float)
        core = g * np.cos(np.asarray(theta, dtype=float))
        num = (1.0 + g ** 2) * (1.0 - self.eps)
        denom = 1.0 + g ** 2 - 2.0 * self.eps * core
        return _as_value((num / denom) ** self.tau)


@dataclass(frozen=True)
class Poisson(CircularFamily):
    """exp(lam * (g*cos(theta) - 1))."""

    lam: float
    family_name: ClassVar[str] = "poisson"

    def __post_init__(self):
        _check(self.lam > 0, "poisson needs lam > 0")

    def value(self, g, theta):
        core = np.asarray(g) * np.cos(np.asarray(theta, dtype=float))
        return _as_value(np.exp(self.lam * (core - 1.0)))


CIRCULAR_FAMILIES = {cls.family_name: cls
                     for cls in (NegBinomial, Multiquadric, SineSeries,
                                 SinePower, AdaptedMultiquadric, Poisson)}


def _require_cm_inner(phi: SpatialFamily) -> None:
    if not is_completely_monotone_listed(phi):
        raise InnerFamilyNotCompletelyMonotoneError(
            f"inner spatial family {phi!r} is not in the encoded "
            f"completely-monotone catalog")


@dataclass(frozen=True)
class CircularKernel:
    """Space x circular-time covariance
    ``C(d, theta) = sigma2 * family.value(phi.correlation(d / c_S), theta)``.

    The inner spatial correlation must come from the completely-monotone
    catalog (checked at construction).
    """

    sigma2: float
    c_S: float
    family: CircularFamily
    phi: SpatialFamily
    metric: str = "resistance"
    time: str = "circular"

    model_name: ClassVar[str] = "circular"

    def __post_init__(self):
        _check(self.sigma2 > 0, "sigma2 must be positive")
        _check(self.c_S > 0, "c_S must be positive")
        _check(isinstance(self.family, CircularFamily),
               "family must be a CircularFamily")
        _check(isinstance(self.phi, SpatialFamily), "phi must be a SpatialFamily")
        _check(self.metric in SPATIAL_METRICS,
               f"metric must be one of {SPATIAL_METRICS}")
        _check(self.time == "circular", "circular kernels require circular time")
        _require_cm_inner(self.phi)

    def evaluate(self, d, theta):
        d = np.asarray(d, dtype=float)
        g = self.phi.correlation(d / self.c_S)
        out = self.sigma2 * np.asarray(self.family.value(g, theta))
        return _as_value(out)

    @property
    def variance(self) -> float:
        return float(self.sigma2)


SpaceTimeKernel = Union[GneitingKernel, CircularKernel]


# ---------------------------------------------------------------------------
# spec-level evaluation helpers
# ---------------------------------------------------------------------------

def eval_phi(family: SpatialFamily, r):
    """Spatial correlation at distance ``r >= 0``."""
    r = np.asarray(r, dtype=float)
    _check(np.all(r >= 0), "r must be nonnegative")
    return family.correlation(r)


def eval_psi(family: TemporalFamily, t):
    """Temporal scaling at separation ``t >= 0``."""
    t = np.asarray(t, dtype=float)
    _check(np.all(t >= 0), "t must be nonnegative")
    return family.value(t)


def eval_gneiting(spec: GneitingKernel, d, u):
    """Covariance of the composition kernel at (d, u); for circular time
    ``u`` must lie in [0, pi]."""
    d = np.asarray(d, dtype=float)
    u = np.asarray(u, dtype=float)
    _check(np.all(d >= 0), "d must be nonnegative")
    _check(np.all(u >= 0), "u must be nonnegative")
    if spec.time == "circular":
        _check(np.all(u <= np.pi + 1e-12),
               "circular temporal separation must lie in [0, pi]")
    return spec.evaluate(d, u)


def eval_circular(family: CircularFamily, g_spec: SpatialFamily, c_S: float,
                  d_R, d_G_time):
    """Circular-family correlation with inner correlation g_spec(d_R/c_S).

    ``d_G_time`` is the circular time separation in [0, pi].  Returns a
    correlation (multiply by sigma2 for a covariance); equals 1 at (0, 0).
    """
    _require_cm_inner(g_spec)
    _check(c_S > 0, "c_S must be positive")
    d_R = np.asarray(d_R, dtype=float)
    theta = np.asarray(d_G_time, dtype=float)
    _check(np.all(d_R >= 0), "d_R must be nonnegative")
    _check(np.all((theta >= 0) & (theta <= np.pi + 1e-12)),
           "d_G_time must lie in [0, pi]")
    g = g_spec.correlation(d_R / c_S)
    return _as_value(np.asarray(family.value(g, theta)))


def gram(spec: SpaceTimeKernel, dmat, times, time_kind: str = None) -> np.ndarray:
    """Gram matrix of the kernel over paired (point, time) rows.

    ``dmat`` is a DistanceMatrix (its metric must match ``spec.metric``)
    or a bare square array of distances.  ``times`` has one entry per row.
    """
    if isinstance(dmat, DistanceMatrix):
        if dmat.metric != spec.metric:
            raise MetricMismatchError(
                f"kernel expects {spec.metric!r} distances, matrix carries "
                f"{dmat.metric!r}")
        values = dmat.values
    else:
        values = np.asarray(dmat, dtype=float)
    times = np.asarray(times, dtype=float)
    if values.shape != (times.size, times.size):
        raise InvalidParamsError(
            f"distance matrix shape {values.shape} does not match "
            f"{times.size} time stamps")
    kind = spec.time if time_kind is None else time_kind
    seps = temporal_separation(times, kind=kind)
    out = np.asarray(spec.evaluate(values, seps))
    return 0.5 * (out + out.T)


# ---------------------------------------------------------------------------
# named model constructors (reference parameterizations of the study)
# ---------------------------------------------------------------------------

#: simulation-study truth: sigma2 = 0.9, c_S = 100, c_T = 0.2
REFERENCE_PARAMS = {"sigma2": 0.9, "c_S": 100.0, "c_T": 0.2}


def model_T(sigma2: float, c_S: float, c_T: float) -> GneitingKernel:
    """True model of the simulation study: generalized Cauchy space
    (b_S=1, delta_S=2), psi = 1 + t, alpha=2, beta=1, geodesic metric,
    linear time."""
    return GneitingKernel(sigma2, c_S, c_T, alpha=2.0, beta=1.0,
                          phi=GenCauchy(b_S=1.0, delta_S=2.0),
                          psi=GneitingPsi(a_T=1.0),
                          metric="geodesic", time="linear")


def model_C1(sigma2: float, c_S: float, c_T: float) -> GneitingKernel:
    """First competitor: identical to model_T but with straight-line
    (ambient Euclidean) distances."""
    base = model_T(sigma2, c_S, c_T)
    return GneitingKernel(sigma2, c_S, c_T, alpha=base.alpha, beta=base.beta,
                          phi=base.phi, psi=base.psi,
                          metric="euclidean", time="linear")


def model_C2(sigma2: float, c_S: float, c_T: float) -> GneitingKernel:
    """Second competitor: Dagum space (b=1, tau=1/2), psi = 1/2 + t**(1/4),
    alpha=2, beta=1, geodesic metric.  psi(0) = 1/2, so the variance at the
    origin is 4*sigma2."""
    return GneitingKernel(sigma2, c_S, c_T, alpha=2.0, beta=1.0,
                          phi=Dagum(b=1.0, tau=0.5),
                          psi=PowerPsi(a=0.25, c=0.5),
                          metric="geodesic", time="linear")


def model_askey_st(sigma2: float, c_S: float, c_T: float, nu_S: float,
                   alpha: float, beta: float, a_T: float) -> GneitingKernel:
    """Dynamically compactly supported model: Askey space, psi = 1 + t**a_T.

    The support radius at temporal lag u is c_S * psi(u/c_T)**beta; beta
    is restricted to [0, 1).
    """
    _check(0 <= beta < 1, "model_askey_st needs beta in [0, 1)")
    return GneitingKernel(sigma2, c_S, c_T, alpha=alpha, beta=beta,
                          phi=Askey(nu=nu_S), psi=GneitingPsi(a_T=a_T),
                          metric="geodesic", time="linear")


MODEL_SHORTCUTS = {"T": model_T, "C1": model_C1, "C2": model_C2}


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

# dataclass field name <-> JSON key (only where they differ)
_FIELD_TO_JSON = {"lam": "lambda"}
_JSON_TO_FIELD = {v: k for k, v in _FIELD_TO_JSON.items()}


def _family_to_json(fam) -> dict:
    out = {"family": fam.family_name}
    for name, val in fam.params().items():
        out[_FIELD_TO_JSON.get(name, name)] = val
    return out


def _family_from_json(obj, registry: dict, what: str):
    if not isinstance(obj, dict) or "family" not in obj:
        raise InvalidParamsError(f"{what} must be an object with a 'family' key")
    name = obj["family"]
    cls = registry.get(name)
    if cls is None:
        raise InvalidParamsError(
            f"unknown {what} family {name!r}; expected one of {sorted(registry)}")
    expected = {f.name for f in _dc_fields(cls)}
    given = {}
    for key, val in obj.items():
        if key == "family":
            continue
        field = _JSON_TO_FIELD.get(key, key)
        if field not in expected:
            raise InvalidParamsError(f"{what} {name!r}: unknown key {key!r}")
        given[field] = float(val)
    missing = expected - set(given)
    if missing:
        raise InvalidParamsError(
            f"{what} {name!r}: missing keys {sorted(missing)}")
    return cls(**given)


def kernel_to_json(spec: SpaceTimeKernel) -> dict:
    if isinstance(spec, GneitingKernel):
        return {"model": "gneiting", "sigma2": spec.sigma2, "c_S": spec.c_S,
                "c_T": spec.c_T, "alpha": spec.alpha, "beta": spec.beta,
                "phi": _family_to_json(spec.phi),
                "psi": _family_to_json(spec.psi),
                "metric": spec.metric, "time": spec.time}
    if isinstance(spec, CircularKernel):
        return {"model": "circular", "sigma2": spec.sigma2, "c_S": spec.c_S,
                "family": _family_to_json(spec.family),
                "phi": _family_to_json(spec.phi),
                "metric": spec.metric, "time": spec.time}
    raise InvalidParamsError(f"cannot serialize {type(spec).__name__}")


def _take(obj: dict, required: set, optional: dict, model: str) -> dict:
    unknown = set(obj) - required - set(optional) - {"model"}
    if unknown:
        raise InvalidParamsError(
            f"kernel model {model!r}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise InvalidParamsError(
            f"kernel model {model!r}: missing keys {sorted(missing)}")
    out = dict(optional)
    out.update({k: obj[k] for k in obj if k != "model"})
    return out


def kernel_from_json(obj) -> SpaceTimeKernel:
    """Build a kernel from its JSON form.

    Accepts the full {"model": "gneiting", ...} / {"model": "circular", ...}
    objects, or the shortcuts "T" / "C1" / "C2" (as a bare string or as
    {"model": "T", ...} with optional sigma2/c_S/c_T overrides; defaults
    are the study truth sigma2=0.9, c_S=100, c_T=0.2).  Unknown keys are
    rejected.
    """
    if isinstance(obj, str):
        obj = {"model": obj}
    if not isinstance(obj, dict) or "model" not in obj:
        raise InvalidParamsError("kernel spec must be an object with a 'model' key")
    model = obj["model"]
    if model in MODEL_SHORTCUTS:
        kw = _take(obj, set(), dict(REFERENCE_PARAMS), model)
        return MODEL_SHORTCUTS[model](**{k: float(v) for k, v in kw.items()})
    if model == "gneiting":
        kw = _take(obj, {"sigma2", "c_S", "c_T", "alpha", "beta", "phi", "psi"},
                   {"metric": "resistance", "time": "linear"}, model)
        return GneitingKernel(
            sigma2=float(kw["sigma2"]), c_S=float(kw["c_S"]),
            c_T=float(kw["c_T"]), alpha=float(kw["alpha"]),
            beta=float(kw["beta"]),
            phi=_family_from_json(kw["phi"], SPATIAL_FAMILIES, "phi"),
            psi=_family_from_json(kw["psi"], TEMPORAL_FAMILIES, "psi"),
            metric=kw["metric"], time=kw["time"])
    if model == "circular":
        kw = _take(obj, {"sigma2", "c_S", "family", "phi"},
                   {"metric": "resistance", "time": "circular"}, model)
        return CircularKernel(
            sigma2=float(kw["sigma2"]), c_S=float(kw["c_S"]),
            family=_family_from_json(kw["family"], CIRCULAR_FAMILIES, "circular"),
            phi=_family_from_json(kw["phi"], SPATIAL_FAMILIES, "phi"),
            metric=kw["metric"], time=kw["time"])
    raise InvalidParamsError(
        f"unknown kernel model {model!r}; expected 'gneiting', 'circular' "
        f"or one of {sorted(MODEL_SHORTCUTS)}")


def load_kernel(path) -> SpaceTimeKernel:
    with open(path) as fh:
        return kernel_from_json(json.load(fh))


def save_kernel(spec: SpaceTimeKernel, path) -> None:
    with open(path, "w") as fh:
        json.dump(kernel_to_json(spec), fh, indent=1)
        fh.write("\n")
