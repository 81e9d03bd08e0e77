"""Cumulant generating functions of single claim components.

Three component families are supported:

* Gaussian, parameterized by mean and variance, with closed-form CGF.
* Poisson, parameterized by intensity, with closed-form CGF.
* Custom, parameterized by a quantile map on (0, 1), with the CGF obtained
  by quadrature (or supplied directly as a callable).

Every family must have a CGF that is finite for all real arguments; custom
families that visibly violate this are rejected at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import CgfOverflowError, QuadratureError, SpecValidationError

_LOG_MAX = math.log(np.finfo(float).max)  # ~709.78
_QUANTILE_EPS = 1e-12


@lru_cache(maxsize=None)
def hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite knots and weights normalized against the N(0,1) density.

    Parameters
    ----------
    order : int
        Number of quadrature points.

    Returns
    -------
    knots, weights : ndarray
        ``sum(w * g(x))`` approximates ``E[g(Z)]`` for standard normal Z.
    """
    knots, weights = np.polynomial.hermite.hermgauss(order)
    return knots * math.sqrt(2.0), weights / math.sqrt(math.pi)


@lru_cache(maxsize=None)
def _poisson_cdf_table(intensity: float) -> np.ndarray:
    # cumulative probabilities out to where the remaining mass is < 1e-17
    cap = int(math.ceil(intensity + 40.0 * math.sqrt(intensity) + 40.0))
    pmf = np.empty(cap + 1)
    pmf[0] = math.exp(-intensity)
    for k in range(1, cap + 1):
        pmf[k] = pmf[k - 1] * intensity / k
    return np.minimum(np.cumsum(pmf), 1.0)


@dataclass(frozen=True)
class GaussianComponent:
    """Normally distributed component with the stated mean and variance."""

    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if not self.variance > 0.0:
            raise SpecValidationError("variance", "must be > 0")

    def cgf(self, lam: float) -> float:
        return 0.5 * lam * lam * self.variance + lam * self.mean

    def cgf_derivative(self, lam: float) -> float:
        return lam * self.variance + self.mean

    def component_mean(self) -> float:
        return self.mean

    def component_variance(self) -> float:
        return self.variance

    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def quantile(self, u):
        return self.mean + math.sqrt(self.variance) * ndtri(u)

    def tilted(self, lam: float) -> "GaussianComponent":
        """Law under the exponential tilt e^{lam * b} dP."""
        return GaussianComponent(self.mean + lam * self.variance, self.variance)


@dataclass(frozen=True)
class PoissonComponent:
    """Poisson-distributed component with the stated intensity."""

    intensity: float = 1.0

    def __post_init__(self):
        if not self.intensity > 0.0:
            raise SpecValidationError("intensity", "must be > 0")

    def cgf(self, lam: float) -> float:
        return math.expm1(lam) * self.intensity if lam < _LOG_MAX else math.inf

    def cgf_derivative(self, lam: float) -> float:
        ex = lam + math.log(self.intensity)
        return math.exp(ex) if ex < _LOG_MAX else math.inf

    def component_mean(self) -> float:
        return self.intensity

    def component_variance(self) -> float:
        return self.intensity

    def support(self) -> tuple[float, float]:
        return (0.0, math.inf)

    def quantile(self, u):
        cdf = _poisson_cdf_table(self.intensity)
        return np.searchsorted(cdf, u, side="left").astype(float)

    def tilted(self, lam: float) -> "PoissonComponent":
        return PoissonComponent(self.intensity * math.exp(lam))


@dataclass(frozen=True, eq=False)
class CustomComponent:
    """Component given by a quantile map u in (0,1) -> value.

    The CGF is evaluated by Gauss-Hermite quadrature against the standard
    normal driver, doubling the order until two successive orders agree.
    Bounded maps additionally get an exact piecewise-linear evaluation for
    large arguments, where node-based quadrature cannot resolve the
    exponential concentration at the upper/lower endpoint.
    """

    quantile: Callable[[np.ndarray], np.ndarray]
    cgf_fn: Callable[[float], float] | None = None
    label: str = "custom"
    _segments: tuple = field(init=False, repr=False, default=())

    def __post_init__(self):
        lo, hi = self.support()
        bounded = math.isfinite(lo) and math.isfinite(hi)
        if bounded:
            grid = np.linspace(_QUANTILE_EPS, 1.0 - _QUANTILE_EPS, 8193)
            vals = np.asarray(self.quantile(grid), dtype=float)
            if np.any(np.diff(vals) < -1e-12 * (1.0 + np.abs(vals[:-1]))):
                raise SpecValidationError(
                    "quantile", "must be non-decreasing on (0, 1)"
                )
            object.__setattr__(self, "_segments", (grid, vals))
        probe = 50.0 if bounded else 32.0
        for lam in (-probe, probe):
            v = self.cgf(lam)
            if not math.isfinite(v):
                raise SpecValidationError(
                    "custom", f"CGF not finite at lambda={lam}"
                )

    def cgf(self, lam: float) -> float:
        if self.cgf_fn is not None:
            v = float(self.cgf_fn(lam))
            if math.isnan(v) or math.isinf(v):
                raise CgfOverflowError(lam, self.label)
            return v
        if self._segments and abs(lam) > 64.0:
            return self._cgf_piecewise(lam)
        return self._cgf_hermite(lam)

    def _cgf_hermite(self, lam: float) -> float:
        if lam == 0.0:
            return 0.0
        prev = None
        order = 128
        while order <= 4096:
            knots, weights = hermite_rule(order)
            b = np.asarray(self.quantile(ndtr(knots)), dtype=float)
            if abs(lam) * float(np.max(np.abs(b))) < 0.5:
                # log1p/expm1 form keeps tiny lambdas exact
                est = math.log1p(float(np.dot(weights, np.expm1(lam * b))))
            else:
                t = np.log(weights) + lam * b
                m = float(np.max(t))
                if m > _LOG_MAX:
                    raise CgfOverflowError(lam, self.label)
                est = m + math.log(float(np.sum(np.exp(t - m))))
            if prev is not None and abs(est - prev) <= 1e-10 * (1.0 + abs(est)):
                return est
            prev = est
            order *= 2
        if self._segments:
            return self._cgf_piecewise(lam)
        raise QuadratureError(
            f"custom CGF quadrature did not converge at lambda={lam}"
        )

    def _cgf_piecewise(self, lam: float) -> float:
        # exact integral of exp(lam * Q) for the piecewise-linear
        # interpolant of Q, assembled in log space
        grid, vals = self._segments
        du = np.diff(grid)
        dq = lam * np.diff(vals)
        terms = np.log(du) + lam * vals[:-1] + _log_ramp(dq)
        m = float(np.max(terms))
        if m > _LOG_MAX:
            raise CgfOverflowError(lam, self.label)
        return m + math.log(float(np.sum(np.exp(terms - m))))

    def cgf_derivative(self, lam: float) -> float:
        h = 1e-6 * max(1.0, abs(lam))
        return (self.cgf(lam + h) - self.cgf(lam - h)) / (2.0 * h)

    def component_mean(self) -> float:
        return self._driver_expectation(shift=0.0)

    def component_variance(self) -> float:
        m = self.component_mean()
        prev = None
        order = 128
        while order <= 4096:
            knots, weights = hermite_rule(order)
            b = np.asarray(self.quantile(ndtr(knots)), dtype=float)
            est = float(np.dot(weights, (b - m) ** 2))
            if prev is not None and abs(est - prev) <= 1e-10 * (1.0 + abs(est)):
                return est
            prev = est
            order *= 2
        raise QuadratureError("custom variance quadrature did not converge")

    def _driver_expectation(self, shift: float) -> float:
        """E[Q(Phi(Z - shift))] for standard normal Z, by doubling quadrature."""
        prev = None
        order = 128
        while order <= 4096:
            knots, weights = hermite_rule(order)
            b = np.asarray(self.quantile(ndtr(knots - shift)), dtype=float)
            est = float(np.dot(weights, b))
            if prev is not None and abs(est - prev) <= 1e-10 * (1.0 + abs(est)):
                return est
            prev = est
            order *= 2
        raise QuadratureError(
            f"custom mean quadrature did not converge (shift={shift})"
        )

    def support(self) -> tuple[float, float]:
        lo = float(np.asarray(self.quantile(np.array([_QUANTILE_EPS])))[0])
        hi = float(np.asarray(self.quantile(np.array([1.0 - _QUANTILE_EPS])))[0])
        if lo < -1e300:
            lo = -math.inf
        if hi > 1e300:
            hi = math.inf
        return (lo, hi)

    def quantile_at(self, u):
        return self.quantile(u)

    def tilted(self, lam: float):
        raise UnsupportedTiltError(self.label)


class UnsupportedTiltError(CgfOverflowError):
    """Exponential tilting has no closed form for custom components."""

    def __init__(self, label: str):
        Exception.__init__(self, f"cannot tilt custom component {label!r}")


ComponentFamily = GaussianComponent | PoissonComponent | CustomComponent


def _log_ramp(x: np.ndarray) -> np.ndarray:
    """log((e^x - 1) / x) elementwise, stable for any x; 0 at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    big = x > 36.0
    small = x < -36.0
    mid = ~(big | small)
    out[big] = x[big] - np.log(x[big])
    out[small] = -np.log(-x[small])
    xm = x[mid]
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.where(xm == 0.0, 1.0, np.expm1(xm) / np.where(xm == 0.0, 1.0, xm))
    out[mid] = np.log(val)
    return out


def eval_cgf(family: ComponentFamily, lam: float) -> float:
    """CGF of one component at ``lam``: log E[exp(lam * B)]."""
    return family.cgf(lam)


def eval_cgf_derivative(family: ComponentFamily, lam: float) -> float:
    """Derivative of the component CGF at ``lam`` (the tilted mean)."""
    return family.cgf_derivative(lam)
