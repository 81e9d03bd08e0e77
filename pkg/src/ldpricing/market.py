"""Market descriptions and the unhedged tail claim.

A market holds a countable sequence of independent claim components plus the
traded-asset inputs (drift, covariance, horizon, risk aversion). Hedging the
first ``n`` components leaves the tail claim: the sum of all components with
index above ``n``. Its CGF is assembled from the explicitly listed head
components plus a closed-form remainder when the parameters decay
geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cgf import (
    ComponentFamily,
    CustomComponent,
    GaussianComponent,
    PoissonComponent,
)
from .errors import (
    CgfOverflowError,
    SpecValidationError,
    TailTruncationError,
)
from .extreal import ExtReal

_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class GeometricTail:
    """Components beyond the explicit list decay geometrically.

    The decaying parameter is the variance for Gaussian components and the
    intensity for Poisson components: ``param_i = coeff * ratio**i`` for the
    absolute index ``i``. Gaussian tails may additionally carry geometrically
    decaying means.
    """

    kind: str  # "gaussian" | "poisson"
    coeff: float
    ratio: float
    mean_coeff: float = 0.0
    mean_ratio: float | None = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "poisson"):
            raise SpecValidationError("tail.family", f"unknown kind {self.kind!r}")
        if not self.coeff > 0.0:
            raise SpecValidationError("tail.coeff", "must be > 0")
        if not 0.0 < self.ratio < 1.0:
            raise SpecValidationError(
                "tail.ratio", "must lie in (0, 1): tail not summable"
            )
        mr = self.ratio if self.mean_ratio is None else self.mean_ratio
        if not 0.0 < mr < 1.0:
            raise SpecValidationError("tail.mean_ratio", "must lie in (0, 1)")
        object.__setattr__(self, "mean_ratio", mr)
        if self.kind == "poisson" and self.mean_coeff != 0.0:
            raise SpecValidationError(
                "tail.mean_coeff", "only Gaussian tails carry a mean decay"
            )

    def param_sum_beyond(self, m: int) -> float:
        """sum_{i>m} coeff * ratio**i."""
        return math.exp(self.log_param_sum_beyond(m))

    def log_param_sum_beyond(self, m: int) -> float:
        return (
            math.log(self.coeff)
            + (m + 1) * math.log(self.ratio)
            - math.log1p(-self.ratio)
        )

    def mean_sum_beyond(self, m: int) -> float:
        if self.mean_coeff == 0.0:
            return 0.0
        return (
            self.mean_coeff
            * self.mean_ratio ** (m + 1)
            / (1.0 - self.mean_ratio)
        )

    def component(self, i: int) -> ComponentFamily:
        p = self.coeff * self.ratio**i
        if self.kind == "gaussian":
            return GaussianComponent(
                mean=self.mean_coeff * self.mean_ratio**i, variance=p
            )
        return PoissonComponent(intensity=p)


@dataclass(frozen=True)
class ExplicitTail:
    """The component list is exhaustive; the claim has finitely many parts."""


TailRule = GeometricTail | ExplicitTail


@dataclass(frozen=True)
class MarketSpec:
    """Immutable description of one market sequence."""

    risk_aversion: float
    horizon: float
    components: tuple[ComponentFamily, ...]
    tail: TailRule
    drift: tuple[float, ...] = ()
    covariance: np.ndarray | None = None  # None means identity of any size
    scaling_rule: str | None = None
    scaling_fn: Callable[[int], float] | None = None
    eps_tail: float = 1e-12

    def __post_init__(self):
        if not self.risk_aversion > 0.0:
            raise SpecValidationError("risk_aversion", "must be > 0")
        if not self.horizon > 0.0:
            raise SpecValidationError("horizon", "must be > 0")
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "drift", tuple(float(m) for m in self.drift))
        if isinstance(self.tail, ExplicitTail) and not self.components:
            raise SpecValidationError("components", "explicit market has none")
        if self.covariance is not None:
            cov = np.asarray(self.covariance, dtype=float)
            if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
                raise SpecValidationError("sigma_cov", "must be square")
            if not np.allclose(cov, cov.T, atol=1e-9 * (1.0 + np.abs(cov).max())):
                raise SpecValidationError("sigma_cov", "must be symmetric")
            if np.linalg.eigvalsh(cov).min() <= 0.0:
                raise SpecValidationError(
                    "sigma_cov", "must be uniformly elliptic (eigenvalues > 0)"
                )
            if len(self.drift) > cov.shape[0]:
                raise SpecValidationError(
                    "mu", "longer than the stored covariance block"
                )
            object.__setattr__(self, "covariance", cov)
        if not 0.0 < self.eps_tail < 1e-3:
            raise SpecValidationError("eps_tail", "must lie in (0, 1e-3)")

    # components are 1-indexed, as is the hedge horizon n
    @property
    def n_explicit(self) -> int:
        return len(self.components)

    def component(self, i: int) -> ComponentFamily:
        if i < 1:
            raise SpecValidationError("component", f"index {i} out of range")
        if i <= self.n_explicit:
            return self.components[i - 1]
        if isinstance(self.tail, GeometricTail):
            return self.tail.component(i)
        raise SpecValidationError(
            f"components[{i - 1}]", "beyond the explicit list of a finite market"
        )

    def tail_claim(self, n: int) -> "TailClaim":
        if n < 0 or int(n) != n:
            raise SpecValidationError("n", "hedge index must be an integer >= 0")
        return TailClaim(market=self, n=int(n))

    @property
    def asymptotic_support(self) -> tuple[float, float]:
        """Limits of the tail's essential bounds as the hedge index grows."""
        if isinstance(self.tail, GeometricTail):
            if self.tail.kind == "gaussian":
                return (-math.inf, math.inf)
            return (0.0, math.inf)
        return (0.0, 0.0)


@dataclass(frozen=True)
class TailClaim:
    """The unhedged part of the claim in market ``n``: components above ``n``.

    ``n_trunc`` marks where term-by-term summation stops: beyond it either a
    geometric closed form takes over (exact, no truncation error) or, for a
    finite market, there are no components at all.
    """

    market: MarketSpec
    n: int
    n_trunc: int = field(init=False)
    eps_tail: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n_trunc", max(self.n, self.market.n_explicit))
        object.__setattr__(self, "eps_tail", self.market.eps_tail)

    @property
    def _head(self) -> tuple[ComponentFamily, ...]:
        return self.market.components[self.n : self.market.n_explicit]

    @property
    def _geo(self) -> GeometricTail | None:
        t = self.market.tail
        return t if isinstance(t, GeometricTail) else None

    def is_degenerate(self) -> bool:
        return not self._head and self._geo is None

    def cgf(self, lam: float) -> float:
        total = sum(c.cgf(lam) for c in self._head)
        geo = self._geo
        if geo is not None:
            if geo.kind == "gaussian":
                s = geo.param_sum_beyond(self.n_trunc)
                total += 0.5 * lam * lam * s + lam * geo.mean_sum_beyond(self.n_trunc)
            else:
                total += _poisson_cgf(lam, geo.param_sum_beyond(self.n_trunc))
        return total

    def cgf_derivative(self, lam: float) -> float:
        total = sum(c.cgf_derivative(lam) for c in self._head)
        geo = self._geo
        if geo is not None:
            if geo.kind == "gaussian":
                total += lam * geo.param_sum_beyond(self.n_trunc)
                total += geo.mean_sum_beyond(self.n_trunc)
            else:
                ex = lam + geo.log_param_sum_beyond(self.n_trunc)
                total += math.exp(ex) if ex < _LOG_MAX else math.inf
        return total

    def mean(self) -> float:
        total = sum(c.component_mean() for c in self._head)
        geo = self._geo
        if geo is not None:
            if geo.kind == "gaussian":
                total += geo.mean_sum_beyond(self.n_trunc)
            else:
                total += geo.param_sum_beyond(self.n_trunc)
        return total

    def variance(self) -> float:
        total = sum(c.component_variance() for c in self._head)
        geo = self._geo
        if geo is not None:
            total += geo.param_sum_beyond(self.n_trunc)
        return total

    def support(self) -> tuple[float, float]:
        lo = hi = 0.0
        for c in self._head:
            clo, chi = c.support()
            lo += clo
            hi += chi
        geo = self._geo
        if geo is not None:
            if geo.kind == "gaussian":
                lo, hi = -math.inf, math.inf
            else:
                hi = math.inf
        return (lo, hi)

    def log_variance(self) -> float:
        """log of the tail variance, exact even where the sum underflows."""
        geo = self._geo
        if not self._head:
            if geo is None:
                return -math.inf
            return geo.log_param_sum_beyond(self.n_trunc)
        v = self.variance()
        if v <= 0.0:
            return -math.inf
        return math.log(v)

    def log_mean(self) -> float:
        """log of the tail mean; only meaningful for nonnegative components."""
        geo = self._geo
        if not self._head and geo is not None and geo.kind == "poisson":
            return geo.log_param_sum_beyond(self.n_trunc)
        m = self.mean()
        if m <= 0.0:
            return -math.inf
        return math.log(m)

    def scaled_cgf(self, lam: float, log_rate: float) -> float:
        """(1/r) * CGF(lam * r) with r = exp(log_rate), assembled in log space.

        Entries whose true value exceeds the floating-point range come back
        as +inf rather than raising.
        """
        rate = math.exp(log_rate) if log_rate < _LOG_MAX else math.inf
        total = 0.0
        for c in self._head:
            total += _scaled_component(c, lam, rate, log_rate)
            if math.isinf(total):
                return total
        geo = self._geo
        if geo is not None:
            if geo.kind == "gaussian":
                prod = log_rate + geo.log_param_sum_beyond(self.n_trunc)
                term = math.exp(prod) if prod < _LOG_MAX else math.inf
                total += 0.5 * lam * lam * term
                if math.isfinite(rate):
                    total += lam * geo.mean_sum_beyond(self.n_trunc)
            else:
                log_b = geo.log_param_sum_beyond(self.n_trunc)
                if not math.isfinite(rate):
                    return math.inf if lam > 0.0 else total
                ex = lam * rate + log_b
                if ex > _LOG_MAX:
                    return math.inf
                total += (math.exp(ex) - math.exp(log_b)) / rate
        return total


def _poisson_cgf(lam: float, intensity: float) -> float:
    return math.expm1(lam) * intensity if lam < _LOG_MAX else math.inf


def _scaled_component(c: ComponentFamily, lam: float, rate: float, log_rate: float) -> float:
    if isinstance(c, GaussianComponent):
        prod = log_rate + math.log(c.variance)
        term = math.exp(prod) if prod < _LOG_MAX else math.inf
        out = 0.5 * lam * lam * term
        return out + (lam * c.mean if math.isfinite(rate) else 0.0)
    if isinstance(c, PoissonComponent):
        if not math.isfinite(rate):
            return math.inf if lam > 0.0 else 0.0
        ex = lam * rate + math.log(c.intensity)
        if ex > _LOG_MAX:
            return math.inf
        return (math.exp(ex) - c.intensity) / rate
    # custom: bounded maps flatten to lam * endpoint; otherwise evaluate directly
    if not math.isfinite(rate):
        lo, hi = c.support()
        return lam * (hi if lam > 0.0 else lo) if lam != 0.0 else 0.0
    try:
        return c.cgf(lam * rate) / rate
    except CgfOverflowError:
        return math.inf


def tail_cgf(tail: TailClaim, lam: float) -> float:
    """CGF of the tail claim at ``lam``: sum of component CGFs above ``n``."""
    return tail.cgf(lam)


def tail_cgf_derivative(tail: TailClaim, lam: float) -> float:
    """Derivative of the tail CGF at ``lam`` (the exponentially tilted mean)."""
    return tail.cgf_derivative(lam)


def support_bounds(tail: TailClaim) -> tuple[ExtReal, ExtReal]:
    """Essential bounds of the tail claim, as extended reals."""
    lo, hi = tail.support()
    return (ExtReal(lo), ExtReal(hi))


def truncation_index(tail: TailClaim, budget: float = 1e-14) -> int:
    """Smallest index m with variance-beyond(m) <= budget * variance-beyond(n).

    For finite markets this is the last explicit index (remainder exactly
    zero). Raises when the budget cannot be met.
    """
    geo = tail._geo
    if geo is None:
        return tail.market.n_explicit
    steps = math.ceil(math.log(budget) / math.log(geo.ratio))
    m = max(tail.n, tail.market.n_explicit) + max(steps, 1)
    check = TailClaim(tail.market, tail.n)
    total = check.variance()
    beyond = geo.param_sum_beyond(m)
    if total > 0.0 and beyond > budget * total * (1.0 + 1e-9):
        raise TailTruncationError(
            f"cannot meet variance budget {budget} truncating at {m}"
        )
    return m
