"""Valuation of the hedgeable part of the claim.

The first ``n`` components are replicable by trading the first ``n`` assets.
Their replication cost is the sum of component means under the risk-neutral
measure, which shifts each normal driver by minus the market price of risk
times the horizon. The market price of risk comes from forward substitution
against the lower-triangular factor of the covariance block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .cgf import (
    ComponentFamily,
    GaussianComponent,
    PoissonComponent,
    _poisson_cdf_table,
)
from .errors import MissingHedgeError, NotPositiveDefiniteError
from .market import MarketSpec


def cholesky_lower(cov: np.ndarray) -> np.ndarray:
    """Lower-triangular square root of a symmetric positive definite matrix.

    Parameters
    ----------
    cov : ndarray
        Symmetric positive definite matrix.

    Returns
    -------
    ndarray
        The unique lower-triangular factor L with positive diagonal and
        ``L @ L.T == cov``.

    Raises
    ------
    NotPositiveDefiniteError
        If a pivot is not strictly positive; the error names its index.
    """
    a = np.asarray(cov, dtype=float)
    k = a.shape[0]
    low = np.zeros_like(a)
    for i in range(k):
        pivot = a[i, i] - np.dot(low[i, :i], low[i, :i])
        if pivot <= 0.0:
            raise NotPositiveDefiniteError(i, float(pivot))
        low[i, i] = math.sqrt(pivot)
        if i + 1 < k:
            low[i + 1 :, i] = (
                a[i + 1 :, i] - low[i + 1 :, :i] @ low[i, :i]
            ) / low[i, i]
    return low


def market_price_of_risk(chol: np.ndarray, drift: np.ndarray) -> np.ndarray:
    """Solve ``chol @ theta = drift`` by forward substitution."""
    low = np.asarray(chol, dtype=float)
    mu = np.asarray(drift, dtype=float)
    if low.shape[0] != mu.shape[0]:
        raise MissingHedgeError(
            f"dimension mismatch: {low.shape[0]} assets vs {mu.shape[0]} drifts"
        )
    theta = np.zeros_like(mu)
    for i in range(mu.shape[0]):
        theta[i] = (mu[i] - np.dot(low[i, :i], theta[:i])) / low[i, i]
    return theta


@dataclass(frozen=True)
class HedgeModel:
    """Traded-asset block for the first ``n`` assets."""

    drift: np.ndarray
    covariance: np.ndarray
    horizon: float
    chol: np.ndarray
    theta: np.ndarray

    @classmethod
    def for_market(cls, market: MarketSpec, n: int) -> "HedgeModel":
        mu = np.zeros(n)
        head = min(n, len(market.drift))
        mu[:head] = market.drift[:head]
        if market.covariance is None:
            cov = np.eye(n)
            chol = np.eye(n)
            theta = mu.copy()
        else:
            if market.covariance.shape[0] < n:
                raise MissingHedgeError(
                    f"covariance block holds {market.covariance.shape[0]} assets,"
                    f" hedge index {n} requested"
                )
            cov = market.covariance[:n, :n]
            chol = cholesky_lower(cov)
            theta = market_price_of_risk(chol, mu)
        return cls(drift=mu, covariance=cov, horizon=market.horizon, chol=chol, theta=theta)


def risk_neutral_component_mean(
    family: ComponentFamily, theta_i: float, horizon: float
) -> float:
    """Mean of one component under the risk-neutral driver shift.

    The component is a function of its normal driver; under the risk-neutral
    measure the driver mean moves by ``-theta_i * horizon``. A zero market
    price of risk leaves the physical mean untouched.
    """
    if horizon <= 0.0:
        raise MissingHedgeError("horizon must be > 0")
    if theta_i == 0.0:
        return family.component_mean()
    shift = theta_i * math.sqrt(horizon)
    if isinstance(family, GaussianComponent):
        return family.mean - math.sqrt(family.variance) * shift
    if isinstance(family, PoissonComponent):
        return _poisson_shifted_mean(family.intensity, shift)
    return family._driver_expectation(shift=shift)


def _poisson_shifted_mean(intensity: float, shift: float) -> float:
    # B = F^{-1}(Phi(Z)); E[B] under the shifted driver is an exact sum of
    # interval probabilities of the standard normal
    cdf = _poisson_cdf_table(intensity)
    edges = ndtri(np.clip(cdf, 0.0, 1.0))  # z-levels separating k from k+1
    upper = ndtr(edges + shift)  # P[B <= k] under the shifted driver
    probs = np.diff(np.concatenate(([0.0], upper)))
    ks = np.arange(len(cdf), dtype=float)
    total = float(np.dot(ks, probs))
    # mass beyond the table, assigned to the last level as a lower bound;
    # the table already reaches cumulative 1 - 1e-17 so this is negligible
    total += (1.0 - float(upper[-1])) * float(ks[-1] + 1.0)
    return total


def hedgeable_price(market: MarketSpec, n: int) -> float:
    """Replication cost of the first ``n`` components.

    Raises if some component below ``n`` has no hedge representation (finite
    market exhausted, or covariance block too small for a nonzero drift).
    """
    if n < 0 or int(n) != n:
        raise MissingHedgeError("hedge index must be an integer >= 0")
    n = int(n)
    if n == 0:
        return 0.0
    from .market import ExplicitTail

    if isinstance(market.tail, ExplicitTail):
        # a finite market runs out of components; extra assets hedge nothing
        n = min(n, market.n_explicit)
    try:
        families = [market.component(i) for i in range(1, n + 1)]
    except Exception as exc:
        raise MissingHedgeError(str(exc)) from exc
    model = HedgeModel.for_market(market, n)
    return sum(
        risk_neutral_component_mean(fam, float(model.theta[i]), market.horizon)
        for i, fam in enumerate(families)
    )


def hedgeable_price_limit(market: MarketSpec) -> float:
    """Limit of the replication cost as every component becomes hedgeable."""
    from .market import ExplicitTail

    m0 = max(market.n_explicit, len(market.drift))
    if isinstance(market.tail, ExplicitTail):
        m0 = market.n_explicit
    base = hedgeable_price(market, m0)
    return base + market.tail_claim(m0).mean()
