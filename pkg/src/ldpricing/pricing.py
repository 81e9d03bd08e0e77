"""Indifference prices and arbitrage-free bounds.

For an exponential investor the per-unit indifference price of ``q`` units
splits into the replication cost of the hedgeable part plus the certainty
equivalent of the unhedged tail:

    total = hedgeable + offset,   offset = -CGF(-q * a) / (q * a).

At ``q = 0`` the offset is defined by its analytic limit, the tail mean.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SpecValidationError
from .extreal import ExtReal
from .hedge import hedgeable_price
from .market import MarketSpec, support_bounds


@dataclass(frozen=True)
class PriceQuote:
    """Price decomposition for ``quantity`` units in market ``n``."""

    n: int
    quantity: float
    hedgeable: float
    offset: float
    total: float
    risk_aversion: float


def indifference_price(
    market: MarketSpec, n: int, quantity: float, a: float | None = None
) -> PriceQuote:
    """Per-unit indifference price for ``quantity`` units of the claim.

    Parameters
    ----------
    market : MarketSpec
        Market description.
    n : int
        Number of hedgeable components.
    quantity : float
        Position size; zero is allowed and returns the small-position limit.
    a : float, optional
        Risk aversion override; defaults to the market's.
    """
    a = market.risk_aversion if a is None else float(a)
    if not a > 0.0:
        raise SpecValidationError("risk_aversion", "must be > 0")
    tail = market.tail_claim(n)
    d = hedgeable_price(market, n)
    if quantity == 0.0:
        offset = tail.mean()
    else:
        qa = quantity * a
        offset = -tail.cgf(-qa) / qa
    return PriceQuote(
        n=n,
        quantity=float(quantity),
        hedgeable=d,
        offset=offset,
        total=d + offset,
        risk_aversion=a,
    )


def arbitrage_bounds(market: MarketSpec, n: int) -> tuple[ExtReal, ExtReal]:
    """Open interval of arbitrage-free prices in market ``n``.

    The bounds are the replication cost shifted by the essential bounds of
    the tail; they collapse to a point when the tail is degenerate.
    """
    d = hedgeable_price(market, n)
    lo, hi = support_bounds(market.tail_claim(n))
    return (lo + d, hi + d)
