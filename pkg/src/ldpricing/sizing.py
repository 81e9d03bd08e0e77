"""Optimal purchase quantities from the first-order conditions.

Buying ``q`` units at unit price ``p`` is optimal exactly when the tilted
tail mean matches the price net of the replication cost:

    cgf_derivative(-q * a) = p - d.

The left side is strictly decreasing in ``q`` for a nondegenerate tail, so
the root is unique and found by bracketed bisection with geometric bracket
expansion. Prices too close to an arbitrage bound blow the bracket up; that
is reported as an error rather than a meaningless huge float.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import NearBoundaryError, PriceNotArbitrageFreeError
from .hedge import hedgeable_price
from .market import MarketSpec

_BRACKET_CAP = 2.0**60
_MAX_ITER = 200


@dataclass(frozen=True)
class OptimalQuantity:
    """Solution of the first-order conditions."""

    quantity: float
    residual: float
    iterations: int
    bracket: tuple[float, float]


def optimal_quantity(
    market: MarketSpec, n: int, price: float, a: float | None = None
) -> OptimalQuantity:
    """Unique optimal number of units to buy at unit price ``price``.

    ``price`` must lie strictly inside the arbitrage-free interval of
    market ``n``.
    """
    a = market.risk_aversion if a is None else float(a)
    tail = market.tail_claim(n)
    d = hedgeable_price(market, n)
    target = price - d
    lo_s, hi_s = tail.support()
    if not lo_s < target < hi_s:
        raise PriceNotArbitrageFreeError(
            f"price {price!r} outside the open interval "
            f"({lo_s + d!r}, {hi_s + d!r}) of market n={n}"
        )

    def excess(q: float) -> float:
        # strictly decreasing in q; root at the optimal quantity
        return tail.cgf_derivative(-q * a) - target

    tol = 1e-10 * (1.0 + abs(target))
    e0 = excess(0.0)
    if abs(e0) <= 0.0:
        return OptimalQuantity(0.0, abs(e0), 0, (0.0, 0.0))

    lo, hi = -1.0, 1.0
    while excess(lo) <= 0.0:
        lo *= 2.0
        if -lo > _BRACKET_CAP:
            raise NearBoundaryError(
                f"bracket exceeded 2^60 expanding left; price {price!r} is too "
                f"close to an arbitrage bound"
            )
    while excess(hi) >= 0.0:
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise NearBoundaryError(
                f"bracket exceeded 2^60 expanding right; price {price!r} is too "
                f"close to an arbitrage bound"
            )

    q = 0.5 * (lo + hi)
    res = abs(excess(q))
    iterations = 0
    for iterations in range(1, _MAX_ITER + 1):
        q = 0.5 * (lo + hi)
        e = excess(q)
        res = abs(e)
        if res <= tol and (hi - lo) <= 1e-12 * (1.0 + abs(q)):
            break
        if e > 0.0:
            lo = q
        elif e < 0.0:
            hi = q
        else:
            break
    return OptimalQuantity(
        quantity=q, residual=res, iterations=iterations, bracket=(lo, hi)
    )


def purchase_objective(
    market: MarketSpec, n: int, price: float, quantity: float, a: float | None = None
) -> float:
    """Convex objective whose minimizer is the optimal quantity."""
    a = market.risk_aversion if a is None else float(a)
    tail = market.tail_claim(n)
    d = hedgeable_price(market, n)
    return quantity * (price - d) + tail.cgf(-quantity * a) / a


@dataclass(frozen=True)
class ScalingRow:
    n: int
    quantity: float
    rate: float
    ratio: float


def quantity_scaling(
    market: MarketSpec,
    price_offset: float,
    n_list: Sequence[int],
    a: float | None = None,
) -> list[ScalingRow]:
    """Optimal quantities across markets at a fixed price offset over cost.

    The offset must lie inside the limiting essential-bound interval of the
    tail so the quoted price stays arbitrage free for every listed market.
    """
    from .ldp import scaling_sequence

    lo, hi = market.asymptotic_support
    if not lo < price_offset < hi:
        raise PriceNotArbitrageFreeError(
            f"price offset {price_offset!r} outside the limiting interval "
            f"({lo!r}, {hi!r})"
        )
    if lo == hi:
        warnings.warn(
            "degenerate limiting bounds: optimal quantities are not informative",
            stacklevel=2,
        )
    rows = []
    for n in n_list:
        d = hedgeable_price(market, n)
        opt = optimal_quantity(market, n, d + price_offset, a=a)
        rate = scaling_sequence(market, n)
        rows.append(
            ScalingRow(
                n=int(n),
                quantity=opt.quantity,
                rate=rate,
                ratio=opt.quantity / rate,
            )
        )
    return rows
