"""The online search game: price sequences, reservation policies and ratios.

A reservation policy with threshold ``q`` accepts the first revealed price that
is at least ``q``; if no such price appears, the last price is taken by default.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from functools import cached_property
from itertools import accumulate
from typing import Iterable, Sequence

from .errors import InvalidInputError, OutOfRangeError

__all__ = [
    "PriceBounds",
    "PriceSequence",
    "TradeOutcome",
    "best_price",
    "competitive_ratio",
    "on_star_reservation",
    "run_reservation",
]


def _check_price(x: float, what: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise InvalidInputError(f"{what} must be a finite positive number, got {x!r}")
    return x


@dataclass(frozen=True)
class PriceBounds:
    """Known lower and upper bounds ``m <= M`` on every price."""

    m: float
    M: float

    def __post_init__(self):
        m = _check_price(self.m, "m")
        M = _check_price(self.M, "M")
        if m > M:
            raise InvalidInputError(f"need m <= M, got m={m}, M={M}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "M", M)

    @property
    def ratio(self) -> float:
        return self.M / self.m

    def contains(self, price: float) -> bool:
        return self.m <= price <= self.M

    def clip(self, price: float) -> float:
        return min(max(price, self.m), self.M)

    @classmethod
    def of(cls, prices: Iterable[float]) -> "PriceBounds":
        prices = list(prices)
        if not prices:
            raise InvalidInputError("cannot take bounds of an empty price list")
        return cls(min(prices), max(prices))


@dataclass(frozen=True)
class PriceSequence:
    """Prices revealed on days ``1..d`` together with their bounds.

    When ``bounds`` is omitted the sequence's own minimum and maximum are used.
    """

    prices: tuple[float, ...]
    bounds: PriceBounds | None = field(default=None)

    def __post_init__(self):
        prices = tuple(_check_price(p, "price") for p in self.prices)
        if not prices:
            raise InvalidInputError("a price sequence needs at least one day")
        bounds = self.bounds if self.bounds is not None else PriceBounds.of(prices)
        for day, p in enumerate(prices, start=1):
            if not bounds.contains(p):
                raise OutOfRangeError(
                    f"price {p} on day {day} outside [{bounds.m}, {bounds.M}]"
                )
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "bounds", bounds)

    def __len__(self) -> int:
        return len(self.prices)

    @cached_property
    def _running_max(self) -> list[float]:
        return list(accumulate(self.prices, max))


@dataclass(frozen=True)
class TradeOutcome:
    accepted_price: float
    accept_day: int  # 1-based
    forced_last_day: bool


def _as_sequence(seq: PriceSequence | Sequence[float]) -> PriceSequence:
    if isinstance(seq, PriceSequence):
        return seq
    return PriceSequence(tuple(seq))


def run_reservation(seq: PriceSequence | Sequence[float], reservation: float) -> TradeOutcome:
    """Play the reservation policy with threshold ``reservation`` on ``seq``.

    The threshold need not lie in ``[m, M]``: below ``m`` it accepts on day 1,
    above ``M`` it always ends on the forced last-day sale.
    """
    seq = _as_sequence(seq)
    reservation = _check_price(reservation, "reservation")
    # running max is non-decreasing, so the first day reaching the threshold is a bisection
    idx = bisect_left(seq._running_max, reservation)
    d = len(seq.prices)
    if idx < d:
        return TradeOutcome(seq.prices[idx], idx + 1, False)
    return TradeOutcome(seq.prices[-1], d, True)


def best_price(seq: PriceSequence | Sequence[float]) -> float:
    seq = _as_sequence(seq)
    return max(seq.prices)


def competitive_ratio(seq: PriceSequence | Sequence[float], outcome: TradeOutcome) -> float:
    """Ratio of the best price in ``seq`` to the price the outcome accepted."""
    seq = _as_sequence(seq)
    d = len(seq.prices)
    if not 1 <= outcome.accept_day <= d:
        raise InvalidInputError(f"accept_day {outcome.accept_day} outside 1..{d}")
    if seq.prices[outcome.accept_day - 1] != outcome.accepted_price:
        raise InvalidInputError(
            f"outcome price {outcome.accepted_price} does not match day "
            f"{outcome.accept_day} price {seq.prices[outcome.accept_day - 1]}"
        )
    if outcome.forced_last_day and outcome.accept_day != d:
        raise InvalidInputError("a forced sale must happen on the last day")
    return best_price(seq) / outcome.accepted_price


def on_star_reservation(bounds: PriceBounds) -> float:
    """Threshold of the optimal deterministic algorithm without predictions.

    ``sqrt(m*M)`` balances the two adversarial outcomes ``M/q`` and ``q/m``,
    giving worst-case ratio ``sqrt(M/m)``.
    """
    return bounds.clip(math.sqrt(bounds.m * bounds.M))
