"""Worst-case instances for oblivious best-price policies.

Policies are treated as black boxes: a policy is any callable
``policy(price, prediction, bounds) -> bool`` saying whether it would accept
``price`` now.  Only memoryless (threshold-style) deterministic policies are
meaningful here; randomized policies are not supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import PriceBounds, PriceSequence, TradeOutcome, competitive_ratio, on_star_reservation
from .errors import InvalidInputError, NonThresholdPolicyError
from .predictors import (
    ErrorBounds,
    ErrorSpec,
    Parity,
    oblivious_lower_bound,
    ora_reservation,
    robust_mix_reservation,
)

Policy = Callable[[float, float, PriceBounds], bool]

DEFAULT_RESOLUTION = 2**20
DEFAULT_LENGTH = 200
ABOVE_M = math.inf
_SPOT_CHECKS = 64


def ora_policy(r: float) -> Policy:
    ora_reservation(1.0, r)  # validates r

    def accept(price: float, prediction: float, bounds: PriceBounds) -> bool:
        return price >= ora_reservation(prediction, r)

    accept.__name__ = f"ora_{r:g}"
    return accept


def robust_mix_policy(hb: ErrorBounds) -> Policy:
    def accept(price: float, prediction: float, bounds: PriceBounds) -> bool:
        return price >= robust_mix_reservation(prediction, bounds, hb)

    accept.__name__ = f"robust_mix_{hb.h_neg:g}_{hb.h_pos:g}"
    return accept


def on_star_policy() -> Policy:
    def accept(price: float, prediction: float, bounds: PriceBounds) -> bool:
        return price >= on_star_reservation(bounds)

    accept.__name__ = "on_star"
    return accept


def play(policy: Policy, seq: PriceSequence, prediction: float) -> TradeOutcome:
    """Run a black-box policy day by day; the last price is taken by default."""
    d = len(seq.prices)
    for day, price in enumerate(seq.prices, start=1):
        if day == d:
            break
        if policy(price, prediction, seq.bounds):
            return TradeOutcome(price, day, False)
    last = seq.prices[-1]
    return TradeOutcome(last, d, not policy(last, prediction, seq.bounds))


@dataclass(frozen=True)
class PolicyProbe:
    """Day-1 acceptance threshold of a policy, relative to its prediction.

    ``threshold_ratio`` is ``math.inf`` when no price in ``[m, M]`` is accepted.
    ``step`` is the multiplicative spacing of the probe grid.
    """

    threshold_ratio: float
    threshold_price: float
    resolution: int
    step: float

    @property
    def above_m(self) -> bool:
        return math.isinf(self.threshold_ratio)


def probe_threshold(
    policy: Policy, p: float, bounds: PriceBounds, resolution: int = DEFAULT_RESOLUTION
) -> PolicyProbe:
    """Find the smallest day-1 price in ``[m, M]`` the policy accepts.

    Binary search over ``resolution`` log-spaced grid prices, then bisection
    inside the final grid cell down to adjacent floats, so reservation-style
    policies are recovered exactly.  A sample of grid prices is re-checked
    afterwards; any price on the wrong side of the threshold means the policy
    is not a threshold policy.
    """
    if resolution < 2:
        raise InvalidInputError(f"resolution must be >= 2, got {resolution}")
    m, M = bounds.m, bounds.M
    span = M / m
    last = resolution - 1

    def grid(i: int) -> float:
        if i == 0:
            return m
        if i == last:
            return M
        return m * span ** (i / last)

    def accepts(x: float) -> bool:
        return bool(policy(x, p, bounds))

    step = span ** (1 / last)
    if not accepts(M):
        threshold = math.inf
    elif accepts(m):
        threshold = m
    else:
        lo, hi = 0, last
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if accepts(grid(mid)):
                hi = mid
            else:
                lo = mid
        a, b = grid(lo), grid(hi)
        while math.nextafter(a, math.inf) < b:
            mid = a + (b - a) / 2
            if not a < mid < b:
                break
            if accepts(mid):
                b = mid
            else:
                a = mid
        threshold = b

    for k in range(_SPOT_CHECKS + 1):
        x = grid(round(k * last / _SPOT_CHECKS))
        if accepts(x) != (x >= threshold):
            raise NonThresholdPolicyError(
                f"policy {'accepts' if accepts(x) else 'rejects'} {x} on day 1, "
                f"inconsistent with threshold {threshold}"
            )

    if math.isinf(threshold):
        return PolicyProbe(ABOVE_M, math.inf, resolution, step)
    ratio = threshold / p
    # the adversary multiplies back by p; make sure that lands on an accepted price
    while ratio * p < threshold:
        ratio = math.nextafter(ratio, math.inf)
    return PolicyProbe(ratio, threshold, resolution, step)


def adversary_prediction(err: ErrorSpec, bounds: PriceBounds) -> float:
    """Prediction the lower-bound adversary commits to for error ``err``."""
    if err.parity is Parity.NEGATIVE:
        return bounds.M
    return bounds.clip(bounds.M / (1 + err.eta))


def thm1_instance(
    err: ErrorSpec, r_policy: float, bounds: PriceBounds, length: int = DEFAULT_LENGTH
) -> tuple[PriceSequence, float]:
    """Adversarial sequence against a policy with day-1 threshold ratio ``r_policy``.

    Returns the sequence and the prediction ``p``.  Negative errors use
    ``p = M``, ``p* = (1-eta)M``; positive errors use ``p* = M``,
    ``p = M/(1+eta)``.  If the policy would accept ``r_policy * p <= p*`` on
    day 1 the sequence is ``[r_policy*p, p*, p*, ...]``; otherwise it opens
    with ``p*`` and collapses to ``m``.
    """
    if length < 2:
        raise InvalidInputError(f"adversarial sequences need length >= 2, got {length}")
    err.require_feasible(bounds)
    p = adversary_prediction(err, bounds)
    p_star = bounds.clip(p * err.signed_factor)
    if r_policy <= err.signed_factor:
        head = [bounds.clip(r_policy * p), p_star]
    else:
        head = [p_star, bounds.m]
    prices = head + [head[-1]] * (length - len(head))
    return PriceSequence(tuple(prices), bounds), p


@dataclass(frozen=True)
class AdversarialRun:
    probe: PolicyProbe
    sequence: PriceSequence
    prediction: float
    outcome: TradeOutcome
    realized: float
    lower_bound: float


def adversarial_run(
    policy: Policy,
    err: ErrorSpec,
    bounds: PriceBounds,
    length: int = DEFAULT_LENGTH,
    resolution: int = DEFAULT_RESOLUTION,
) -> AdversarialRun:
    """Probe ``policy``, build its worst-case instance, and play it."""
    p = adversary_prediction(err, bounds)
    probe = probe_threshold(policy, p, bounds, resolution)
    seq, p = thm1_instance(err, probe.threshold_ratio, bounds, length)
    outcome = play(policy, seq, p)
    return AdversarialRun(
        probe=probe,
        sequence=seq,
        prediction=p,
        outcome=outcome,
        realized=competitive_ratio(seq, outcome),
        lower_bound=oblivious_lower_bound(err, probe.threshold_ratio, bounds),
    )


def verify_lower_bound(
    policy: Policy,
    err: ErrorSpec,
    bounds: PriceBounds,
    length: int = DEFAULT_LENGTH,
    resolution: int = DEFAULT_RESOLUTION,
) -> float:
    """Realized ratio of ``policy`` on its own adversarial instance."""
    return adversarial_run(policy, err, bounds, length, resolution).realized
