"""Best-price predictions: error model, ORA_r, Robust-Mix and their bounds.

A prediction ``p`` of the best price ``p*`` carries a signed error.  When
``p* <= p`` the error is *negative* with ``1 - eta = p*/p``; otherwise it is
*positive* with ``1 + eta = p*/p``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import PriceBounds, on_star_reservation
from .errors import (
    ContractViolationError,
    InvalidInputError,
    NoWitnessError,
    OutOfRangeError,
)

__all__ = [
    "ErrorBounds",
    "ErrorSpec",
    "Parity",
    "corollary1_witness",
    "error_from_pair",
    "oblivious_lower_bound",
    "ora_bound",
    "ora_reservation",
    "prediction_from_truth",
    "robust_mix_bound",
    "robust_mix_reservation",
    "robust_mix_uses_prediction",
]

# relative slack when testing error magnitudes / predictions against range ends
_EDGE = 1e-12


class Parity(str, enum.Enum):
    NEGATIVE = "neg"
    POSITIVE = "pos"

    @classmethod
    def parse(cls, text: str) -> "Parity":
        t = text.strip().lower()
        for member in cls:
            if t in (member.value, member.name.lower()):
                return member
        raise InvalidInputError(f"unknown parity {text!r} (expected 'neg' or 'pos')")


def max_eta(parity: Parity, bounds: PriceBounds) -> float:
    """Largest error magnitude compatible with ``p, p*`` both in ``[m, M]``."""
    if parity is Parity.NEGATIVE:
        return (bounds.M - bounds.m) / bounds.M
    return (bounds.M - bounds.m) / bounds.m


@dataclass(frozen=True)
class ErrorSpec:
    parity: Parity
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity(self.parity))
        eta = float(self.eta)
        if not math.isfinite(eta) or eta < 0:
            raise InvalidInputError(f"eta must be finite and >= 0, got {eta!r}")
        if self.parity is Parity.NEGATIVE and eta >= 1:
            raise InvalidInputError(f"negative error must be < 1, got {eta}")
        object.__setattr__(self, "eta", eta)

    def feasible(self, bounds: PriceBounds) -> bool:
        # positive eta = 0 is admitted: it is the same prediction as negative 0
        return self.eta <= max_eta(self.parity, bounds) * (1 + _EDGE)

    def require_feasible(self, bounds: PriceBounds) -> None:
        if not self.feasible(bounds):
            raise OutOfRangeError(
                f"{self.parity.value} error {self.eta} exceeds "
                f"{max_eta(self.parity, bounds)} for bounds [{bounds.m}, {bounds.M}]"
            )

    @property
    def signed_factor(self) -> float:
        """``p*/p`` implied by this error."""
        if self.parity is Parity.NEGATIVE:
            return 1.0 - self.eta
        return 1.0 + self.eta

    def __str__(self) -> str:
        return f"{self.parity.value}:{self.eta:g}"

    @classmethod
    def parse(cls, text: str) -> "ErrorSpec":
        """Parse ``"neg:0.1"`` / ``"pos:0.25"``."""
        try:
            parity, eta = text.split(":")
            return cls(Parity.parse(parity), float(eta))
        except ValueError as exc:
            raise InvalidInputError(f"bad error spec {text!r}: {exc}") from None


@dataclass(frozen=True)
class ErrorBounds:
    """Upper bounds known to a non-oblivious algorithm on each error parity."""

    h_neg: float
    h_pos: float

    def __post_init__(self):
        for name in ("h_neg", "h_pos"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise InvalidInputError(f"{name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, name, v)
        if self.h_neg >= 1:
            raise InvalidInputError(f"h_neg must be < 1, got {self.h_neg}")

    def feasible(self, bounds: PriceBounds) -> bool:
        return (
            self.h_neg <= max_eta(Parity.NEGATIVE, bounds) * (1 + _EDGE)
            and self.h_pos <= max_eta(Parity.POSITIVE, bounds) * (1 + _EDGE)
        )

    def cap(self, parity: Parity) -> float:
        return self.h_neg if parity is Parity.NEGATIVE else self.h_pos


def prediction_from_truth(
    p_star: float, err: ErrorSpec, bounds: PriceBounds | None = None
) -> float:
    """Prediction ``p`` that has error ``err`` relative to the best price.

    With ``bounds`` the prediction must land in ``[m, M]``; values off by float
    rounding only are snapped onto the boundary.
    """
    p = p_star / err.signed_factor
    if bounds is None:
        return p
    if bounds.contains(p):
        return p
    if bounds.m * (1 - _EDGE) <= p <= bounds.M * (1 + _EDGE):
        return bounds.clip(p)
    raise OutOfRangeError(
        f"error {err} on best price {p_star} gives prediction {p} outside "
        f"[{bounds.m}, {bounds.M}]"
    )


def error_from_pair(p_star: float, p: float) -> ErrorSpec:
    if p_star <= p:
        return ErrorSpec(Parity.NEGATIVE, 1.0 - p_star / p)
    return ErrorSpec(Parity.POSITIVE, p_star / p - 1.0)


def ora_reservation(p: float, r: float) -> float:
    """ORA_r threshold ``r * p``; deliberately not clamped to ``[m, M]``."""
    if not r > 0:
        raise InvalidInputError(f"ORA parameter r must be > 0, got {r!r}")
    return r * p


def oblivious_lower_bound(err: ErrorSpec, r_a: float, bounds: PriceBounds) -> float:
    """Adversarial lower bound on an oblivious policy with day-1 threshold ratio ``r_a``.

    ``r_a`` is the smallest accepted day-1 price divided by the prediction;
    ``math.inf`` stands for a policy that rejects every day-1 price up to ``M``.
    """
    eta = err.eta
    if err.parity is Parity.NEGATIVE:
        if r_a <= 1 - eta:
            return (1 - eta) / r_a
        return (1 - eta) * bounds.M / bounds.m
    if r_a <= 1 + eta:
        return (1 + eta) / r_a
    return bounds.M / bounds.m


def ora_bound(err: ErrorSpec, r: float, bounds: PriceBounds) -> float:
    """Worst-case ratio of ORA_r under error ``err``.

    The piecewise formula is further capped by ``max p* / m`` (``(1-eta)M/m``
    or ``M/m``), which any policy on ``[m, M]`` attains at worst; the cap only
    binds when ``r * p`` drops below ``m``.
    """
    if not r > 0:
        raise InvalidInputError(f"ORA parameter r must be > 0, got {r!r}")
    piecewise = oblivious_lower_bound(err, r, bounds)
    if err.parity is Parity.NEGATIVE:
        return min(piecewise, (1 - err.eta) * bounds.M / bounds.m)
    return min(piecewise, bounds.M / bounds.m)


def robust_mix_uses_prediction(bounds: PriceBounds, hb: ErrorBounds) -> bool:
    """True when Robust-Mix trusts the prediction rather than falling back to ON*."""
    return (1 + hb.h_pos) / (1 - hb.h_neg) <= math.sqrt(bounds.M / bounds.m)


def robust_mix_reservation(p: float, bounds: PriceBounds, hb: ErrorBounds) -> float:
    if robust_mix_uses_prediction(bounds, hb):
        return p * (1 - hb.h_neg)
    return on_star_reservation(bounds)


def robust_mix_bound(err: ErrorSpec, bounds: PriceBounds, hb: ErrorBounds) -> float:
    """``min{(1 -/+ eta)/(1 - h_neg), sqrt(M/m)}`` for an error within its cap.

    Raises ContractViolationError when ``eta`` exceeds the declared cap, since
    the guarantee is conditional on it.
    """
    cap = hb.cap(err.parity)
    if err.eta > cap:
        raise ContractViolationError(
            f"{err.parity.value} error {err.eta} exceeds declared bound {cap}"
        )
    return min(err.signed_factor / (1 - hb.h_neg), math.sqrt(bounds.M / bounds.m))


def corollary1_witness(r_policy: float, bounds: PriceBounds) -> ErrorSpec:
    """An error under which a threshold-ratio-``r_policy`` oblivious policy loses to ON*.

    The returned error makes :func:`oblivious_lower_bound` strictly exceed
    ``sqrt(M/m)``.  For ``r_policy < 1`` the negative window
    ``(1 - r, 1 - sqrt(m/M))`` is tried first; otherwise a positive error
    above ``r*sqrt(M/m) - 1`` (or below ``r - 1``) is used.  Midpoints of the
    open windows keep the choice deterministic.
    """
    if not r_policy > 0:
        raise InvalidInputError(f"r_policy must be > 0, got {r_policy!r}")
    root = math.sqrt(bounds.M / bounds.m)

    if r_policy < 1:
        lo, hi = 1 - r_policy, 1 - 1 / root
        if lo < hi:
            return ErrorSpec(Parity.NEGATIVE, (lo + hi) / 2)

    pos_max = max_eta(Parity.POSITIVE, bounds)
    lo = max(r_policy * root - 1, 0.0)
    if lo < pos_max:
        return ErrorSpec(Parity.POSITIVE, (lo + pos_max) / 2)
    if r_policy > 1 and pos_max > 0:
        return ErrorSpec(Parity.POSITIVE, min(r_policy - 1, pos_max) / 2)
    raise NoWitnessError(
        f"no error beats sqrt(M/m) for r_policy={r_policy} on [{bounds.m}, {bounds.M}]"
    )
