"""Robust linear interval search.

Query ``i`` (1-based) asks whether ``p* < a_i`` on an ``n``-cell geometric
grid.  Without lies the answers read ``0^j 1^(n-j)`` and pin ``p*`` to
``[a_j, a_{j+1})``.  With up to ``h`` lies the string is first repaired where
the lie budget makes a bit provably wrong, then a conservative grid point is
chosen as the reservation price.
"""

from __future__ import annotations

from typing import Sequence

from ..core import PriceBounds
from ..errors import InternalInvariantError, InvalidInputError
from .oracle import ResponseOracle
from .partition import IntervalPartition

ResponseString = tuple[int, ...]


def parse_bits(text: str) -> ResponseString:
    if not text or set(text) - {"0", "1"}:
        raise InvalidInputError(f"expected a non-empty 0/1 string, got {text!r}")
    return tuple(int(c) for c in text)


def format_bits(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def rlis_truthful_responses(p_star: float, part: IntervalPartition) -> ResponseString:
    if not part.bounds.contains(p_star):
        raise InvalidInputError(f"p* = {p_star} outside [{part.bounds.m}, {part.bounds.M}]")
    return tuple(int(p_star < a) for a in part.points()[1:])


def rlis_responses(oracle: ResponseOracle, part: IntervalPartition) -> ResponseString:
    """Ask the ``n`` RLIS queries of ``part`` in order."""
    ask = oracle.less
    return tuple(int(ask(a)) for a in part.points()[1:])


def rlis_preprocess(bits: Sequence[int], h: int) -> ResponseString:
    """Flip every bit that more than ``h`` lies would be needed to explain.

    A 1 followed by at least ``h+1`` zeros, or a 0 preceded by at least
    ``h+1`` ones, must be wrong.  Counts are taken on the input string, so
    corrections do not cascade.
    """
    n = len(bits)
    zeros_after = [0] * n
    acc = 0
    for i in range(n - 1, -1, -1):
        zeros_after[i] = acc
        acc += bits[i] == 0
    out = list(bits)
    ones_before = 0
    for i, b in enumerate(bits):
        if b == 1 and zeros_after[i] >= h + 1:
            out[i] = 0
        elif b == 0 and ones_before >= h + 1:
            out[i] = 1
        ones_before += b == 1
    return tuple(out)


def rlis_reservation_index(bits: Sequence[int], h: int) -> int:
    """Grid index of the reservation price for a preprocessed string.

    With a first 1 at (1-based) ``i1`` followed by ``alpha`` zeros the index
    is ``max(0, i1 - (h + 1 - alpha))``.  An all-zero string means at most
    ``h`` trailing answers lied, so ``p* >= a_{n-h}`` and ``n - h`` is used.
    """
    n = len(bits)
    if 1 in bits:
        i1 = bits.index(1) + 1
        alpha = sum(1 for b in bits[i1:] if b == 0)
        l = max(0, i1 - (h + 1 - alpha))
    else:
        l = n - h
    if not 0 <= l <= n:
        raise InternalInvariantError(f"reservation index {l} outside 0..{n}")
    return l


def rlis_reservation(bits: Sequence[int], h: int, part: IntervalPartition) -> float:
    if len(bits) != part.cell_count:
        raise InvalidInputError(
            f"{len(bits)} responses for a partition of {part.cell_count} cells"
        )
    return part.point(rlis_reservation_index(bits, h))


def rlis(bits: Sequence[int], h: int, part: IntervalPartition) -> float:
    """Full RLIS: preprocess the raw responses, then pick the reservation price."""
    return rlis_reservation(rlis_preprocess(bits, h), h, part)


def rlis_bound(n: int, h: int, bounds: PriceBounds) -> float:
    if not 0 <= h < n:
        raise InvalidInputError(f"need 0 <= h < n, got h={h}, n={n}")
    return bounds.ratio ** (2 * h / n)
