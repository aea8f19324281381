"""Robust binary interval search over ``2**n`` geometric leaves.

Leaves ``L_1..L_{2^n}`` are the cells ``(a_{i-1}, a_i]`` of a ``2**n``-cell
grid, arranged as a complete binary tree.  Nodes are heap indices: the root is
1 and node ``v`` has children ``2v`` and ``2v+1``.

Each iteration asks the node's *main* query ("is p* <= a_q" with ``L_q`` the
rightmost leaf of the left subtree).  If some ancestor's latest main answer
differs, that ancestor's query is asked again as a *checkup*; a disagreeing
checkup sends the search one level up, otherwise it moves down.  After the
budget runs out the search backs off ``h - mu`` levels (``mu`` = number of
move-ups) and reserves at the left edge of that subtree.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

from ..core import PriceBounds
from ..errors import GuaranteeUnavailableError, InternalInvariantError, InvalidInputError
from .oracle import ResponseOracle
from .partition import IntervalPartition, QueryBudget


class Action(str, enum.Enum):
    DOWN_LEFT = "down-left"
    DOWN_RIGHT = "down-right"
    UP = "up"
    HALT = "halt"  # budget ran out between the main query and its checkup


_DOWN = {True: Action.DOWN_LEFT, False: Action.DOWN_RIGHT}


class IterationRecord(NamedTuple):
    node: int
    main: bool
    check: bool | None
    action: Action
    checked_node: int | None = None


def depth(node: int) -> int:
    return node.bit_length() - 1


def leaf_span(node: int, n: int) -> tuple[int, int]:
    """1-based leaf indices ``(first, last)`` below ``node`` in a height-``n`` tree."""
    below = n - depth(node)
    first = (node << below) - (1 << n) + 1
    return first, first + (1 << below) - 1


def leaf_node(x: int, n: int) -> int:
    return (1 << n) + x - 1


def is_ancestor(a: int, v: int) -> bool:
    """True when ``a`` is ``v`` or one of its ancestors."""
    shift = depth(v) - depth(a)
    return shift >= 0 and (v >> shift) == a


@dataclass
class SearchTranscript:
    n: int
    h: int
    records: list[IterationRecord] = field(default_factory=list)
    uq: int = 0
    mu_end: int = 0
    final_node: int = 1
    fallback_node: int = 1
    reservation_index: int = 0

    @property
    def main_queries(self) -> int:
        return len(self.records)

    @property
    def checkup_queries(self) -> int:
        return sum(1 for r in self.records if r.check is not None)

    @property
    def move_ups(self) -> int:
        return sum(1 for r in self.records if r.action is Action.UP)

    def contains_leaf(self, x: int) -> bool:
        first, last = leaf_span(self.fallback_node, self.n)
        return first <= x <= last

    def lines(self) -> list[str]:
        """One line per iteration, then a summary line."""

        def yn(b: bool | None) -> str:
            return "-" if b is None else ("yes" if b else "no")

        out = []
        for i, r in enumerate(self.records, start=1):
            lo, hi = leaf_span(r.node, self.n)
            checked = "-" if r.checked_node is None else str(r.checked_node)
            out.append(
                f"{i} node={r.node} depth={depth(r.node)} leaves={lo}..{hi} "
                f"main={yn(r.main)} check={yn(r.check)} anc={checked} action={r.action.value}"
            )
        lo, hi = leaf_span(self.fallback_node, self.n)
        out.append(
            f"end uq={self.uq} mu={self.mu_end} final={self.final_node} "
            f"fallback={self.fallback_node} depth={depth(self.fallback_node)} "
            f"leaves={lo}..{hi} reservation_index={self.reservation_index}"
        )
        return out


def rbis_search(
    oracle: ResponseOracle, budget: QueryBudget, part: IntervalPartition, record: bool = True
) -> tuple[float, SearchTranscript]:
    """Run the search; returns the reservation price and the transcript.

    With ``record=False`` the per-iteration records are skipped (counters and
    the final nodes are still filled in).
    """
    n, h = budget.n, budget.h
    if part.cell_count != 1 << n:
        raise InvalidInputError(f"RBIS needs 2**{n} cells, partition has {part.cell_count}")
    base = 1 << n
    main: dict[int, bool] = {}
    t = SearchTranscript(n, h)
    records = t.records if record else None
    uq = mu = 0
    v = 1

    m, ratio, k = part.bounds.m, part.ratio, part.cell_count
    ask = oracle.leq

    def split_point(node: int) -> float:
        below = n - node.bit_length() + 1
        # rightmost leaf of the left subtree; never 0 or k, so no endpoint special case
        return m * ratio ** (((node << below) - base + (1 << (below - 1))) / k)

    while uq < n and v < base:
        mv = ask(split_point(v))
        uq += 1
        main[v] = mv
        w = v >> 1
        while w and main[w] == mv:
            w >>= 1
        if not w:
            if records is not None:
                records.append(IterationRecord(v, mv, None, _DOWN[mv]))
            v = 2 * v + (not mv)
            continue
        if uq >= n:
            if records is not None:
                records.append(IterationRecord(v, mv, None, Action.HALT, w))
            break
        check = ask(split_point(w))
        uq += 1
        if check == main[w]:
            if records is not None:
                records.append(IterationRecord(v, mv, check, _DOWN[mv], w))
            v = 2 * v + (not mv)
        else:
            if records is not None:
                records.append(IterationRecord(v, mv, check, Action.UP, w))
            v >>= 1
            mu += 1

    if uq > n:
        raise InternalInvariantError(f"used {uq} queries with a budget of {n}")
    back = min(max(h - mu, 0), depth(v))
    a_u = v >> back
    first, _ = leaf_span(a_u, n)
    t.uq, t.mu_end, t.final_node, t.fallback_node = uq, mu, v, a_u
    t.reservation_index = first - 1
    return part.point(first - 1), t


def rbis_bound(n: int, h: int, bounds: PriceBounds) -> float:
    if 4 * h > n:
        raise GuaranteeUnavailableError(f"RBIS bound needs h <= n/4, got h={h}, n={n}")
    return bounds.ratio ** (2.0 ** (2 * h - n / 2))


def query_lower_bound(n: int, h: int, bounds: PriceBounds) -> float:
    """Lower bound for any comparison-query algorithm (reported, not constructed)."""
    if n < 11:
        raise GuaranteeUnavailableError(f"query lower bound needs n >= 11, got n={n}")
    if not 0 <= 2 * h < n:
        raise GuaranteeUnavailableError(f"query lower bound needs 0 <= 2h < n, got h={h}, n={n}")
    return bounds.ratio ** (2.0 ** (2 * h - n))
