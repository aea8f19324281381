"""Comparison-query oracles whose answers may be corrupted."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from ..errors import ContractViolationError, InternalInvariantError, InvalidInputError
from .partition import IntervalPartition, QueryBudget


@dataclass
class ResponseOracle:
    """Answers threshold questions about a hidden best price.

    ``corruption`` holds 1-based query slots (in ask order) whose answers are
    negated.  With ``budget`` set, asking more than ``budget`` questions is a
    bookkeeping bug on the caller's side and raises.
    """

    p_star: float
    corruption: frozenset[int] = frozenset()
    budget: int | None = None
    partition: IntervalPartition | None = None
    asked: int = field(default=0)

    def __post_init__(self):
        self.corruption = frozenset(self.corruption)
        if any(s < 1 for s in self.corruption):
            raise InvalidInputError("corruption slots are numbered from 1")

    def _answer(self, truth: bool) -> bool:
        self.asked += 1
        if self.budget is not None and self.asked > self.budget:
            raise InternalInvariantError(
                f"query {self.asked} asked with a budget of {self.budget}"
            )
        return truth != (self.asked in self.corruption)

    def leq(self, b: float) -> bool:
        """Is ``p* <= b``?"""
        self.asked += 1
        if self.budget is not None and self.asked > self.budget:
            raise InternalInvariantError(f"query {self.asked} asked with a budget of {self.budget}")
        return (self.p_star <= b) != (self.asked in self.corruption)

    def less(self, b: float) -> bool:
        """Is ``p* < b``?"""
        return self._answer(self.p_star < b)

    @property
    def lies_told(self) -> int:
        return sum(1 for s in self.corruption if s <= self.asked)


def make_oracle(
    p_star: float,
    part: IntervalPartition | None,
    eta: int,
    budget: QueryBudget,
    seed: int | random.Random = 0,
) -> ResponseOracle:
    """Oracle lying on ``eta`` distinct slots drawn uniformly from ``1..n``."""
    if eta < 0:
        raise InvalidInputError(f"eta must be >= 0, got {eta}")
    if eta > budget.h:
        raise ContractViolationError(f"eta={eta} exceeds the tolerated h={budget.h}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    slots = rng.sample(range(1, budget.n + 1), eta)
    return ResponseOracle(p_star, frozenset(slots), budget.n, part)


def fixed_oracle(
    p_star: float, slots: Iterable[int], budget: QueryBudget, part: IntervalPartition | None = None
) -> ResponseOracle:
    slots = frozenset(slots)
    if len(slots) > budget.h:
        raise ContractViolationError(f"{len(slots)} lies exceed the tolerated h={budget.h}")
    if any(s > budget.n for s in slots):
        raise InvalidInputError(f"corruption slot beyond the budget n={budget.n}")
    return ResponseOracle(p_star, slots, budget.n, part)


def lazy_oracle(
    p_star: float, budget: QueryBudget, part: IntervalPartition | None = None, lies: int | None = None
) -> ResponseOracle:
    """Oracle that saves its lies for the last slots, when the search can least recover."""
    lies = budget.h if lies is None else lies
    return fixed_oracle(p_star, range(budget.n - lies + 1, budget.n + 1), budget, part)
