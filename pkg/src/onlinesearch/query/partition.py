"""Geometric grids over ``[m, M]`` and query budgets."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..core import PriceBounds
from ..errors import InvalidInputError


@dataclass(frozen=True)
class IntervalPartition:
    """Grid ``a_i = m * (M/m)**(i/k)`` for ``i = 0..k``.

    Points are computed on demand so that ``k = 2**n`` stays cheap for large
    ``n``.  The same float expression is used everywhere a grid point is
    needed, so truthful comparisons never depend on a tolerance.
    """

    bounds: PriceBounds
    cell_count: int

    def __post_init__(self):
        if self.cell_count < 1:
            raise InvalidInputError(f"cell_count must be >= 1, got {self.cell_count}")

    @cached_property
    def ratio(self) -> float:
        return self.bounds.M / self.bounds.m

    @property
    def step(self) -> float:
        return self.ratio ** (1 / self.cell_count)

    def point(self, i: int) -> float:
        k = self.cell_count
        if not 0 <= i <= k:
            raise InvalidInputError(f"grid index {i} outside 0..{k}")
        if i == 0:
            return self.bounds.m
        if i == k:
            return self.bounds.M
        return self.bounds.m * self.ratio ** (i / k)

    def points(self) -> tuple[float, ...]:
        """All grid points ``a_0..a_k`` (cached; avoid for huge ``k``)."""
        return self._points

    @cached_property
    def _points(self) -> tuple[float, ...]:
        return tuple(self.point(i) for i in range(self.cell_count + 1))


@dataclass(frozen=True)
class QueryBudget:
    """``n`` comparison queries of which at most ``h`` may be answered wrongly."""

    n: int
    h: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError(f"need at least one query, got n={self.n}")
        if not 0 <= self.h < self.n:
            raise InvalidInputError(f"need 0 <= h < n, got h={self.h}, n={self.n}")

    @property
    def rbis_guaranteed(self) -> bool:
        return 4 * self.h <= self.n
