"""Experiment harness: price data, instance windows, error sweeps and reports.

Instances are fixed-length windows of a daily closing-price series; each
window's own minimum and maximum serve as its price bounds, so its best price
is always ``M``.  Sweeps average profits over the instance set, summing in
index order so results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import IO, Iterable, Sequence, Union

from .core import PriceBounds, PriceSequence, best_price, on_star_reservation, run_reservation
from .errors import (
    InsufficientDataError,
    InvalidInputError,
    OutOfRangeError,
    ParseError,
)
from .predictors import (
    ErrorBounds,
    ErrorSpec,
    Parity,
    ora_reservation,
    prediction_from_truth,
    robust_mix_reservation,
)
from .query.oracle import fixed_oracle, make_oracle
from .query.partition import IntervalPartition, QueryBudget
from .query.rbis import rbis_search
from .query.rlis import rlis, rlis_responses

log = logging.getLogger(__name__)

REPORT_HEADER = ["eta", "parity", "algorithm", "param", "avg_profit", "skipped"]


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class DatedSeries:
    dates: tuple[date, ...]
    prices: tuple[float, ...]

    def __post_init__(self):
        if len(self.dates) != len(self.prices):
            raise InvalidInputError("dates and prices differ in length")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise InvalidInputError(f"dates must strictly increase ({a} then {b})")
        for d, p in zip(self.dates, self.prices):
            if not p > 0:
                raise OutOfRangeError(f"non-positive price {p} on {d}")

    def __len__(self) -> int:
        return len(self.prices)


def load_prices(source: Union[IO[str], IO[bytes], str]) -> DatedSeries:
    """Parse a ``date,close`` CSV.  Rows may come in any order; they are sorted."""
    if isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header] != ["date", "close"]:
        raise ParseError(f"expected header 'date,close', got {header!r}", 1)
    rows: dict[date, float] = {}
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line)
        try:
            d = date.fromisoformat(row[0].strip())
        except ValueError:
            raise ParseError(f"bad ISO date {row[0]!r}", line) from None
        try:
            price = float(row[1])
        except ValueError:
            raise ParseError(f"bad price {row[1]!r}", line) from None
        if not math.isfinite(price):
            raise ParseError(f"non-finite price {row[1]!r}", line)
        if price <= 0:
            raise OutOfRangeError(f"line {line}: non-positive price {price}")
        if d in rows:
            raise ParseError(f"duplicate date {d}", line)
        rows[d] = price
    if not rows:
        raise InsufficientDataError("price file has no data rows")
    dates = tuple(sorted(rows))
    return DatedSeries(dates, tuple(rows[d] for d in dates))


def write_prices(series: DatedSeries, dest: IO[str]) -> None:
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(["date", "close"])
    for d, p in zip(series.dates, series.prices):
        w.writerow([d.isoformat(), f"{p:.4f}"])


def synthetic_series(
    seed: int = 2018,
    start: date = date(2018, 1, 1),
    end: date = date(2021, 9, 1),
    first_price: float = 10000.0,
    drift: float = 0.001,
    volatility: float = 0.04,
) -> DatedSeries:
    """Geometric random walk with daily log-returns ~ N(drift, volatility)."""
    rng = random.Random(seed)
    days = (end - start).days + 1
    price, prices = first_price, []
    for _ in range(days):
        prices.append(round(price, 4))
        price *= math.exp(rng.gauss(drift, volatility))
    return DatedSeries(tuple(start + timedelta(i) for i in range(days)), tuple(prices))


def sample_path():
    from importlib.resources import files

    return files("onlinesearch") / "data" / "sample_prices.csv"


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class InstanceSet:
    instances: tuple[PriceSequence, ...]
    offsets: tuple[int, ...]
    length: int

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)


def window_offsets(total: int, count: int, length: int) -> list[int]:
    if count < 1:
        raise InvalidInputError(f"need at least one instance, got count={count}")
    if length < 1:
        raise InvalidInputError(f"window length must be >= 1, got {length}")
    if total < length:
        raise InsufficientDataError(f"series has {total} days, windows need {length}")
    if count == 1:
        return [0]
    return [i * (total - length) // (count - 1) for i in range(count)]


def make_instances(series: DatedSeries | Sequence[float], count: int = 20, length: int = 200) -> InstanceSet:
    prices = series.prices if isinstance(series, DatedSeries) else tuple(series)
    offsets = window_offsets(len(prices), count, length)
    windows = tuple(PriceSequence(tuple(prices[s : s + length])) for s in offsets)
    return InstanceSet(windows, tuple(offsets), length)


# ---------------------------------------------------------------------------
# algorithms and grids


@dataclass(frozen=True)
class Ora:
    r: float
    name = "ora"

    @property
    def param(self) -> tuple[float, ...]:
        return (self.r,)

    def reservation(self, p: float, bounds: PriceBounds) -> float:
        return ora_reservation(p, self.r)

    def reports(self, err: ErrorSpec) -> bool:
        return True


@dataclass(frozen=True)
class RobustMix:
    h_neg: float
    h_pos: float
    name = "robustmix"

    @property
    def param(self) -> tuple[float, ...]:
        return (self.h_neg, self.h_pos)

    def reservation(self, p: float, bounds: PriceBounds) -> float:
        return robust_mix_reservation(p, bounds, ErrorBounds(self.h_neg, self.h_pos))

    def reports(self, err: ErrorSpec) -> bool:
        # non-oblivious: only errors within the declared caps are meaningful
        return err.eta <= ErrorBounds(self.h_neg, self.h_pos).cap(err.parity)


BestPriceAlgo = Union[Ora, RobustMix]


def parse_grid(spec: str) -> list[ErrorSpec]:
    """Expand ``parity:lo:hi:steps[,...]`` into equally spaced error values."""
    out: list[ErrorSpec] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        fields_ = part.split(":")
        if len(fields_) != 4:
            raise InvalidInputError(f"grid item {part!r} is not parity:lo:hi:steps")
        parity = Parity.parse(fields_[0])
        try:
            lo, hi, steps = float(fields_[1]), float(fields_[2]), int(fields_[3])
        except ValueError:
            raise InvalidInputError(f"bad numbers in grid item {part!r}") from None
        if steps < 1 or lo < 0 or hi < lo:
            raise InvalidInputError(f"grid item {part!r} needs 0 <= lo <= hi and steps >= 1")
        if steps == 1:
            out.append(ErrorSpec(parity, lo))
            continue
        out.extend(ErrorSpec(parity, lo + (hi - lo) * i / (steps - 1)) for i in range(steps))
    return out


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class SweepRow:
    eta: float | None
    parity: str
    algorithm: str
    param: tuple[float, ...]
    avg_profit: float
    skipped: int = 0

    def sort_key(self):
        eta = -math.inf if self.eta is None else self.eta
        return (self.algorithm, self.param, self.parity, eta)


@dataclass
class SweepReport:
    rows: list[SweepRow] = field(default_factory=list)

    def extend(self, other: "SweepReport | Iterable[SweepRow]") -> "SweepReport":
        self.rows.extend(other.rows if isinstance(other, SweepReport) else other)
        return self

    def select(self, algorithm: str, param: tuple[float, ...] | None = None) -> list[SweepRow]:
        return [
            r
            for r in self.rows
            if r.algorithm == algorithm and (param is None or r.param == param)
        ]

    def value(self, algorithm: str, param=(), parity: str = "", eta=None) -> float:
        for r in self.rows:
            if (r.algorithm, r.param, r.parity, r.eta) == (algorithm, tuple(param), parity, eta):
                return r.avg_profit
        raise KeyError((algorithm, param, parity, eta))


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def emit_report(report: SweepReport, dest: IO[str]) -> None:
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in sorted(report.rows, key=SweepRow.sort_key):
        w.writerow(
            [
                "" if r.eta is None else _fmt(r.eta),
                r.parity,
                r.algorithm,
                "/".join(_fmt(x) for x in r.param),
                _fmt(r.avg_profit),
                r.skipped,
            ]
        )


def report_to_string(report: SweepReport) -> str:
    buf = io.StringIO()
    emit_report(report, buf)
    return buf.getvalue()


def parse_report(source: IO[str] | str) -> SweepReport:
    text = source if isinstance(source, str) else source.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != REPORT_HEADER:
        raise ParseError(f"unexpected report header {header!r}", 1)
    rows = []
    for row in reader:
        eta, parity, algo, param, profit, skipped = row
        rows.append(
            SweepRow(
                None if eta == "" else float(eta),
                parity,
                algo,
                tuple(float(x) for x in param.split("/")) if param else (),
                float(profit),
                int(skipped),
            )
        )
    return SweepReport(rows)


def _mean(values: Sequence[float]) -> float:
    if not values:
        return math.nan
    total = 0.0
    for v in values:
        total += v
    return total / len(values)


# ---------------------------------------------------------------------------
# sweeps


def baseline(instances: InstanceSet) -> SweepReport:
    """ON* average profit and the average best price (an upper bound on profit)."""
    onstar = [run_reservation(seq, on_star_reservation(seq.bounds)).accepted_price for seq in instances]
    best = [best_price(seq) for seq in instances]
    return SweepReport(
        [
            SweepRow(None, "", "onstar", (), _mean(onstar)),
            SweepRow(None, "", "best", (), _mean(best)),
        ]
    )


def sweep_best_price(
    instances: InstanceSet,
    algos: Sequence[BestPriceAlgo] | BestPriceAlgo,
    grid: Sequence[ErrorSpec],
    strict: bool = True,
) -> SweepReport:
    """Average profit of each algorithm at each grid error.

    The prediction for an instance is derived from its best price.  With
    ``strict`` a prediction outside the instance's ``[m, M]`` is skipped and
    counted; otherwise it is used as is.  Robust-Mix rows are only produced
    for errors within its declared caps.
    """
    if not isinstance(algos, (list, tuple)):
        algos = [algos]
    report = SweepReport()
    for algo in algos:
        for err in grid:
            if not algo.reports(err):
                continue
            profits, skipped = [], 0
            for seq in instances:
                try:
                    p = prediction_from_truth(best_price(seq), err, seq.bounds if strict else None)
                except OutOfRangeError:
                    skipped += 1
                    continue
                res = algo.reservation(p, seq.bounds)
                profits.append(run_reservation(seq, res).accepted_price)
            if skipped:
                log.debug("%s %s: skipped %d infeasible instances", algo, err, skipped)
            report.rows.append(
                SweepRow(err.eta, err.parity.value, algo.name, algo.param, _mean(profits), skipped)
            )
    return report


def draw_slots(n: int, count: int, *parts: int) -> frozenset[int]:
    """``count`` distinct slots from ``1..n``, keyed by integer ``parts``.

    A partial Fisher-Yates shuffle driven by 64-bit words of a blake2b digest;
    the modulo bias is below ``n / 2**64``.  Much cheaper than seeding a
    fresh ``random.Random`` per trial.
    """
    if not 0 <= count <= n:
        raise InvalidInputError(f"cannot draw {count} slots from 1..{n}")
    if count > 8:
        digest = b"".join(
            hashlib.blake2b(f"{','.join(map(str, parts))}#{block}".encode(), digest_size=64).digest()
            for block in range((count + 7) // 8)
        )
    else:
        digest = hashlib.blake2b(",".join(map(str, parts)).encode(), digest_size=64).digest()
    pool = list(range(1, n + 1))
    for i in range(count):
        word = int.from_bytes(digest[8 * i : 8 * i + 8], "big")
        j = i + word % (n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return frozenset(pool[:count])


class _Accepted:
    """Memoized accepted price per reservation value for one instance."""

    def __init__(self, seq: PriceSequence):
        self.seq = seq
        self.cache: dict[float, float] = {}

    def __call__(self, reservation: float) -> float:
        v = self.cache.get(reservation)
        if v is None:
            v = self.cache[reservation] = run_reservation(self.seq, reservation).accepted_price
        return v


def query_partition(bounds: PriceBounds, algo: str, n: int) -> IntervalPartition:
    if algo == "rlis":
        return IntervalPartition(bounds, n)
    if algo == "rbis":
        return IntervalPartition(bounds, 1 << n)
    raise InvalidInputError(f"unknown query algorithm {algo!r}")


def query_reservation(
    part: IntervalPartition, p_star: float, algo: str, budget: QueryBudget, lies
) -> float:
    """Reservation chosen by RLIS/RBIS.

    ``lies`` is either an explicit set of corrupted slots or a pair
    ``(eta, seed)`` handed to :func:`make_oracle` for a random draw.
    """
    if isinstance(lies, (set, frozenset)):
        oracle = fixed_oracle(p_star, lies, budget, part)
    else:
        eta, rng = lies
        oracle = make_oracle(p_star, part, eta, budget, rng)
    if algo == "rlis":
        return rlis(rlis_responses(oracle, part), budget.h, part)
    return rbis_search(oracle, budget, part, record=False)[0]


def sweep_query(
    instances: InstanceSet,
    algo: str,
    h_set: Sequence[int],
    n: int = 25,
    trials: int = 1000,
    seed: int = 0,
) -> SweepReport:
    """Average profit of RLIS/RBIS for every ``H`` in ``h_set`` and every ``eta <= H``.

    Each trial corrupts ``eta`` uniformly chosen query slots; the slot choice
    for (instance, eta, trial) depends only on ``seed`` and those indices.
    """
    if algo not in ("rlis", "rbis"):
        raise InvalidInputError(f"unknown query algorithm {algo!r}")
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    for h in h_set:
        if not 0 <= h < n:
            raise InvalidInputError(f"need 0 <= H < n, got H={h}, n={n}")
    report = SweepReport()
    accepted = [_Accepted(seq) for seq in instances]
    parts = [query_partition(seq.bounds, algo, n) for seq in instances]
    # slot draws depend on (seed, instance, eta, trial) only, so they are shared across H
    slot_cache: dict[tuple[int, int], list[frozenset[int]]] = {}
    for h in h_set:
        budget = QueryBudget(n, h)
        for eta in range(h + 1):
            per_instance = []
            for idx, seq in enumerate(instances):
                p_star = best_price(seq)
                key = (idx, eta)
                if key not in slot_cache:
                    slot_cache[key] = [draw_slots(n, eta, seed, idx, eta, t) for t in range(trials)]
                # the search is a pure function of its lie set; repeated sets reuse the result
                memo: dict[frozenset[int], float] = {}
                profits = []
                for lies in slot_cache[key]:
                    v = memo.get(lies)
                    if v is None:
                        res = query_reservation(parts[idx], p_star, algo, budget, lies)
                        v = memo[lies] = accepted[idx](res)
                    profits.append(v)
                per_instance.append(_mean(profits))
            report.rows.append(SweepRow(float(eta), "", algo, (float(h),), _mean(per_instance)))
    return report
