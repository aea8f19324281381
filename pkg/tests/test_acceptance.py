"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (also collected in the
pytest terminal summary).  Run ``python tests/test_acceptance.py`` to print
the lines without pytest.
"""

from __future__ import annotations

import itertools
import math
import random
import time

from onlinesearch.adversary import adversarial_run, ora_policy, robust_mix_policy
from onlinesearch.bench import load_prices, make_instances, report_to_string, sample_path, sweep_query, baseline
from onlinesearch.core import PriceBounds, PriceSequence, competitive_ratio, on_star_reservation, run_reservation
from onlinesearch.predictors import (
    ErrorBounds,
    ErrorSpec,
    Parity,
    corollary1_witness,
    max_eta,
    oblivious_lower_bound,
    ora_bound,
    prediction_from_truth,
    robust_mix_bound,
    robust_mix_reservation,
    robust_mix_uses_prediction,
)
from onlinesearch.query import (
    IntervalPartition,
    QueryBudget,
    fixed_oracle,
    rbis_bound,
    rbis_search,
    rlis,
    rlis_bound,
    rlis_truthful_responses,
)
from onlinesearch.query.rbis import depth

TEN = PriceBounds(1.0, 10.0)
TOL = 1e-9


def realized_worst(p_star: float, reservation: float, bounds: PriceBounds) -> float:
    """Ratio on the worst two-day continuation for a reservation policy.

    A reservation at or below ``p*`` is offered exactly itself first; one
    above ``p*`` never sees an acceptable price and is forced onto ``m``.
    """
    if reservation <= p_star:
        prices = (bounds.clip(reservation), p_star)
    else:
        prices = (p_star, bounds.m)
    seq = PriceSequence(prices, bounds)
    return competitive_ratio(seq, run_reservation(seq, reservation))


# ---------------------------------------------------------------------------
# 1. ON* optimality


def two_day_worst(grid: list[float], j: int, m: float, M: float) -> float:
    """Worst two-day ratio over grid prices for a reservation equal to ``grid[j]``.

    Day 1 at or above the reservation is accepted and the best follow-up is
    ``M``; day 1 below it is rejected and day 2 drops to ``m``.
    """
    above = M / grid[j]
    below = grid[j - 1] / m if j > 0 else 0.0
    return max(above, below, 1.0)


def check_onstar(points: int = 10_001):
    m, M = 1.0, 100.0
    span = M / m
    grid = [m * span ** (i / (points - 1)) for i in range(points)]
    grid[-1] = M
    res = on_star_reservation(PriceBounds(m, M))
    j_star = grid.index(res)
    worst_star = two_day_worst(grid, j_star, m, M)
    best_any = min(two_day_worst(grid, j, m, M) for j in range(points))
    rel = abs(worst_star - 10.0) / 10.0
    ok = rel <= 1e-6 and best_any >= worst_star * (1 - 1e-12)
    return ok, f"worst ratio at sqrt(mM)={worst_star:.12g} (rel err {rel:.1e}), best grid reservation {best_any:.12g}"


def test_criterion_1_onstar_optimality(acceptance_report):
    t = time.perf_counter()
    ok, detail = check_onstar()
    elapsed = time.perf_counter() - t
    ok = ok and elapsed < 5
    acceptance_report(1, "ON* optimality", ok, f"{detail}; {elapsed:.2f}s")
    assert ok


# ---------------------------------------------------------------------------
# 2. ORA_r tightness


def eta_grid(parity: Parity, bounds: PriceBounds, count: int = 100) -> list[float]:
    top = max_eta(parity, bounds)
    if parity is Parity.NEGATIVE:
        # 1 - eta must stay positive: stop one step short of the end of the range
        return [top * i / count for i in range(count)]
    return [top * i / (count - 1) for i in range(count)]


def check_ora():
    worst = 0.0
    cases = 0
    for r in (0.5, 0.75, 1.0, 1.25, 1.5):
        policy = ora_policy(r)
        for parity in Parity:
            for eta in eta_grid(parity, TEN):
                err = ErrorSpec(parity, eta)
                run = adversarial_run(policy, err, TEN)
                worst = max(worst, abs(run.realized - ora_bound(err, r, TEN)))
                cases += 1
    # the flat segment of the jump: r = 1.5 under small positive error is exactly M/m
    jump = [
        adversarial_run(ora_policy(1.5), ErrorSpec(Parity.POSITIVE, e), TEN).realized
        for e in (0.0, 0.1, 0.25, 0.49)
    ]
    ok = worst <= TOL and all(v == 10.0 for v in jump)
    return ok, f"{cases} cases, max |realized - bound| = {worst:.2e}, r=1.5 pos<0.5 -> {jump}"


def test_criterion_2_ora_tightness(acceptance_report):
    t = time.perf_counter()
    ok, detail = check_ora()
    elapsed = time.perf_counter() - t
    ok = ok and elapsed < 1
    acceptance_report(2, "ORA_r tightness", ok, f"{detail}; {elapsed:.2f}s")
    assert ok


# ---------------------------------------------------------------------------
# 3. Robust-Mix guarantee

H_NEG_GRID = (0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7)
H_POS_GRID = (0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0)


def _eta_values(cap: float, top: float, count: int = 21) -> list[float]:
    hi = min(cap, top)
    return [hi * i / (count - 1) for i in range(count)]


def check_robust_mix(random_instances: int = 1000, seed: int = 20180101):
    fails = {"prediction": 0, "fallback": 0}
    worst_excess = {"prediction": -math.inf, "fallback": -math.inf}
    cases = 0

    def record(hb, err, realized):
        nonlocal cases
        cases += 1
        branch = "prediction" if robust_mix_uses_prediction(TEN, hb) else "fallback"
        excess = realized - robust_mix_bound(err, TEN, hb)
        worst_excess[branch] = max(worst_excess[branch], excess)
        if excess > TOL:
            fails[branch] += 1

    combos = [ErrorBounds(hn, hp) for hn in H_NEG_GRID for hp in H_POS_GRID]
    for hb in combos:
        policy = robust_mix_policy(hb)
        for parity in Parity:
            for eta in _eta_values(hb.cap(parity), max_eta(parity, TEN)):
                err = ErrorSpec(parity, eta)
                if parity is Parity.NEGATIVE and eta >= 1:
                    continue
                record(hb, err, adversarial_run(policy, err, TEN).realized)

    rng = random.Random(seed)
    for _ in range(random_instances):
        hb = rng.choice(combos)
        parity = rng.choice(list(Parity))
        hi = min(hb.cap(parity), max_eta(parity, TEN))
        eta = rng.uniform(0, hi)
        err = ErrorSpec(parity, eta)
        # p* must leave room for the prediction p = p*/(1 -/+ eta) inside [m, M]
        f = err.signed_factor
        lo_star, hi_star = max(TEN.m, TEN.m * f), min(TEN.M, TEN.M * f)
        p_star = rng.uniform(lo_star, hi_star)
        p = prediction_from_truth(p_star, err, TEN)
        length = rng.randint(2, 40)
        prices = [rng.uniform(TEN.m, p_star) for _ in range(length - 1)]
        prices.insert(rng.randrange(length), p_star)
        seq = PriceSequence(tuple(prices), TEN)
        out = run_reservation(seq, robust_mix_reservation(p, TEN, hb))
        record(hb, err, competitive_ratio(seq, out))

    ok = fails["prediction"] == 0 and fails["fallback"] == 0
    detail = (
        f"{cases} cases; violations: prediction branch {fails['prediction']} "
        f"(max excess {worst_excess['prediction']:.3g}), ON* fallback branch {fails['fallback']} "
        f"(max excess {worst_excess['fallback']:.3g})"
    )
    return ok, detail


def test_criterion_3_robust_mix_guarantee(acceptance_report):
    t = time.perf_counter()
    ok, detail = check_robust_mix()
    elapsed = time.perf_counter() - t
    ok = ok and elapsed < 10
    acceptance_report(3, "Robust-Mix guarantee", ok, f"{detail}; {elapsed:.2f}s")
    assert ok


# ---------------------------------------------------------------------------
# 4. RLIS bound


def hamming_ball(bits: tuple[int, ...], radius: int):
    n = len(bits)
    for d in range(radius + 1):
        for flips in itertools.combinations(range(n), d):
            out = list(bits)
            for i in flips:
                out[i] ^= 1
            yield tuple(out)


def check_rlis():
    worst_excess = -math.inf
    cases = fails = 0
    for n in range(4, 11):
        part = IntervalPartition(TEN, n)
        for h in (0, 1, 2):
            if h >= n:
                continue
            bound = rlis_bound(n, h, TEN)
            for j in range(n + 1):
                p_star = part.point(j)
                truth = rlis_truthful_responses(p_star, part)
                for bits in hamming_ball(truth, h):
                    ratio = realized_worst(p_star, rlis(bits, h, part), TEN)
                    worst_excess = max(worst_excess, ratio - bound)
                    cases += 1
                    fails += ratio > bound + TOL
    return fails == 0, f"{cases} cases, {fails} violations, max ratio - bound = {worst_excess:.3g}"


def test_criterion_4_rlis_bound(acceptance_report):
    t = time.perf_counter()
    ok, detail = check_rlis()
    elapsed = time.perf_counter() - t
    ok = ok and elapsed < 60
    acceptance_report(4, "RLIS bound", ok, f"{detail}; {elapsed:.2f}s")
    assert ok


# ---------------------------------------------------------------------------
# 5. RBIS containment, depth and ratio

RBIS_CASES = ((8, 1), (8, 2), (12, 1), (12, 2), (12, 3))
CASE_LIMIT = 10**6


def lie_placements(n: int, h: int, cells: int, seed: int):
    """All slot sets of size <= h, or a seeded sample when too many cases."""
    per_cell = sum(math.comb(n, d) for d in range(h + 1))
    if per_cell <= CASE_LIMIT:
        all_sets = [frozenset(c) for d in range(h + 1) for c in itertools.combinations(range(1, n + 1), d)]
        return lambda cell: all_sets
    rng = random.Random(seed)

    def sample(cell):
        return [frozenset(rng.sample(range(1, n + 1), rng.randint(0, h))) for _ in range(10**4)]

    return sample


def check_rbis():
    stats = []
    ok = True
    for n, h in RBIS_CASES:
        budget = QueryBudget(n, h)
        part = IntervalPartition(TEN, 1 << n)
        bound = rbis_bound(n, h, TEN)
        placements = lie_placements(n, h, 1 << n, seed=n * 100 + h)
        contain_fail = depth_fail = ratio_fail = cases = 0
        min_depth = n
        for x in range(1, (1 << n) + 1):
            p_star = part.point(x)  # right end of leaf (a_{x-1}, a_x]: the worst spot in the leaf
            for slots in placements(x):
                res, tr = rbis_search(fixed_oracle(p_star, slots, budget, part), budget, part, record=False)
                cases += 1
                d = depth(tr.fallback_node)
                min_depth = min(min_depth, d)
                contain_fail += not tr.contains_leaf(x)
                depth_fail += d < n // 2 - 2 * h
                ratio_fail += realized_worst(p_star, res, TEN) > bound + TOL
        bad = contain_fail + depth_fail + ratio_fail
        ok = ok and bad == 0
        stats.append(f"(n={n},h={h}) {cases} cases, min depth {min_depth}, fails {contain_fail}/{depth_fail}/{ratio_fail}")
    return ok, "; ".join(stats)


def test_criterion_5_rbis_containment_depth_ratio(acceptance_report):
    t = time.perf_counter()
    ok, detail = check_rbis()
    elapsed = time.perf_counter() - t
    ok = ok and elapsed < 300
    acceptance_report(5, "RBIS containment/depth/ratio", ok, f"{detail}; {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 6. benchmark shape

H_SET = (3, 5, 8, 10, 13)
SEED = 7


def _bench_run(instances):
    rep = baseline(instances)
    rep.extend(sweep_query(instances, "rlis", H_SET, n=25, trials=1000, seed=SEED))
    rep.extend(sweep_query(instances, "rbis", H_SET, n=25, trials=1000, seed=SEED))
    return rep


def check_bench():
    with sample_path().open("r", encoding="utf-8") as fh:
        instances = make_instances(load_prices(fh))
    first = _bench_run(instances)
    second = _bench_run(instances)
    same = report_to_string(first) == report_to_string(second)
    onstar = first.value("onstar")
    order_bad, degrade_bad = [], []
    for h in H_SET:
        rb = first.value("rbis", (float(h),), eta=0.0)
        rl = first.value("rlis", (float(h),), eta=0.0)
        if not rb >= rl >= onstar:
            order_bad.append(f"H={h}: rbis {rb:.1f}, rlis {rl:.1f}, onstar {onstar:.1f}")
        if not rb >= first.value("rbis", (float(h),), eta=float(h)):
            degrade_bad.append(f"H={h}")
    ok = same and not order_bad and not degrade_bad
    detail = (
        f"(a) identical bytes: {same}; (b) ordering at eta=0 "
        f"{'holds for all H' if not order_bad else 'fails for ' + '; '.join(order_bad)}; "
        f"(c) rbis eta=0 >= eta=H {'holds' if not degrade_bad else 'fails for ' + ', '.join(degrade_bad)}"
    )
    return ok, detail


def test_criterion_6_benchmark_shape(acceptance_report):
    t = time.perf_counter()
    ok, detail = check_bench()
    elapsed = time.perf_counter() - t
    ok = ok and elapsed < 300
    acceptance_report(6, "benchmark shape", ok, f"{detail}; {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 7. no oblivious policy dominates ON*


def check_dominance_witness():
    root = math.sqrt(TEN.ratio)
    parts, ok = [], True
    for r in (0.5, 1.0, 1.5):
        err = corollary1_witness(r, TEN)
        margin = oblivious_lower_bound(err, r, TEN) - root
        ok = ok and margin > 0
        parts.append(f"r={r}: {err} margin {margin:.4g}")
    return ok, "; ".join(parts)


def test_criterion_7_no_oblivious_policy_dominates_onstar(acceptance_report):
    t = time.perf_counter()
    ok, detail = check_dominance_witness()
    elapsed = time.perf_counter() - t
    ok = ok and elapsed < 1
    acceptance_report(7, "oblivious policies lose to ON* somewhere", ok, f"{detail}; {elapsed:.3f}s")
    assert ok


if __name__ == "__main__":
    checks = [check_onstar, check_ora, check_robust_mix, check_rlis, check_rbis, check_bench, check_dominance_witness]
    for i, fn in enumerate(checks, start=1):
        t = time.perf_counter()
        ok, detail = fn()
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {i}: {detail}; {time.perf_counter() - t:.1f}s")
