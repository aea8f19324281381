import math

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from onlinesearch.adversary import adversarial_run, ora_policy
from onlinesearch.core import PriceBounds, PriceSequence, competitive_ratio, run_reservation
from onlinesearch.predictors import (
    ErrorSpec,
    Parity,
    error_from_pair,
    max_eta,
    ora_bound,
    prediction_from_truth,
)
from onlinesearch.query import (
    IntervalPartition,
    QueryBudget,
    fixed_oracle,
    rbis_search,
    rlis,
    rlis_truthful_responses,
)

prices = st.floats(min_value=0.01, max_value=1e6, allow_nan=False, allow_infinity=False)


@given(st.lists(prices, min_size=1, max_size=30), prices)
def test_one_acceptance_and_ratio_at_least_one(ps, res):
    seq = PriceSequence(tuple(ps))
    out = run_reservation(seq, res)
    assert seq.prices[out.accept_day - 1] == out.accepted_price
    assert competitive_ratio(seq, out) >= 1
    assert out.forced_last_day == (max(ps) < res)


@given(st.lists(prices, min_size=1, max_size=30), prices, prices)
def test_raising_reservation_never_accepts_earlier(ps, a, b):
    lo, hi = sorted((a, b))
    assert run_reservation(ps, hi).accept_day >= run_reservation(ps, lo).accept_day


@given(
    st.floats(min_value=1.0, max_value=100.0),
    st.sampled_from(list(Parity)),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_error_round_trip(p_star, parity, frac):
    top = 0.999 if parity is Parity.NEGATIVE else 50.0
    err = ErrorSpec(parity, frac * top)
    p = prediction_from_truth(p_star, err)
    back = error_from_pair(p_star, p)
    if p == p_star:
        # eta below float resolution: the pair is the zero-error boundary case
        assert back.eta == 0
    else:
        assert back.parity is parity
        assert math.isclose(back.eta, err.eta, rel_tol=1e-9, abs_tol=1e-12)


@settings(max_examples=150, deadline=None)
@given(
    st.floats(min_value=1.5, max_value=1000.0),
    st.floats(min_value=0.05, max_value=3.0),
    st.sampled_from(list(Parity)),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_ora_tightness_random(ratio, r, parity, frac):
    b = PriceBounds(1.0, ratio)
    eta = frac * max_eta(parity, b)
    assume(parity is Parity.POSITIVE or eta < 1)
    err = ErrorSpec(parity, eta)
    run = adversarial_run(ora_policy(r), err, b, length=5)
    assert math.isclose(run.realized, ora_bound(err, r, b), rel_tol=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(4, 10), st.integers(0, 2), st.data())
def test_rlis_random_lies(n, h, data):
    assume(h < n)
    b = PriceBounds(1.0, 10.0)
    part = IntervalPartition(b, n)
    j = data.draw(st.integers(0, n))
    p_star = part.point(j)
    truth = list(rlis_truthful_responses(p_star, part))
    flips = data.draw(st.sets(st.integers(0, n - 1), max_size=h))
    for i in flips:
        truth[i] ^= 1
    res = rlis(tuple(truth), h, part)
    assert res <= p_star
    assert p_star / res <= b.ratio ** (2 * h / n) * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(4, 16), st.data())
def test_rbis_random_lies_contained(n, data):
    h = data.draw(st.integers(0, n // 4))
    b = PriceBounds(1.0, 10.0)
    part = IntervalPartition(b, 1 << n)
    budget = QueryBudget(n, h)
    cell = data.draw(st.integers(1, 1 << n))
    slots = data.draw(st.sets(st.integers(1, n), max_size=h))
    res, tr = rbis_search(fixed_oracle(part.point(cell), slots, budget, part), budget, part)
    assert tr.contains_leaf(cell)
    assert tr.uq == tr.main_queries + tr.checkup_queries <= n
    assert res <= part.point(cell)
