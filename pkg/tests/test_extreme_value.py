import math

import numpy as np
import pytest

from roughprob.core import DomainError, RngStream
from roughprob import extreme_value as ev


def test_top_gap_anchor():
    assert ev.mean_top_gap() == 1.0
    assert ev.top_gap_integral() == pytest.approx(1.0, abs=1e-9)


def test_top_gap_simulation():
    est = ev.simulate_top_gap(reps=200_000, stream=RngStream(1))
    assert abs(est.mean - 1.0) < 3 * est.std_error


def test_run_auction():
    items = [ev.PerceivedItem(1.0, 1.4), ev.PerceivedItem(1.2, 1.1), ev.PerceivedItem(0.2, 0.5)]
    r = ev.run_auction(items)
    assert r.winner_x == 1.0 and r.winner_bid == 1.4 and r.second_bid == 1.1
    assert r.profit_sealed == pytest.approx(-items[0].error)
    assert r.profit_vickrey == pytest.approx(1.0 - 1.1)
    assert r.winner_bid >= r.second_bid
    with pytest.raises(DomainError):
        ev.run_auction(items[:1])


def test_closed_forms():
    assert ev.choice_cost_exact(0.0) == 0.0
    assert ev.choice_cost_exact(0.5) == 0.125
    assert ev.auction_gains_exact(0.5) == (-0.25, 0.75)
    with pytest.raises(DomainError):
        ev.choice_cost_exact(-0.1)


def test_zero_noise_is_exact():
    est = ev.simulate_choice_cost(0.0, reps=10_000)
    assert est.mean == 0.0 and est.std_error == 0.0
    a = ev.simulate_auction(0.0, reps=100_000, stream=RngStream(2))
    assert a.mean_sealed == 0.0
    assert abs(a.mean_vickrey - 1.0) < 3 * a.se_vickrey


@pytest.mark.parametrize("sigma", [0.25, 0.5, 1.0])
def test_integral_forms_agree(sigma):
    exact = ev.choice_cost_exact(sigma)
    assert ev.choice_cost_reduced(sigma) == pytest.approx(exact, abs=1e-9)
    assert ev.choice_cost_integral(sigma) == pytest.approx(exact, abs=1e-8)


def test_integral_needs_positive_sigma():
    with pytest.raises(DomainError):
        ev.choice_cost_integral(0.0)


def test_integral_small_sigma_limit():
    assert ev.choice_cost_integral(0.05) < 2e-3


@pytest.mark.parametrize("sigma,reps", [(0.1, 100_000), (0.5, 50_000), (1.0, 5_000)])
def test_simulation_matches_closed_forms(sigma, reps):
    stream = RngStream(31)
    cost = ev.simulate_choice_cost(sigma, reps, stream.child(0))
    assert abs(cost.mean - ev.choice_cost_exact(sigma)) < 3 * cost.std_error
    a = ev.simulate_auction(sigma, reps, stream.child(1))
    sealed, vickrey = ev.auction_gains_exact(sigma)
    assert abs(a.mean_sealed - sealed) < 3 * a.se_sealed
    assert abs(a.mean_vickrey - vickrey) < 3 * a.se_vickrey
    assert abs(a.mean_gap - 1.0) < 3 * a.se_gap


def test_winners_curse():
    a = ev.simulate_auction(0.3, 20_000, RngStream(5))
    assert a.mean_sealed < 0


def test_monotone_cost():
    vals = [ev.simulate_choice_cost(s, 20_000, RngStream(6)).mean for s in (0.25, 0.5, 1.0)]
    assert vals[0] < vals[1] < vals[2]
    ints = [ev.choice_cost_integral(s) for s in (0.25, 0.5, 1.0)]
    assert ints[0] < ints[1] < ints[2]


def test_tail_truncation_soundness():
    loose = ev.simulate_choice_cost(0.5, 100_000, RngStream(8), tail_tol=1e-10)
    tight = ev.simulate_choice_cost(0.5, 100_000, RngStream(8), tail_tol=1e-14)
    assert abs(loose.mean - tight.mean) < loose.std_error


def test_fixed_gap_truncation_is_stable():
    # the fixed-window route reproduces itself when the window grows, since the
    # extra points lie far below anything that could be chosen
    s = 0.1
    a = ev.simulate_choice_cost(s, 500, RngStream(9), stop_gap=8 * s + 4)
    b = ev.simulate_choice_cost(s, 500, RngStream(9), stop_gap=8 * s + 8)
    assert abs(a.mean - b.mean) < a.std_error
    adaptive = ev.simulate_choice_cost(s, 500, RngStream(9))
    assert abs(adaptive.mean - b.mean) < 3 * b.std_error + 3 * adaptive.std_error


def test_simulation_is_deterministic():
    a = ev.simulate_auction(0.4, 5000, RngStream(3))
    b = ev.simulate_auction(0.4, 5000, RngStream(3), workers=2)
    assert a == b
