import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from roughprob.core import DomainError, ErrorModel, RngStream
from roughprob.duel import (
    Duelist, crossing_distance, crossing_distance_general, duel_outcome_prob, expected_win_prob,
    hit_prob, logistic, simulate_win_prob, to_log_skill, win_prob_known,
)

rho = st.floats(1.01, 20)


def test_hit_prob():
    assert hit_prob(2.0, 1.5) == 1.0
    assert hit_prob(2.0, 8.0) == 0.25
    assert hit_prob(2.0, 5.0) == pytest.approx(2 / 5)
    with pytest.raises(DomainError):
        hit_prob(2.0, 0.0)


@given(rho, rho)
def test_crossing_distance(a, b):
    x = crossing_distance(a, b)
    assert hit_prob(a, x) + hit_prob(b, x) == pytest.approx(1.0, abs=1e-15)
    assert crossing_distance(b, a) == x


def test_crossing_distance_general():
    x = crossing_distance_general(lambda t: min(2 / t, 1), lambda t: min(3 / t, 1), 1.0, 100.0)
    assert x == pytest.approx(5.0, abs=1e-10)
    with pytest.raises(DomainError):
        crossing_distance_general(lambda t: 0.1, lambda t: 0.1, 1.0, 2.0)


def test_win_prob_known():
    assert win_prob_known(3.0, 3.0) == 0.5
    assert win_prob_known(1.5, 4.5) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        win_prob_known(1.0, 2.0)
    with pytest.raises(DomainError):
        Duelist(0.5)


@given(rho, rho)
def test_logistic_link(a, b):
    assert win_prob_known(a, b) == pytest.approx(logistic(to_log_skill(a) - to_log_skill(b)), abs=1e-14)
    assert win_prob_known(a, b) + win_prob_known(b, a) == pytest.approx(1.0, abs=1e-15)


def test_outcome_branches():
    assert duel_outcome_prob(2, 3, 0, 0) == pytest.approx(0.4)
    assert duel_outcome_prob(2, 3, 1, 0) == pytest.approx(1 / 3)
    assert duel_outcome_prob(2, 3, 0, 0.5) == pytest.approx(1 - 3 / 5.5)
    assert duel_outcome_prob(2, 3, 0, 0.5) > 0.4


@given(rho, rho, st.floats(-1, 1), st.floats(-1, 1))
def test_outcome_in_unit_interval(a, b, xa, xb):
    v = duel_outcome_prob(a, b, xa, xb)
    assert 0.0 <= v <= 1.0


def test_zero_noise_gives_known():
    z = ErrorModel.normal(0.0)
    assert expected_win_prob(2, 3, z, z) == 0.4


@pytest.mark.parametrize("noise", [ErrorModel.normal(0.2), ErrorModel("uniform", 0.3)])
def test_symmetric_case_is_half(noise):
    assert expected_win_prob(2.5, 2.5, noise, noise) == 0.5
    assert simulate_win_prob(2.5, 2.5, noise, noise, reps=10_000).mean == 0.5


@settings(max_examples=15, deadline=None)
@given(rho, rho, st.floats(0, 0.2), st.floats(0, 0.2))
def test_complement_identity(a, b, sa, sb):
    assume(7 * max(sa, sb) < min(a, b))
    na, nb = ErrorModel.normal(sa), ErrorModel.normal(sb)
    q = expected_win_prob(a, b, na, nb) + expected_win_prob(b, a, nb, na)
    assert q == 1.0


def test_complement_identity_monte_carlo_exact():
    na, nb = ErrorModel.normal(0.1), ErrorModel.normal(0.3)
    a = simulate_win_prob(2, 3, na, nb, reps=20_000, stream=RngStream(3)).mean
    b = simulate_win_prob(3, 2, nb, na, reps=20_000, stream=RngStream(3)).mean
    assert a + b == pytest.approx(1.0, abs=1e-14)


def test_deviation_is_first_order_in_sigma():
    base = win_prob_known(2, 3)
    d = [abs(expected_win_prob(2, 3, ErrorModel.normal(s), ErrorModel.normal(s)) - base)
         for s in (0.01, 0.005)]
    assert 1.6 <= d[0] / d[1] <= 2.4


def test_quadrature_agrees_with_monte_carlo():
    na, nb = ErrorModel.normal(0.2), ErrorModel.normal(0.05)
    est = simulate_win_prob(2, 4, na, nb, reps=200_000, stream=RngStream(12))
    assert abs(est.mean - expected_win_prob(2, 4, na, nb)) < 3 * est.std_error
    mc = expected_win_prob(2, 4, na, nb, method="montecarlo", reps=200_000, stream=RngStream(12))
    assert mc == est.mean


def test_one_sided_noise():
    z, n = ErrorModel.normal(0.0), ErrorModel.normal(0.1)
    est = simulate_win_prob(2, 3, z, n, reps=200_000, stream=RngStream(1))
    assert abs(est.mean - expected_win_prob(2, 3, z, n)) < 3 * est.std_error


def test_noise_precondition():
    with pytest.raises(DomainError):
        expected_win_prob(1.5, 1.5, ErrorModel.normal(0.5), ErrorModel.normal(0.0))
    with pytest.raises(DomainError):
        expected_win_prob(2, 3, ErrorModel.normal(0.1), ErrorModel.normal(0.1), method="guess")
