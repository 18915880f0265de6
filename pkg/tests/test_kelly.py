import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from roughprob.core import DomainError, RngStream, integrate, normal_cdf, normal_pdf
from roughprob.kelly import (
    KellySetting, expected_growth, growth_rate, optimal_fraction, s_tail,
    simulate_expected_growth, simulate_policy_growth,
)


def test_growth_rate():
    assert growth_rate(0.0, 0.1) == 0.0
    assert growth_rate(0.2, 0.1) == pytest.approx(0.02)
    assert growth_rate(0.1, 0.05) == pytest.approx(0.005)
    with pytest.raises(DomainError):
        growth_rate(1.5, 0.1)


@given(st.floats(-0.25, 0.25), st.floats(0, 1))
def test_optimal_fraction_is_optimal(delta, a):
    assert growth_rate(optimal_fraction(delta), delta) >= growth_rate(a, delta) - 1e-15


def test_optimal_fraction():
    assert optimal_fraction(-0.1) == 0.0
    assert optimal_fraction(0.05) == pytest.approx(0.1)
    x = np.linspace(-0.2, 0.2, 41)
    assert np.all(np.diff(optimal_fraction(x)) >= 0)


def test_s_tail():
    assert s_tail(-math.inf) == 1.0
    assert s_tail(0.0) == pytest.approx(0.5)
    for y in (-1.2, 0.3, 2.5):
        assert s_tail(y) + s_tail(-y) == pytest.approx(1.0, abs=1e-15)
        assert s_tail(y) == pytest.approx(integrate(lambda z: z * z * normal_pdf(z), y, math.inf), abs=1e-10)


def test_expected_growth_examples():
    assert expected_growth(KellySetting(0.0, 0.05)) == pytest.approx(-0.0025)
    assert expected_growth(KellySetting(0.05, 0.05)) == pytest.approx(0.00120986, abs=1e-8)
    assert expected_growth(KellySetting(0.1, 0.0)) == pytest.approx(0.02)
    assert expected_growth(KellySetting(-0.1, 0.0)) == 0.0


def test_setting_validation():
    with pytest.raises(DomainError):
        KellySetting(0.3, 0.1)
    with pytest.raises(DomainError):
        KellySetting(0.1, -0.1)


@pytest.mark.parametrize("delta", [-0.1, -0.02, 0.0, 0.03, 0.1])
def test_small_sigma_converges_at_rate_sigma_squared(delta):
    limit = 2 * delta * delta if delta > 0 else 0.0
    for s in (1e-3, 1e-4):
        assert abs(expected_growth(KellySetting(delta, s)) - limit) <= 2.0 * s * s + 1e-15


def test_monotone_in_sigma_and_delta():
    sig = [0.0, 0.01, 0.05, 0.1]
    for d in (0.02, 0.1):
        vals = [expected_growth(KellySetting(d, s)) for s in sig]
        assert all(a > b for a, b in zip(vals, vals[1:]))
    # for fixed sigma the curve falls until delta = 0 and rises after it
    for s in (0.01, 0.05):
        up = [expected_growth(KellySetting(d, s)) for d in np.linspace(0, 0.1, 6)]
        down = [expected_growth(KellySetting(d, s)) for d in np.linspace(-0.1, 0, 6)]
        assert all(a < b for a, b in zip(up, up[1:]))
        assert all(a >= b for a, b in zip(down, down[1:]))


@given(st.floats(-0.2, 0.2), st.floats(0.005, 0.1))
def test_delta_derivative(delta, sigma):
    h = 1e-6
    num = (expected_growth(KellySetting(delta + h, sigma))
           - expected_growth(KellySetting(delta - h, sigma))) / (2 * h)
    assert num == pytest.approx(4 * delta * normal_cdf(delta / sigma), abs=1e-7)


@pytest.mark.parametrize("delta,sigma", [(0.05, 0.05), (-0.05, 0.1), (0.1, 0.01), (0.0, 0.05)])
def test_simulation_matches_closed_form(delta, sigma):
    st_ = KellySetting(delta, sigma)
    est = simulate_expected_growth(st_, reps=10**6, stream=RngStream(8))
    assert abs(est.mean - expected_growth(st_)) < 3 * est.std_error


def test_simulation_zero_sigma_is_exact():
    est = simulate_expected_growth(KellySetting(0.1, 0.0), reps=1000)
    assert est.mean == pytest.approx(0.02, rel=1e-14) and est.std_error < 1e-15


def test_negative_edge_large_noise_loses():
    est = simulate_expected_growth(KellySetting(-0.05, 0.2), reps=10**5)
    assert est.mean < 0


def test_policy_hook_reproduces_default_rule():
    s = KellySetting(0.05, 0.05)
    a = simulate_policy_growth(optimal_fraction, s, reps=10**5, stream=RngStream(5))
    b = simulate_expected_growth(s, reps=10**5, stream=RngStream(5))
    assert a.mean == pytest.approx(b.mean, rel=1e-9)
    half = simulate_policy_growth(lambda d: optimal_fraction(d) / 2, s, reps=10**5, stream=RngStream(5))
    assert np.isfinite(half.mean)
