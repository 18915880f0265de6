import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from roughprob.core import (
    CHUNK_SIZE, ConvergenceError, DomainError, ErrorModel, QuadratureSpec, RngStream,
    check_clamp, clamp_probability, gumbel_cdf, gumbel_pdf, integrate, integrate_vector,
    normal_cdf, normal_partial_expectation, normal_pdf, normal_sf, poisson_top, replicate,
    sample_poisson_descending,
)


# --- special functions --------------------------------------------------------

def test_normal_examples():
    assert normal_cdf(0.0) == 0.5
    assert normal_pdf(0.0) == pytest.approx(0.398942280, abs=1e-9)
    assert normal_cdf(1.0) == pytest.approx(0.841344746, abs=1e-9)


@pytest.mark.parametrize("x", [-30.0, -8.0, -1.5, -1e-3, 0.3, 2.0, 7.5])
def test_normal_cdf_against_multiprecision(x):
    exact = float(mpmath.ncdf(x))
    assert normal_cdf(x) == pytest.approx(exact, rel=1e-12, abs=1e-15)
    assert normal_sf(x) == pytest.approx(float(mpmath.ncdf(-x)), rel=1e-12, abs=1e-15)


def test_normal_scaled_and_vectorized():
    x = np.array([-1.0, 0.0, 2.0])
    assert np.allclose(normal_cdf(x, 2.0), normal_cdf(x / 2.0))
    assert np.allclose(normal_pdf(x, 2.0), normal_pdf(x / 2.0) / 2.0)
    assert isinstance(normal_cdf(0.5), float)


def test_normal_subnormal_sigma():
    x = np.array([-2.0, 0.5])
    assert np.all(normal_pdf(x, 5e-324) == 0.0)
    assert list(normal_cdf(x, 5e-324)) == [0.0, 1.0]


@pytest.mark.parametrize("sigma", [0.0, -1.0])
def test_normal_rejects_bad_sigma(sigma):
    with pytest.raises(DomainError):
        normal_cdf(0.0, sigma)
    with pytest.raises(DomainError):
        normal_pdf(0.0, sigma)


def test_normal_pdf_integrates_to_one():
    assert integrate(normal_pdf, -math.inf, math.inf) == pytest.approx(1.0, abs=1e-9)


def test_partial_expectation():
    # E[(Z - a)^+]
    for a in (-2.0, 0.0, 1.3):
        num = integrate(lambda z: (z - a) * normal_pdf(z), a, math.inf)
        assert normal_partial_expectation(a) == pytest.approx(num, abs=1e-10)


def test_gumbel():
    assert gumbel_cdf(0.0) == pytest.approx(0.367879441, abs=1e-9)
    assert gumbel_cdf(50.0) == pytest.approx(1.0)
    assert integrate(gumbel_pdf, -math.inf, math.inf) == pytest.approx(1.0, abs=1e-9)
    x, h = 0.7, 1e-5
    assert gumbel_pdf(x) == pytest.approx((gumbel_cdf(x + h) - gumbel_cdf(x - h)) / (2 * h), rel=1e-8)


# --- quadrature ---------------------------------------------------------------

def test_integrate_examples():
    assert integrate(lambda x: np.exp(-x), 0, math.inf) == pytest.approx(1.0, abs=1e-9)
    assert integrate(lambda x: np.ones_like(x), 0, 1) == pytest.approx(1.0, abs=1e-12)
    assert integrate(lambda x: np.exp(x), -math.inf, 0) == pytest.approx(1.0, abs=1e-9)
    assert integrate(lambda x: 1 / (1 + x * x), -math.inf, math.inf) == pytest.approx(math.pi, abs=1e-9)


def test_integrate_reversed_and_empty():
    f = lambda x: x * x
    assert integrate(f, 1, 0) == pytest.approx(-1 / 3, abs=1e-12)
    assert integrate(f, 2, 2) == 0.0


def test_integrate_scalar_callable():
    assert integrate(lambda x: math.cos(x), 0, math.pi / 2) == pytest.approx(1.0, abs=1e-12)


def test_integrate_break_points_help_with_kinks():
    f = lambda x: np.abs(x - 0.3)
    assert integrate(f, 0, 1, points=(0.3,)) == pytest.approx(0.29, abs=1e-13)


def test_integrate_convergence_error_carries_estimate():
    spec = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=3)
    with pytest.raises(ConvergenceError) as info:
        integrate(lambda x: np.abs(x - 0.3) ** 0.1, 0, 1, spec)
    assert info.value.estimate == pytest.approx(0.83, abs=0.05)
    assert info.value.error > 0


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=0)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(-5, 5), st.floats(0.01, 5))
def test_integrate_quadratics_exactly(a, b, c, lo, width):
    hi = lo + width
    f = lambda x: a + b * x + c * x * x
    exact = a * width + b * (hi ** 2 - lo ** 2) / 2 + c * (hi ** 3 - lo ** 3) / 3
    assert integrate(f, lo, hi) == pytest.approx(exact, abs=1e-9, rel=1e-9)


def test_integrate_vector_components():
    f = lambda x: np.column_stack([np.ones_like(x), x, np.sin(x)])
    out = integrate_vector(f, 0.0, math.pi)
    assert np.allclose(out, [math.pi, math.pi ** 2 / 2, 2.0], atol=1e-10)
    with pytest.raises(DomainError):
        integrate_vector(f, 0.0, math.inf)


# --- random streams and replication ---------------------------------------------

def test_stream_determinism_and_independence():
    a = RngStream(42, 1).generator().random(5)
    b = RngStream(42, 1).generator().random(5)
    c = RngStream(42, 2).generator().random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(RngStream(42, 1).generator(0).random(5), a)


def test_stream_child_is_stable():
    s = RngStream(7)
    assert s.child(3) == s.child(3)
    assert s.child(3) != s.child(4)


@pytest.mark.parametrize("bad", [-1, 1 << 64, 1.5])
def test_stream_rejects_bad_seed(bad):
    with pytest.raises(DomainError):
        RngStream(bad)


def _normal_sampler(rng, n):
    return rng.standard_normal(n)


def test_replicate_independent_of_workers():
    s = RngStream(5)
    one = replicate(_normal_sampler, 10_000, s, workers=1, chunk_size=1024)
    many = replicate(_normal_sampler, 10_000, s, workers=4, chunk_size=1024)
    assert one.mean == many.mean and one.std_error == many.std_error and one.n == 10_000


def test_replicate_merge_matches_direct_statistics():
    s = RngStream(9)
    est = replicate(_normal_sampler, 3000, s, chunk_size=700)
    draws = np.concatenate([s.generator(i).standard_normal(m)
                            for i, m in enumerate([700, 700, 700, 700, 200])])
    assert est.mean == pytest.approx(draws.mean(), abs=1e-14)
    assert est.std_error == pytest.approx(draws.std(ddof=1) / math.sqrt(3000), rel=1e-12)


def test_replicate_multi_column():
    est = replicate(lambda rng, n: np.column_stack([np.ones(n), 2 * np.ones(n)]), 100, RngStream(0))
    assert np.allclose(est.mean, [1, 2]) and np.allclose(est.std_error, 0)


def test_replicate_rejects_zero_reps():
    with pytest.raises(DomainError):
        replicate(_normal_sampler, 0, RngStream(0))


def test_default_chunk_size():
    assert CHUNK_SIZE == 65536


# --- error models -----------------------------------------------------------------

@pytest.mark.parametrize("model", [ErrorModel.normal(0.3), ErrorModel("uniform", 0.3)])
def test_error_model_moments(model):
    x = model.sample(RngStream(11).generator(), 10**6)
    assert abs(x.mean()) < 4 * model.scale / 1e3
    assert x.var() == pytest.approx(model.variance, rel=0.02)


def test_error_model_uniform_rms():
    m = ErrorModel.uniform_rms(0.1)
    assert m.rms == pytest.approx(0.1)
    assert m.scale == pytest.approx(0.1 * math.sqrt(3))
    assert m.cdf(0.0) == 0.5 and m.pdf(0.0) == pytest.approx(1 / (2 * m.scale))
    assert m.support() == (-m.scale, m.scale)


def test_error_model_validation_and_zero_scale():
    with pytest.raises(DomainError):
        ErrorModel("cauchy", 1.0)
    with pytest.raises(DomainError):
        ErrorModel.normal(-0.1)
    z = ErrorModel.normal(0.0)
    assert z.prob_below(0.1) == 1.0 and z.prob_above(0.1) == 0.0
    with pytest.raises(DomainError):
        z.pdf(0.0)


def test_normal_support_mass():
    lo, hi = ErrorModel.normal(2.0).support(1e-10)
    assert 2 * normal_sf(hi, 2.0) == pytest.approx(1e-10, rel=1e-6)
    assert lo == -hi


def test_clamp_rules():
    n = ErrorModel.normal(0.1)
    assert clamp_probability(0.5, n) == pytest.approx(2 * normal_sf(5.0))
    check_clamp(0.5, n)
    with pytest.raises(DomainError):
        check_clamp(0.2, n)
    with pytest.raises(DomainError):
        check_clamp(1.2, ErrorModel.normal(0.0))
    check_clamp(0.0, ErrorModel.normal(0.0))


# --- Poisson process -----------------------------------------------------------

def test_top_point_is_gumbel():
    x1 = poisson_top(RngStream(3).generator(), 10**5, 1)[:, 0]
    ks = stats.kstest(x1, gumbel_cdf).statistic
    assert ks < 0.01


def test_top_rows_decrease():
    top = poisson_top(RngStream(4).generator(), 1000, 5)
    assert np.all(np.diff(top, axis=1) < 0)


def test_descending_sampler_respects_gap():
    pts = sample_poisson_descending(RngStream(1), 5.0)
    assert pts == sorted(pts, reverse=True)
    assert all(p > pts[0] - 5.0 for p in pts)
    with pytest.raises(DomainError):
        sample_poisson_descending(RngStream(1), 0.0)


def test_descending_sampler_counts():
    # given the top point at x the rest is Poisson with mean e^-x (e^g - 1) inside the
    # gap, and E[e^-X1] = 1, so the list has e^g points on average
    g = 3.0
    counts = np.array([len(sample_poisson_descending(RngStream(10, i), g)) for i in range(3000)])
    se = counts.std(ddof=1) / math.sqrt(counts.size)
    assert abs(counts.mean() - math.exp(g)) < 4 * se


def test_descending_sampler_top_is_gumbel():
    tops = [sample_poisson_descending(RngStream(20, i), 1.0)[0] for i in range(3000)]
    assert stats.kstest(tops, gumbel_cdf).pvalue > 1e-3


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.floats(0.5, 4.0))
def test_descending_sampler_property(seed, gap):
    pts = sample_poisson_descending(RngStream(seed), gap)
    assert all(a > b for a, b in zip(pts, pts[1:]))
    assert pts[0] - pts[-1] <= gap
