import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distmaint.reliability import (
    FailureModel, QuadratureError, adaptive_simpson, expected_downtime, site_availability, weibull_cdf,
    weibull_pdf,
)
from distmaint.units import HOURS_PER_YEAR

from oracles import monte_carlo_downtime, quad_cdf, quad_downtime

ETA = HOURS_PER_YEAR

etas = st.floats(0.2 * ETA, 3 * ETA)
betas = st.floats(1.0, 4.0)


class UniformModel:
    """Failure instant uniform on [0, length]; no ``eta`` attribute."""

    def __init__(self, length):
        self.length = length

    def cdf(self, t):
        return min(max(t / self.length, 0.0), 1.0)

    def pdf(self, t):
        return 1.0 / self.length if 0 <= t <= self.length else 0.0


class FlatModel:
    def cdf(self, t):
        return 0.0

    def pdf(self, t):
        return 0.0


def test_cdf_hand_values():
    m = FailureModel(ETA, 2.0)
    assert weibull_cdf(0.0, m) == 0.0
    assert weibull_cdf(ETA, FailureModel(ETA, 3.0)) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    assert weibull_cdf(2 * ETA, m) == pytest.approx(0.98168, abs=5e-6)
    assert m.cdf(2 * ETA) == weibull_cdf(2 * ETA, m)


def test_pdf_hand_values():
    assert weibull_pdf(0.0, FailureModel(ETA, 2.0)) == 0.0
    assert weibull_pdf(ETA, FailureModel(ETA, 1.0)) == pytest.approx(math.exp(-1) / ETA, rel=1e-14)


@pytest.mark.parametrize("eta, beta", [(0.0, 2.0), (-1.0, 2.0), (ETA, 0.5), (ETA, 0.0)])
def test_model_validation(eta, beta):
    with pytest.raises(ValueError):
        FailureModel(eta, beta)


def test_negative_time_is_domain_error():
    m = FailureModel(ETA, 2.0)
    with pytest.raises(ValueError):
        weibull_cdf(-1.0, m)
    with pytest.raises(ValueError):
        weibull_pdf(-1.0, m)


def test_from_years():
    assert FailureModel.from_years(1.0, 2.0) == FailureModel(ETA, 2.0)


def test_adaptive_simpson_polynomial_and_cap():
    assert adaptive_simpson(lambda x: x**3 - x, 0.0, 2.0) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: math.sin(1 / x) if x else 0.0, 0.0, 1.0, tol=1e-14, max_intervals=50)


@given(etas, betas, st.floats(0.01, 3.0))
def test_pdf_integrates_to_cdf(eta, beta, frac):
    m = FailureModel(eta, beta)
    T = frac * eta
    assert abs(quad_cdf(m, T) - m.cdf(T)) < 1e-8


@given(etas, betas, st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_cdf_monotone_and_bounded(eta, beta, a, b):
    m = FailureModel(eta, beta)
    t1, t2 = sorted((a * eta, b * eta))
    assert 0.0 <= m.cdf(t1) <= m.cdf(t2) <= 1.0


def test_downtime_uniform_is_midpoint():
    for L in (1.0, 37.5, 1000.0):
        est = expected_downtime(0.0, L, UniformModel(L))
        assert est.ttd == pytest.approx(L / 2, rel=1e-10)
        assert est.failure_prob == pytest.approx(1.0)


def test_downtime_zero_mass_interval():
    est = expected_downtime(5.0, 5.0 + 1e-3, FlatModel())
    assert est.ttd == 0.0 and est.failure_prob == 0.0


def test_downtime_half_year_against_quadrature_and_monte_carlo():
    m = FailureModel(ETA, 2.0)
    L = 0.5 * ETA
    est = expected_downtime(0.0, L, m)
    ttd, prob = quad_downtime(m, L)
    assert est.failure_prob == pytest.approx(prob, abs=1e-14)
    assert est.ttd == pytest.approx(ttd, rel=1e-9)
    assert est.ttd == pytest.approx(1537.5626, abs=1e-3)
    mc = monte_carlo_downtime(ETA, 2.0, L, 1_000_000, seed=7)
    assert abs(mc - est.ttd) / est.ttd < 0.01


def test_renewed_flag_uses_absolute_age():
    m = FailureModel(ETA, 2.0)
    a, b = 0.3 * ETA, 0.8 * ETA
    absolute = expected_downtime(a, b, m, renewed=False)
    assert absolute.failure_prob == pytest.approx(m.cdf(b) - m.cdf(a), abs=1e-15)
    renewed = expected_downtime(a, b, m)
    assert renewed.failure_prob == pytest.approx(m.cdf(b - a), abs=1e-15)


def test_downtime_rejects_bad_interval():
    m = FailureModel(ETA, 2.0)
    with pytest.raises(ValueError):
        expected_downtime(10.0, 10.0, m)
    with pytest.raises(ValueError):
        expected_downtime(-1.0, 10.0, m)


@given(etas, betas, st.floats(0.0, 1.5), st.floats(1e-3, 2.0), st.booleans())
def test_downtime_bounds(eta, beta, start, length, renewed):
    m = FailureModel(eta, beta)
    a, b = start * eta, (start + length) * eta
    est = expected_downtime(a, b, m, renewed=renewed)
    assert 0.0 <= est.ttd <= b - a
    assert 0.0 <= est.failure_prob <= 1.0


@given(etas, betas, st.floats(0.0, 1.0), st.floats(1e-3, 1.0), st.floats(0.0, 1.0), st.booleans())
def test_widening_right_never_lowers_probability(eta, beta, start, length, extra, renewed):
    m = FailureModel(eta, beta)
    a, b = start * eta, (start + length) * eta
    p1 = expected_downtime(a, b, m, renewed=renewed).failure_prob
    p2 = expected_downtime(a, b + extra * eta, m, renewed=renewed).failure_prob
    assert p2 >= p1


@given(etas, betas, st.floats(0.01, 2.0))
def test_downtime_matches_scipy(eta, beta, frac):
    m = FailureModel(eta, beta)
    L = frac * eta
    est = expected_downtime(0.0, L, m)
    ttd, prob = quad_downtime(m, L)
    if prob < 1e-12:
        assert est.ttd == 0.0
    else:
        assert est.ttd == pytest.approx(ttd, rel=1e-6, abs=1e-6)


def test_availability_examples():
    assert site_availability([10.0], [0.0], [0.3], 100.0) == 1.0
    assert site_availability([10.0], [100.0], [1.0], 100.0) == 0.0
    assert site_availability([10.0], [100.0], [0.5], 1000.0) == pytest.approx(0.95)


@given(st.lists(st.tuples(st.floats(0, 1e4), st.floats(0, 1)), max_size=6), st.floats(1.0, 1e4))
def test_availability_bounded(terms, horizon):
    ttds = [t for t, _ in terms]
    probs = [p for _, p in terms]
    a = site_availability([0.0] * len(terms), ttds, probs, horizon)
    assert 0.0 <= a <= 1.0


def test_availability_rejects_bad_input():
    with pytest.raises(ValueError):
        site_availability([0.0], [1.0], [1.5], 10.0)
    with pytest.raises(ValueError):
        site_availability([0.0], [1.0], [0.5], 0.0)
