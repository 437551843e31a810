import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from record_lomax import lomax
from record_lomax.errors import DegenerateEstimateError, DomainError
from record_lomax.estimators import (
    Source,
    cdf_hat,
    log_likelihood_sample,
    log_likelihood_second_derivative,
    mle_from_records,
    mle_from_sample,
    pdf_hat,
)
from record_lomax.lomax import LomaxParams
from record_lomax.records import RecordSequence, record_log_values, sample_records

from conftest import integrate_halfline

E = math.e


class TestSampleMle:
    def test_two_equal_points(self):
        rep = mle_from_sample([E - 1, E - 1])
        assert rep.theta_hat == pytest.approx(1.0, rel=1e-15)
        assert rep.source is Source.SAMPLE and rep.count == 2

    def test_zero_and_e_squared(self):
        assert mle_from_sample([0.0, E**2 - 1]).theta_hat == pytest.approx(1.0, rel=1e-15)

    def test_empty(self):
        with pytest.raises(DomainError):
            mle_from_sample([])

    def test_negative(self):
        with pytest.raises(DomainError):
            mle_from_sample([1.0, -0.5])

    def test_all_zero_is_degenerate(self):
        with pytest.raises(DegenerateEstimateError):
            mle_from_sample([0.0, 0.0, 0.0])

    def test_large_sample(self, rng):
        n = 100_000
        rep = mle_from_sample(lomax.sample(n, LomaxParams(2.0), rng))
        assert abs(rep.theta_hat - 2.0) <= 3 * 2.0 / math.sqrt(n)


class TestRecordMle:
    def test_three_records(self):
        rep = mle_from_records(RecordSequence((0.5, 2.0, E**3 - 1)))
        assert rep.theta_hat == pytest.approx(1.0, rel=1e-15)
        assert rep.source is Source.RECORDS and rep.count == 3

    def test_single_record(self):
        assert mle_from_records(RecordSequence((E - 1,))).theta_hat == pytest.approx(1.0, rel=1e-15)

    def test_zero_last_record(self):
        with pytest.raises(DegenerateEstimateError):
            mle_from_records(RecordSequence((0.0,)))

    def test_replicated_mean(self, rng):
        theta_hat = record_log_values(5, LomaxParams(1.0), rng, size=100_000)[:, -1] / 5
        se = theta_hat.std(ddof=1) / math.sqrt(theta_hat.size)
        assert abs(theta_hat.mean() - 1.0) <= 3 * se

    @pytest.mark.parametrize("m,theta", [(5, 1.0), (12, 0.4)])
    def test_gamma_representation_moments(self, m, theta, rng):
        t = record_log_values(m, LomaxParams(theta), rng, size=100_000)[:, -1] / m
        n = t.size
        assert abs(t.mean() - theta) <= 3 * theta / math.sqrt(m * n)
        # Var of sample variance for Gamma(m, theta)/m
        se_var = math.sqrt((3 * m * (m + 2) - m * m) * theta**4 / m**4 / n)
        assert abs(t.var(ddof=1) - theta**2 / m) <= 3 * se_var


class TestPlugIn:
    def test_pdf_hat_at_zero(self):
        recs = RecordSequence((0.3, 1.0, 4.0))
        assert pdf_hat(0.0, recs) == pytest.approx(1.0 / mle_from_records(recs).theta_hat, rel=1e-15)

    def test_unit_theta_values(self):
        recs = RecordSequence((E - 1,))
        assert pdf_hat(1.0, recs) == pytest.approx(0.25, rel=1e-14)
        assert cdf_hat(1.0, recs) == pytest.approx(0.5, rel=1e-14)
        assert cdf_hat(0.0, recs) == 0.0

    @pytest.mark.parametrize("seed", range(3))
    def test_composition_identity(self, seed):
        recs = sample_records(7, LomaxParams(1.3), np.random.default_rng(seed))
        params = mle_from_records(recs).params
        x = np.linspace(0, 30, 61)
        np.testing.assert_array_equal(pdf_hat(x, recs), lomax.pdf(x, params))
        np.testing.assert_array_equal(cdf_hat(x, recs), lomax.cdf(x, params))

    @pytest.mark.parametrize("seed", range(4))
    def test_cdf_hat_is_a_cdf(self, seed):
        recs = sample_records(4, LomaxParams(0.8), np.random.default_rng(seed))
        x = np.concatenate([[0.0], np.logspace(-4, 12, 400)])
        F = cdf_hat(x, recs)
        assert F[0] == 0.0
        assert np.all(np.diff(F) >= 0)
        assert cdf_hat(1e300, recs) == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(4))
    def test_pdf_hat_integrates_to_one(self, seed):
        recs = sample_records(6, LomaxParams(0.5), np.random.default_rng(seed))
        total = integrate_halfline(lambda x: pdf_hat(x, recs))
        assert abs(total - 1.0) <= 1e-6


class TestLogLikelihood:
    def test_single_point(self):
        assert log_likelihood_sample([E - 1], LomaxParams(1.0)) == pytest.approx(-2.0, rel=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_grid_argmax(self, seed):
        gen = np.random.default_rng(seed)
        x = lomax.sample(int(gen.integers(2, 200)), LomaxParams(float(gen.uniform(0.2, 4.0))), gen)
        grid = np.linspace(0.01, 10.0, 10_000)
        ll = [log_likelihood_sample(x, LomaxParams(t)) for t in grid]
        assert abs(grid[int(np.argmax(ll))] - mle_from_sample(x).theta_hat) <= grid[1] - grid[0]

    @given(st.lists(st.floats(min_value=1e-3, max_value=1e6), min_size=1, max_size=50))
    def test_second_derivative_negative_at_mle(self, sample):
        theta_hat = mle_from_sample(sample).theta_hat
        s = float(np.log1p(np.asarray(sample)).sum())
        d2 = log_likelihood_second_derivative(sample, LomaxParams(theta_hat))
        assert d2 < 0
        assert d2 == pytest.approx(-len(sample) ** 3 / s**2, rel=1e-9)

    @pytest.mark.parametrize("seed", range(3))
    def test_second_finite_difference(self, seed):
        x = lomax.sample(40, LomaxParams(1.5), np.random.default_rng(seed))
        t = mle_from_sample(x).theta_hat
        h = 1e-4 * t
        ll = lambda v: log_likelihood_sample(x, LomaxParams(v))
        fd = (ll(t + h) - 2 * ll(t) + ll(t - h)) / h**2
        assert fd < 0
        assert fd == pytest.approx(log_likelihood_second_derivative(x, LomaxParams(t)), rel=1e-4)
