import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from record_lomax import lomax
from record_lomax.errors import DomainError
from record_lomax.lomax import LomaxParams

from conftest import integrate_halfline

THETAS = [0.25, 0.5, 1.0, 2.0, 5.0]


class FixedUniform:
    def __init__(self, *values):
        self.values = list(values)

    def random(self, size):
        return np.array(self.values[:size])


class TestParams:
    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
    def test_rejects_non_positive_theta(self, bad):
        with pytest.raises(DomainError):
            LomaxParams(bad)

    def test_coerces_to_float(self):
        assert LomaxParams(2).theta == 2.0


class TestPdf:
    def test_at_zero_is_inverse_theta(self):
        assert lomax.pdf(0.0, LomaxParams(2.0)) == 0.5

    def test_x1_theta1(self):
        assert lomax.pdf(1.0, LomaxParams(1.0)) == pytest.approx(0.25, rel=1e-15)

    def test_x_half_theta_half(self):
        # 2 * 1.5^-3 = 16/27
        assert lomax.pdf(0.5, LomaxParams(0.5)) == pytest.approx(16 / 27, rel=1e-14)

    def test_negative_x(self):
        with pytest.raises(DomainError):
            lomax.pdf(-0.1, LomaxParams(1.0))

    def test_array_input(self):
        out = lomax.pdf(np.array([0.0, 1.0]), LomaxParams(1.0))
        np.testing.assert_allclose(out, [1.0, 0.25], rtol=1e-15)


class TestCdf:
    def test_lower_endpoint(self):
        assert lomax.cdf(0.0, LomaxParams(3.0)) == 0.0

    def test_x1_theta1(self):
        assert lomax.cdf(1.0, LomaxParams(1.0)) == pytest.approx(0.5, rel=1e-15)

    def test_e_squared(self):
        assert lomax.cdf(math.e**2 - 1, LomaxParams(2.0)) == pytest.approx(0.6321205588285577, rel=1e-14)

    def test_tends_to_one(self):
        assert lomax.cdf(1e300, LomaxParams(0.5)) == 1.0

    def test_negative_x(self):
        with pytest.raises(DomainError):
            lomax.cdf(-1.0, LomaxParams(1.0))


class TestQuantile:
    def test_zero(self):
        assert lomax.quantile(0.0, LomaxParams(4.0)) == 0.0

    def test_median_theta1(self):
        assert lomax.quantile(0.5, LomaxParams(1.0)) == pytest.approx(1.0, rel=1e-15)

    def test_p09_theta2(self):
        assert lomax.quantile(0.9, LomaxParams(2.0)) == pytest.approx(99.0, rel=1e-13)

    @pytest.mark.parametrize("p", [1.0, -0.1, 1.5, math.nan])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            lomax.quantile(p, LomaxParams(1.0))

    @pytest.mark.parametrize("theta", THETAS)
    def test_round_trip_grid(self, theta):
        p = np.arange(100) / 100.0
        back = lomax.cdf(lomax.quantile(p, LomaxParams(theta)), LomaxParams(theta))
        assert np.max(np.abs(back - p)) <= 1e-12


class TestSample:
    def test_first_uniform_half(self):
        out = lomax.sample(1, LomaxParams(1.0), FixedUniform(0.5))
        np.testing.assert_allclose(out, [1.0], rtol=1e-15)

    def test_deterministic(self):
        a = lomax.sample(50, LomaxParams(1.0), np.random.default_rng(3))
        b = lomax.sample(50, LomaxParams(1.0), np.random.default_rng(3))
        assert np.array_equal(a, b)

    def test_each_draw_is_quantile_of_uniform(self):
        u = np.random.default_rng(9).random(20)
        draws = lomax.sample(20, LomaxParams(2.5), np.random.default_rng(9))
        np.testing.assert_array_equal(draws, lomax.quantile(u, LomaxParams(2.5)))

    def test_bad_n(self):
        with pytest.raises(DomainError):
            lomax.sample(0, LomaxParams(1.0), np.random.default_rng(0))

    def test_log_mean_theta1(self, rng):
        y = lomax.log1p_transform(lomax.sample(100_000, LomaxParams(1.0), rng))
        se = y.std(ddof=1) / math.sqrt(y.size)
        assert abs(y.mean() - 1.0) <= 3 * se

    def test_ks_theta_half(self, rng):
        x = lomax.sample(100_000, LomaxParams(0.5), rng)
        d = stats.ks_1samp(x, lambda v: lomax.cdf(v, LomaxParams(0.5))).statistic
        assert d < stats.kstwobign.ppf(0.99) / math.sqrt(x.size)

    @pytest.mark.parametrize("theta", [0.5, 1.0, 3.0])
    def test_log_transform_is_exponential(self, theta, rng):
        y = lomax.log1p_transform(lomax.sample(20_000, LomaxParams(theta), rng))
        d = stats.ks_1samp(y, stats.expon(scale=theta).cdf).statistic
        assert d < stats.kstwobign.ppf(0.99) / math.sqrt(y.size)


class TestInvariants:
    @pytest.mark.parametrize("theta", [0.25, 0.5, 1.0, 2.0])
    def test_normalisation(self, theta):
        params = LomaxParams(theta)
        upper = lomax.quantile(1 - 1e-10, params)
        total = integrate_halfline(lambda x: lomax.pdf(x, params), upper)
        assert abs(total - 1.0) <= 1e-6

    @pytest.mark.parametrize("theta", THETAS)
    def test_monotone(self, theta):
        x = np.linspace(0.0, 50.0, 2001)
        params = LomaxParams(theta)
        assert np.all(np.diff(lomax.pdf(x, params)) < 0)
        assert np.all(np.diff(lomax.cdf(x, params)) > 0)

    @given(
        x=st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
        theta=st.floats(min_value=0.05, max_value=20.0),
    )
    def test_hazard_identity(self, x, theta):
        params = LomaxParams(theta)
        ratio = lomax.sf(x, params) / lomax.pdf(x, params)
        assert ratio == pytest.approx(theta * (1 + x), rel=1e-10)

    @given(
        p=st.floats(min_value=0.0, max_value=0.999999),
        theta=st.floats(min_value=0.05, max_value=10.0),
    )
    def test_round_trip_property(self, p, theta):
        params = LomaxParams(theta)
        assert abs(lomax.cdf(lomax.quantile(p, params), params) - p) <= 1e-12
