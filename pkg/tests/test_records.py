import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from record_lomax import lomax
from record_lomax.errors import DomainError
from record_lomax.lomax import LomaxParams
from record_lomax.records import (
    RecordSequence,
    extract_upper_records,
    joint_log_density,
    record_log_values,
    sample_records,
)

KS99 = stats.kstwobign.ppf(0.99)


class TestExtract:
    def test_mixed(self):
        assert extract_upper_records([3, 1, 4, 1, 5]).values == (3.0, 4.0, 5.0)

    def test_increasing(self):
        assert extract_upper_records([1, 2, 3]).values == (1.0, 2.0, 3.0)

    def test_decreasing(self):
        assert extract_upper_records([5, 4, 3]).values == (5.0,)

    def test_ties_are_not_records(self):
        assert extract_upper_records([2, 2, 3, 3]).values == (2.0, 3.0)

    def test_empty(self):
        with pytest.raises(DomainError):
            extract_upper_records([])

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1))
    def test_idempotent(self, seq):
        once = extract_upper_records(seq)
        assert extract_upper_records(once.values) == once

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1))
    def test_records_dominate_prefix(self, seq):
        recs = extract_upper_records(seq)
        assert recs.values[0] == seq[0]
        assert recs.last == max(seq)


class TestRecordSequence:
    def test_rejects_non_increasing(self):
        with pytest.raises(DomainError):
            RecordSequence((1.0, 1.0))

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            RecordSequence(())


class TestSampleRecords:
    def test_strictly_increasing(self):
        gen = np.random.default_rng(0)
        for m in (1, 2, 5, 30):
            r = sample_records(m, LomaxParams(1.5), gen)
            assert r.m == m
            assert all(b > a for a, b in zip(r.values, r.values[1:]))
            assert r.values[0] >= 0.0

    def test_matches_vectorised_construction(self):
        a = sample_records(6, LomaxParams(2.0), np.random.default_rng(4))
        b = np.expm1(record_log_values(6, LomaxParams(2.0), np.random.default_rng(4)))
        np.testing.assert_array_equal(a.values, b)

    def test_bad_m(self):
        with pytest.raises(DomainError):
            sample_records(0, LomaxParams(1.0), np.random.default_rng(0))

    def test_first_record_is_lomax(self, rng):
        params = LomaxParams(1.0)
        r1 = np.expm1(record_log_values(1, params, rng, size=100_000)[:, 0])
        d = stats.ks_1samp(r1, lambda v: lomax.cdf(v, params)).statistic
        assert d < KS99 / math.sqrt(r1.size)

    def test_log_last_record_mean(self, rng):
        s = record_log_values(5, LomaxParams(1.0), rng, size=100_000)[:, -1]
        se = s.std(ddof=1) / math.sqrt(s.size)
        assert abs(s.mean() - 5.0) <= 3 * se

    @pytest.mark.parametrize("m,theta", [(3, 0.5), (8, 2.0)])
    def test_gamma_law_moments(self, m, theta, rng):
        s = record_log_values(m, LomaxParams(theta), rng, size=100_000)[:, -1]
        n = s.size
        se_mean = math.sqrt(m) * theta / math.sqrt(n)
        # SE of the sample variance from the Gamma fourth central moment 3k(k+2)theta^4
        se_var = math.sqrt((3 * m * (m + 2) - m * m) * theta**4 / n)
        assert abs(s.mean() - m * theta) <= 3 * se_mean
        assert abs(s.var(ddof=1) - m * theta**2) <= 3 * se_var

    def test_agrees_with_extraction_from_raw_sequences(self):
        # R_2 from records extracted out of long raw sequences vs spacings construction
        params = LomaxParams(1.0)
        gen = np.random.default_rng(2024)
        m, length, reps = 2, 2000, 10_000
        extracted = []
        while len(extracted) < reps:
            x = lomax.sample(length * 500, params, gen).reshape(500, length)
            prev_max = np.maximum.accumulate(x, axis=1)
            is_rec = np.ones_like(x, dtype=bool)
            is_rec[:, 1:] = x[:, 1:] > prev_max[:, :-1]
            for row, flags in zip(x, is_rec):
                vals = row[flags]
                if vals.size >= m:
                    extracted.append(vals[m - 1])
        extracted = np.array(extracted[:reps])
        simulated = np.expm1(record_log_values(m, params, gen, size=reps)[:, -1])
        d = stats.ks_2samp(extracted, simulated).statistic
        assert d < KS99 * math.sqrt(2.0 / reps)


class TestJointLogDensity:
    @pytest.mark.parametrize("x,theta", [(0.0, 1.0), (0.7, 0.4), (12.0, 3.0)])
    def test_single_record_is_log_pdf(self, x, theta):
        params = LomaxParams(theta)
        got = joint_log_density(RecordSequence((x,)), params)
        assert got == pytest.approx(math.log(lomax.pdf(x, params)), rel=1e-14, abs=1e-15)

    def test_exact_value(self):
        assert joint_log_density(RecordSequence((math.e - 1,)), LomaxParams(1.0)) == pytest.approx(-2.0, rel=1e-15)

    def test_negative_records_rejected(self):
        with pytest.raises(DomainError):
            joint_log_density(RecordSequence((-0.5, 1.0)), LomaxParams(1.0))

    @pytest.mark.parametrize("seed", range(5))
    def test_argmax_is_record_mle(self, seed):
        gen = np.random.default_rng(seed)
        recs = sample_records(int(gen.integers(1, 20)), LomaxParams(float(gen.uniform(0.3, 3.0))), gen)
        grid = np.linspace(0.01, 8.0, 8000)
        ll = [joint_log_density(recs, LomaxParams(t)) for t in grid]
        best = grid[int(np.argmax(ll))]
        assert abs(best - math.log1p(recs.last) / recs.m) <= grid[1] - grid[0]
