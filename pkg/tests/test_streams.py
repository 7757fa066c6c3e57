"""Seeded substreams: determinism, independence, and calibration."""
import math

import numpy as np
import pytest

from evadesim.streams import (
    StreamKey,
    bernoulli_stream,
    beta_2_3_sample,
    generator,
    uniform_stream,
)


class TestStreamKey:
    def test_defaults(self):
        key = StreamKey(seed=42)
        assert (key.replicate, key.taxpayer, key.purpose) == (0, 0, "audit")

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(seed=-1),
            dict(seed=2**64),
            dict(seed=1, replicate=-1),
            dict(seed=1, taxpayer=-2),
            dict(seed=1, purpose="other"),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            StreamKey(**kwargs)


class TestDeterminism:
    def test_same_key_same_stream(self):
        key = StreamKey(seed=7, replicate=3, taxpayer=11, purpose="audit")
        a = bernoulli_stream(key, 0.05, 1000)
        b = bernoulli_stream(key, 0.05, 1000)
        assert (a == b).all()

    def test_distinct_keys_differ(self):
        base = dict(seed=7, replicate=0, taxpayer=0, purpose="decision")
        ref = uniform_stream(StreamKey(**base), 64)
        for variant in [
            dict(base, seed=8),
            dict(base, replicate=1),
            dict(base, taxpayer=1),
            dict(base, purpose="audit"),
        ]:
            other = uniform_stream(StreamKey(**variant), 64)
            assert (other != ref).any()

    def test_prefix_stability(self):
        # a longer request starts with the shorter request's draws
        key = StreamKey(seed=123, purpose="decision")
        short = uniform_stream(key, 100)
        long = uniform_stream(key, 1000)
        assert (long[:100] == short).all()

    def test_no_cross_stream_coupling(self):
        # consuming taxpayer j's decision stream at any rate leaves
        # taxpayer i's audit flags untouched
        audit_key = StreamKey(seed=99, taxpayer=0, purpose="audit")
        before = bernoulli_stream(audit_key, 0.01, 500)
        uniform_stream(StreamKey(seed=99, taxpayer=1, purpose="decision"), 10)
        uniform_stream(StreamKey(seed=99, taxpayer=1, purpose="decision"), 12345)
        after = bernoulli_stream(audit_key, 0.01, 500)
        assert (before == after).all()


class TestBernoulli:
    def test_rate_calibration(self):
        p, n = 0.01, 100_000
        flags = bernoulli_stream(StreamKey(seed=1), p, n)
        se = math.sqrt(p * (1 - p) / n)
        assert abs(flags.mean() - p) <= 3 * se

    def test_gap_mean_is_inverse_p(self):
        # gaps between successes are geometric with mean 1/p
        p, n = 0.01, 200_000
        flags = bernoulli_stream(StreamKey(seed=2), p, n)
        hits = np.flatnonzero(flags)
        gaps = np.diff(hits)
        se = gaps.std(ddof=1) / math.sqrt(len(gaps))
        assert abs(gaps.mean() - 1.0 / p) <= 3 * se

    def test_p_out_of_range(self):
        with pytest.raises(ValueError):
            bernoulli_stream(StreamKey(seed=1), 0.0, 10)
        with pytest.raises(ValueError):
            bernoulli_stream(StreamKey(seed=1), 1.0, 10)


class TestBeta23:
    def test_mean(self):
        draws = beta_2_3_sample(StreamKey(seed=3, purpose="parameter"), 100_000)
        assert abs(draws.mean() - 0.4) <= 0.005

    def test_variance(self):
        draws = beta_2_3_sample(StreamKey(seed=4, purpose="parameter"), 100_000)
        assert abs(draws.var(ddof=1) - 0.04) <= 0.004

    def test_open_unit_support(self):
        draws = beta_2_3_sample(StreamKey(seed=5, purpose="parameter"), 100_000)
        assert draws.min() > 0.0
        assert draws.max() < 1.0

    def test_count_validation(self):
        with pytest.raises(ValueError):
            beta_2_3_sample(StreamKey(seed=1), 0)


def test_generator_is_counter_based_philox():
    gen = generator(StreamKey(seed=1))
    assert type(gen.bit_generator).__name__ == "Philox"
