"""Closed-form quantities: frozen formula evaluations and shape properties."""
import math

import pytest

from evadesim.analytic import (
    FORTUNE_BOUND,
    PENALTY_BOUND,
    drift,
    drift_value,
    expected_compliance_time,
    naive_network_compliance_time,
    noncompliance_measure,
    optimal_tax_rate,
)
from evadesim.taxpayer import TaxpayerParams


def params(tau, k=0.4, p=0.01, lam=1.5, pf0=5.0):
    return TaxpayerParams(tau=tau, k=k, p=p, lam=lam, pf0=pf0)


class TestDrift:
    def test_fortune_bound_example(self):
        rep = drift(params(0.3))
        assert rep.drift == pytest.approx(-0.1, abs=1e-12)
        assert rep.regime == FORTUNE_BOUND
        assert rep.compliant_eventually

    def test_penalty_bound_example(self):
        rep = drift(params(0.02))
        assert rep.drift == pytest.approx(-0.01, abs=1e-12)
        assert rep.regime == PENALTY_BOUND
        assert rep.compliant_eventually

    def test_continuous_at_breakpoint(self):
        k, lam = 0.4, 1.5
        bp = k / lam
        expected = k * (1.0 - lam) / lam
        assert drift_value(bp, k, lam) == pytest.approx(expected, abs=1e-12)
        eps = 1e-9
        assert drift_value(bp - eps, k, lam) == pytest.approx(expected, abs=1e-8)
        assert drift_value(bp + eps, k, lam) == pytest.approx(expected, abs=1e-8)

    def test_negative_iff_tau_below_k(self):
        for tau in [0.05, 0.15, 0.25, 0.35, 0.399]:
            assert drift(params(tau)).drift < 0.0
        assert drift(params(0.4)).drift == pytest.approx(0.0, abs=1e-12)
        for tau in [0.41, 0.6, 0.9]:
            assert drift(params(tau)).drift > 0.0


class TestNoncomplianceMeasure:
    def test_fortune_bound_example(self):
        assert noncompliance_measure(params(0.3)) == pytest.approx(10.0, abs=1e-9)

    def test_high_tax_never_complies(self):
        assert math.isinf(noncompliance_measure(params(0.42)))

    def test_minimum_at_breakpoint(self):
        k, lam = 0.4, 1.5
        assert noncompliance_measure(params(k / lam)) == pytest.approx(
            lam / (k * (lam - 1.0)), abs=1e-9
        )

    def test_u_shape_around_breakpoint(self):
        k, lam = 0.4, 1.5
        bp = k / lam
        left = [0.05, 0.1, 0.15, 0.2, 0.25]
        right = [0.28, 0.3, 0.33, 0.36, 0.39]
        vals_left = [noncompliance_measure(params(t)) for t in left]
        vals_right = [noncompliance_measure(params(t)) for t in right]
        assert all(a > b for a, b in zip(vals_left, vals_left[1:]))
        assert all(a < b for a, b in zip(vals_right, vals_right[1:]))
        floor = noncompliance_measure(params(bp))
        assert all(v >= floor for v in vals_left + vals_right)


class TestExpectedComplianceTime:
    def test_fortune_bound_example(self):
        assert expected_compliance_time(params(0.3)) == pytest.approx(150.0, abs=1e-9)

    def test_penalty_bound_example(self):
        assert expected_compliance_time(params(0.02)) == pytest.approx(600.0, abs=1e-9)

    def test_high_tax_infinite(self):
        assert math.isinf(expected_compliance_time(params(0.42)))
        assert math.isinf(expected_compliance_time(params(0.4)))  # tau == k


class TestOptimalTaxRate:
    def test_reference_values(self):
        assert optimal_tax_rate(0.4, 1.5) == pytest.approx(0.4 / 1.5, abs=1e-12)
        assert optimal_tax_rate(0.5, 2.0) == pytest.approx(0.25, abs=1e-12)

    def test_limit_lambda_to_one(self):
        assert optimal_tax_rate(0.3, 1.0 + 1e-9) == pytest.approx(0.3, abs=1e-6)

    def test_bounds(self):
        with pytest.raises(ValueError):
            optimal_tax_rate(0.0, 1.5)
        with pytest.raises(ValueError):
            optimal_tax_rate(0.4, 1.0)


class TestMonteCarloAgreement:
    @pytest.mark.parametrize(
        "tau,k,p,lam,pf0",
        [
            (0.2, 0.5, 0.05, 1.5, 2.0),   # penalty-bound
            (0.35, 0.45, 0.02, 1.5, 3.0),  # fortune-bound
            (0.1, 0.4, 0.1, 2.0, 1.0),    # heavier audits
        ],
    )
    def test_simulated_compliance_time_matches_formula(self, tau, k, p, lam, pf0):
        """Mean first time with pf <= 0 over 1000 seeded runs within 5% of
        the closed form whenever drift <= -0.01 and p >= 0.01."""
        from evadesim.streams import StreamKey, bernoulli_stream
        from evadesim.taxpayer import first_compliance_time

        p_obj = TaxpayerParams(tau=tau, k=k, p=p, lam=lam, pf0=pf0)
        assert drift(p_obj).drift <= -0.01
        analytic = expected_compliance_time(p_obj)
        times = []
        for r in range(1000):
            audits = bernoulli_stream(StreamKey(555, r, 0, "audit"), p, 20000)
            t = first_compliance_time(p_obj, audits, 20000)
            assert t is not None
            times.append(t)
        mean = sum(times) / len(times)
        assert abs(mean - analytic) / analytic <= 0.05


class TestNaiveNetworkComplianceTime:
    def test_all_ones(self):
        assert naive_network_compliance_time([1.0] * 10, params(0.3)) == pytest.approx(
            10.0, abs=1e-9
        )

    def test_mean_of_two(self):
        assert naive_network_compliance_time([2.0, 4.0], params(0.3)) == pytest.approx(
            30.0, abs=1e-9
        )

    def test_single_element_reduction(self):
        assert naive_network_compliance_time([7.0], params(0.3)) == pytest.approx(
            70.0, abs=1e-9
        )

    def test_nonnegative_drift_rejected(self):
        with pytest.raises(ValueError):
            naive_network_compliance_time([1.0], params(0.42))
        with pytest.raises(ValueError):
            naive_network_compliance_time([], params(0.3))
