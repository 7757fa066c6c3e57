"""Closed-form quantities used as oracles against simulation.

These are independent of the simulation code paths on purpose: tests compare
Monte Carlo estimates against these formulas, so a bug would have to appear
identically on both sides to slip through.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .taxpayer import TaxpayerParams

PENALTY_BOUND = "penalty-bound"
FORTUNE_BOUND = "fortune-bound"


@dataclass(frozen=True)
class DriftReport:
    """Average per-step change in evasion profit between audits.

    drift = tau*(1-lam) while the penalty is what an audit recovers
    (lam*tau <= k), and tau - k once the fortune is the binding cap
    (lam*tau > k). Negative drift forces eventual compliance.
    """

    drift: float
    regime: str
    compliant_eventually: bool


def drift_value(tau: float, k: float, lam: float) -> float:
    """tau*(1-lam) below the breakpoint tau = k/lam, tau - k above it."""
    if lam * tau <= k:
        return tau * (1.0 - lam)
    return tau - k


def drift(params: TaxpayerParams) -> DriftReport:
    """Per-step drift of pf between audits, with the active regime."""
    value = drift_value(params.tau, params.k, params.lam)
    regime = PENALTY_BOUND if params.lam * params.tau <= params.k else FORTUNE_BOUND
    return DriftReport(drift=value, regime=regime, compliant_eventually=value < 0.0)


def noncompliance_measure(params: TaxpayerParams) -> float:
    """-1/drift when drift is negative; infinity when the taxpayer never
    becomes compliant (drift >= 0, i.e. tau >= k)."""
    d = drift(params).drift
    if d >= 0.0:
        return float("inf")
    return -1.0 / d


def expected_compliance_time(params: TaxpayerParams) -> float:
    """Expected first time at which pf drops to zero or below.

    pf0/|drift| steps of drift are needed, plus a mean 1/p wait for the
    audit that realizes the final drop. Infinite when tau >= k.
    """
    d = drift(params).drift
    if d >= 0.0:
        return float("inf")
    return params.pf0 / -d + 1.0 / params.p


def optimal_tax_rate(k: float, lam: float) -> float:
    """Tax rate minimizing the non-compliance measure: k/lam."""
    if not 0.0 < k < 1.0:
        raise ValueError(f"k must be in (0, 1), got {k}")
    if not lam > 1.0:
        raise ValueError(f"lam must exceed 1, got {lam}")
    return k / lam


def naive_network_compliance_time(
    pf0_values: Sequence[float], params: TaxpayerParams
) -> float:
    """Audit-blind estimate of when a group's summed profit turns negative:
    mean initial profit divided by |drift|. Known to undershoot simulations
    badly because it ignores the audit probability."""
    if len(pf0_values) == 0:
        raise ValueError("pf0_values must be non-empty")
    d = drift(params).drift
    if d >= 0.0:
        raise ValueError(
            f"compliance-time estimate undefined: drift {d} is non-negative"
        )
    return (sum(pf0_values) / len(pf0_values)) / -d
