"""Single-taxpayer evasion process.

A taxpayer earns one unit of income per step, decides whether to evade the
tax on it, retains a fraction of the income as savings, and may be audited.
An audit claws back the full penalty on every evasion since the last audit,
capped by the fortune on hand.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class TaxpayerParams:
    """Model parameters.

    tau: tax rate on the unit income.
    k: savings rate (fraction of after-tax income retained).
    p: per-step audit probability.
    lam: penalty multiplier applied to evaded tax at audit.
    pf0: initial perceived profit from evasion; must be positive or the
        taxpayer would never evade.
    """

    tau: float
    k: float
    p: float
    lam: float
    pf0: float

    def __post_init__(self) -> None:
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must be in (0, 1), got {self.tau}")
        if not 0.0 < self.k < 1.0:
            raise ValueError(f"k must be in (0, 1), got {self.k}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {self.p}")
        if not self.lam > 1.0:
            raise ValueError(f"lam must exceed 1, got {self.lam}")
        if not self.pf0 > 0.0:
            raise ValueError(f"pf0 must be positive, got {self.pf0}")


@dataclass(frozen=True)
class TaxpayerState:
    """Evolving state: fortune f, cumulative evasion profit pf, evasions n
    since the last audit, lifetime evasion count n_total, time step t."""

    f: float = 0.0
    pf: float = 0.0
    n: int = 0
    n_total: int = 0
    t: int = 0


@dataclass(frozen=True)
class StepOutcome:
    """Log record for one step: what happened and the state afterwards."""

    evaded: bool
    audited: bool
    repaid: float
    state_after: TaxpayerState


def initial_state(params: TaxpayerParams) -> TaxpayerState:
    return TaxpayerState(f=0.0, pf=params.pf0, n=0, n_total=0, t=0)


def decide_evade(state: TaxpayerState) -> bool:
    """Evade iff the profit from evasion so far is strictly positive."""
    return state.pf > 0.0


def _advance(
    tau: float,
    k: float,
    lam: float,
    f: float,
    pf: float,
    n: int,
    evade: bool,
    audited: bool,
) -> tuple[float, float, int, float]:
    """One raw state update; returns (f, pf, n, repaid).

    Income lands first (k retained when evading, k*(1-tau) otherwise); an
    audit then computes the repayment once, from the post-income values, and
    subtracts it from both f and pf. This is the single update kernel shared
    by every simulation path, so trajectories agree bit for bit.
    """
    if evade:
        f = f + k
        pf = pf + tau
        n = n + 1
    else:
        f = f + k * (1.0 - tau)
    repaid = 0.0
    if audited:
        repaid = min(f, lam * tau * n)
        f = f - repaid
        pf = pf - repaid
        n = 0
    return f, pf, n, repaid


def apply_step(
    params: TaxpayerParams,
    state: TaxpayerState,
    evade: bool,
    audited: bool,
) -> StepOutcome:
    """Advance one step with the evasion decision supplied by the caller.

    Network simulations decide from neighborhood information; the update
    itself is identical to the single-taxpayer case.
    """
    f, pf, n, repaid = _advance(
        params.tau, params.k, params.lam, state.f, state.pf, state.n, evade, audited
    )
    after = TaxpayerState(
        f=f,
        pf=pf,
        n=n,
        n_total=state.n_total + (1 if evade else 0),
        t=state.t + 1,
    )
    return StepOutcome(evaded=evade, audited=audited, repaid=repaid, state_after=after)


def step(params: TaxpayerParams, state: TaxpayerState, audited: bool) -> StepOutcome:
    """Advance one step using the taxpayer's own decision rule.

    The audit draw is injected rather than generated here, which keeps the
    step a pure function and makes exact replay possible.
    """
    return apply_step(params, state, decide_evade(state), audited)


def run_single(
    params: TaxpayerParams,
    horizon: int,
    audit_stream: Sequence[bool],
) -> list[StepOutcome]:
    """Run a full trajectory from the standard start (f=0, pf=pf0, n=0).

    Deterministic given the audit stream; the stream must cover the horizon.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    if len(audit_stream) < horizon:
        raise ValueError(
            f"audit stream has {len(audit_stream)} draws, horizon needs {horizon}"
        )
    state = initial_state(params)
    trajectory: list[StepOutcome] = []
    for t in range(horizon):
        outcome = step(params, state, bool(audit_stream[t]))
        trajectory.append(outcome)
        state = outcome.state_after
    return trajectory


def last_evasion_time(trajectory: Sequence[StepOutcome]) -> int | None:
    """Index of the last step at which the taxpayer evaded, or None."""
    for i in range(len(trajectory) - 1, -1, -1):
        if trajectory[i].evaded:
            return i
    return None


def first_compliance_time(
    params: TaxpayerParams,
    audit_stream: Sequence[bool],
    horizon_cap: int,
) -> int | None:
    """First t with pf(t) <= 0, or None if not reached within the cap.

    Allocation-free loop for Monte Carlo use; compliance is absorbing so the
    simulation stops as soon as pf drops to zero or below.
    """
    tau, k, lam = params.tau, params.k, params.lam
    f, pf, n = 0.0, params.pf0, 0
    for t in range(min(horizon_cap, len(audit_stream))):
        f, pf, n, _ = _advance(tau, k, lam, f, pf, n, pf > 0.0, bool(audit_stream[t]))
        if pf <= 0.0:
            return t + 1
    return None
