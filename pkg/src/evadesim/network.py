"""Networks of taxpayers.

Each taxpayer's state evolves exactly as in the single-taxpayer process; the
network only enters through the evasion decision, which looks at the summed
evasion profit over the closed neighborhood. Decisions within a step are
synchronous: everyone decides from the previous step's published profits
before anyone's income or audit is applied.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .graphs import Graph
from .streams import StreamKey, bernoulli_stream, uniform_stream
from .taxpayer import StepOutcome, TaxpayerParams, TaxpayerState, _advance, apply_step


@dataclass(frozen=True)
class NetworkConfig:
    """Shared parameters plus optional per-taxpayer overrides.

    beta=None selects the deterministic sign rule; beta >= 0 selects the
    probabilistic rule with that inverse temperature.
    """

    shared: TaxpayerParams
    k_overrides: tuple[float, ...] | None = None
    pf0_overrides: tuple[float, ...] | None = None
    beta: float | None = None

    def __post_init__(self) -> None:
        if self.beta is not None and self.beta < 0.0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if self.k_overrides is not None:
            for i, k in enumerate(self.k_overrides):
                if not 0.0 < k < 1.0:
                    raise ValueError(f"k override for taxpayer {i} out of (0, 1): {k}")
        if self.pf0_overrides is not None:
            for i, pf0 in enumerate(self.pf0_overrides):
                if not pf0 > 0.0:
                    raise ValueError(f"pf0 override for taxpayer {i} must be positive: {pf0}")

    def k_of(self, x: int) -> float:
        return self.shared.k if self.k_overrides is None else self.k_overrides[x]

    def pf0_of(self, x: int) -> float:
        return self.shared.pf0 if self.pf0_overrides is None else self.pf0_overrides[x]

    def params_for(self, x: int) -> TaxpayerParams:
        if self.k_overrides is None and self.pf0_overrides is None:
            return self.shared
        return replace(self.shared, k=self.k_of(x), pf0=self.pf0_of(x))

    def validate_for(self, g: Graph) -> None:
        for name, values in (("k_overrides", self.k_overrides),
                             ("pf0_overrides", self.pf0_overrides)):
            if values is not None and len(values) != g.n:
                raise ValueError(
                    f"{name} has {len(values)} entries for a {g.n}-node graph"
                )


@dataclass(frozen=True)
class NetworkState:
    """One state per taxpayer plus the global step counter."""

    states: tuple[TaxpayerState, ...]
    t: int = 0


def initial_network_state(cfg: NetworkConfig, g: Graph) -> NetworkState:
    cfg.validate_for(g)
    return NetworkState(
        states=tuple(
            TaxpayerState(f=0.0, pf=cfg.pf0_of(x), n=0, n_total=0, t=0)
            for x in range(g.n)
        ),
        t=0,
    )


def neighborhood_profit(state: NetworkState, g: Graph, x: int) -> float:
    """Summed evasion profit over the closed neighborhood of x."""
    total = 0.0
    for y in g.closed_neighborhoods[x]:
        total += state.states[y].pf
    return total


def decide_evade_network(state: NetworkState, g: Graph, x: int) -> bool:
    """Evade iff the neighborhood's summed profit is strictly positive."""
    return neighborhood_profit(state, g, x) > 0.0


def _evasion_probability(profit_sum: float, evasion_sum: int, beta: float) -> float:
    # Before anyone in the neighborhood has evaded the ratio is 0/0; fall
    # back to the sign rule, which the probabilistic rule recovers as
    # beta -> infinity.
    if evasion_sum == 0:
        return 1.0 if profit_sum > 0.0 else 0.0
    ratio = profit_sum / evasion_sum
    if ratio >= 0.0:
        return 1.0  # exp of a non-negative exponent clamps to 1
    return math.exp(beta * ratio)


def evasion_probability(
    state: NetworkState, g: Graph, x: int, beta: float
) -> float:
    """Probability of evasion under the temperature-like rule.

    Uses exp(beta * S/M) with S the neighborhood profit sum and M the
    neighborhood lifetime evasion count, clamped to 1 for positive S.
    """
    if beta < 0.0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    profit_sum = 0.0
    evasion_sum = 0
    for y in g.closed_neighborhoods[x]:
        profit_sum += state.states[y].pf
        evasion_sum += state.states[y].n_total
    return _evasion_probability(profit_sum, evasion_sum, beta)


def step_network(
    cfg: NetworkConfig,
    g: Graph,
    state: NetworkState,
    audit_draws: Sequence[bool],
    evasion_draws: Sequence[float] | None = None,
) -> tuple[NetworkState, list[StepOutcome]]:
    """Advance every taxpayer one step.

    All decisions are taken from the incoming state before any update is
    applied; audits are independent across taxpayers. evasion_draws (uniform
    variates) are only consulted under the probabilistic rule.
    """
    cfg.validate_for(g)
    if len(audit_draws) != g.n:
        raise ValueError(f"need {g.n} audit draws, got {len(audit_draws)}")
    if cfg.beta is not None:
        if evasion_draws is None or len(evasion_draws) != g.n:
            got = 0 if evasion_draws is None else len(evasion_draws)
            raise ValueError(f"need {g.n} evasion draws, got {got}")
        decisions = [
            bool(float(evasion_draws[x]) < evasion_probability(state, g, x, cfg.beta))
            for x in range(g.n)
        ]
    else:
        decisions = [decide_evade_network(state, g, x) for x in range(g.n)]

    outcomes = [
        apply_step(cfg.params_for(x), state.states[x], decisions[x], bool(audit_draws[x]))
        for x in range(g.n)
    ]
    new_state = NetworkState(
        states=tuple(o.state_after for o in outcomes), t=state.t + 1
    )
    return new_state, outcomes


@dataclass
class NetworkRun:
    """Result of a seeded network run.

    trajectories is per-taxpayer, per-step, and is None for aggregate-only
    runs. With the deterministic rule a step with zero evaders freezes all
    future decisions, so aggregate-only runs stop there (steps_run marks the
    point); evasion statistics are still exact for the full horizon, with
    evader counts implicitly zero past steps_run. final_state is the state at
    steps_run, not at the horizon, when the run stopped early.
    """

    horizon: int
    steps_run: int
    evader_counts: list[int]
    last_evasion: list[int | None]
    evasion_counts: list[int]
    final_state: NetworkState
    trajectories: list[list[StepOutcome]] | None

    def mean_evaders(self) -> float:
        return sum(self.evader_counts) / self.horizon


def run_network(
    cfg: NetworkConfig,
    g: Graph,
    horizon: int,
    seed: int,
    replicate: int = 0,
    record: bool = True,
) -> NetworkRun:
    """Run the network for `horizon` steps from the standard start.

    All randomness comes from per-taxpayer substreams of (seed, replicate),
    so reruns are identical and a one-node graph reproduces the
    single-taxpayer trajectory bit for bit.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    cfg.validate_for(g)
    n = g.n
    p = cfg.shared.p
    tau = cfg.shared.tau
    lam = cfg.shared.lam
    ks = [cfg.k_of(x) for x in range(n)]
    beta = cfg.beta

    audit_draws = [
        bernoulli_stream(StreamKey(seed, replicate, x, "audit"), p, horizon)
        for x in range(n)
    ]
    decision_draws = None
    if beta is not None:
        decision_draws = [
            uniform_stream(StreamKey(seed, replicate, x, "decision"), horizon)
            for x in range(n)
        ]

    nbhd = g.closed_neighborhoods
    f = [0.0] * n
    pf = [cfg.pf0_of(x) for x in range(n)]
    n_since = [0] * n
    n_total = [0] * n
    last_evasion: list[int | None] = [None] * n
    evader_counts: list[int] = []
    trajectories: list[list[StepOutcome]] | None = (
        [[] for _ in range(n)] if record else None
    )

    steps_run = 0
    for t in range(horizon):
        if beta is None:
            decisions = []
            for x in range(n):
                s = 0.0
                for y in nbhd[x]:
                    s += pf[y]
                decisions.append(s > 0.0)
        else:
            draws = decision_draws  # narrowed for the loop below
            decisions = []
            for x in range(n):
                s = 0.0
                m = 0
                for y in nbhd[x]:
                    s += pf[y]
                    m += n_total[y]
                decisions.append(bool(draws[x][t] < _evasion_probability(s, m, beta)))

        evaders = 0
        for x in range(n):
            evade = decisions[x]
            audited = bool(audit_draws[x][t])
            f[x], pf[x], n_since[x], repaid = _advance(
                tau, ks[x], lam, f[x], pf[x], n_since[x], evade, audited
            )
            if evade:
                evaders += 1
                n_total[x] += 1
                last_evasion[x] = t
            if trajectories is not None:
                trajectories[x].append(
                    StepOutcome(
                        evaded=evade,
                        audited=audited,
                        repaid=repaid,
                        state_after=TaxpayerState(
                            f=f[x], pf=pf[x], n=n_since[x],
                            n_total=n_total[x], t=t + 1,
                        ),
                    )
                )
        evader_counts.append(evaders)
        steps_run = t + 1
        # Zero evaders under the sign rule is absorbing: profits can only
        # stay or fall from here, so no decision ever flips back.
        if not record and beta is None and evaders == 0:
            break

    final_state = NetworkState(
        states=tuple(
            TaxpayerState(f=f[x], pf=pf[x], n=n_since[x], n_total=n_total[x], t=steps_run)
            for x in range(n)
        ),
        t=steps_run,
    )
    return NetworkRun(
        horizon=horizon,
        steps_run=steps_run,
        evader_counts=evader_counts,
        last_evasion=last_evasion,
        evasion_counts=list(n_total),
        final_state=final_state,
        trajectories=trajectories,
    )


def neighborhood_avg_k(
    cfg: NetworkConfig, g: Graph, x: int, mode: str = "mean"
) -> float:
    """Average savings rate over the closed neighborhood of x.

    mode="sum" skips the division, for sensitivity checks against the
    undivided variant.
    """
    if mode not in ("mean", "sum"):
        raise ValueError(f"mode must be 'mean' or 'sum', got {mode!r}")
    members = g.closed_neighborhoods[x]
    total = 0.0
    for y in members:
        total += cfg.k_of(y)
    return total if mode == "sum" else total / len(members)
