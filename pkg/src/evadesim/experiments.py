"""Experiment runners and their CSV renderings.

Every experiment is a pure function of (spec, seed): rerunning with the same
arguments yields identical output, byte for byte once rendered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .analytic import drift, drift_value, naive_network_compliance_time
from .graphs import Graph, star, torus
from .network import NetworkConfig, NetworkRun, neighborhood_avg_k, run_network
from .streams import StreamKey, bernoulli_stream, beta_2_3_sample
from .taxpayer import StepOutcome, TaxpayerParams, run_single

# Parameter sets pinned by the experiments they reproduce.
TABLE1_PARAMS = TaxpayerParams(tau=0.3, k=0.4, p=0.01, lam=1.5, pf0=1.0)
HETERO_TAU = 0.3
HETERO_P = 0.1
HETERO_LAM = 1.5
HETERO_PF0 = 1.0


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    sd: float
    count: int


def summarize(values: Sequence[float]) -> SummaryStats:
    """Arithmetic mean and sample sd (n-1 divisor; 0 for a single value)."""
    n = len(values)
    if n == 0:
        raise ValueError("cannot summarize an empty sequence")
    mean = sum(values) / n
    if n == 1:
        return SummaryStats(mean=mean, sd=0.0, count=1)
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return SummaryStats(mean=mean, sd=math.sqrt(var), count=n)


def _average_ranks(values: Sequence[float]) -> np.ndarray:
    order = np.argsort(np.asarray(values), kind="stable")
    ranks = np.empty(len(values), dtype=float)
    sorted_vals = np.asarray(values)[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Rank correlation with average ranks for ties."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("need two equally long sequences of length >= 2")
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float(rx @ rx) * float(ry @ ry))
    if denom == 0.0:
        return 0.0
    return float(rx @ ry) / denom


# ---------------------------------------------------------------------------
# Single-taxpayer trajectories


@dataclass
class SingleRun:
    params: TaxpayerParams
    outcomes: list[StepOutcome]
    drift: float  # slope of the reference line pf0 + drift*t

    @property
    def pf_series(self) -> list[float]:
        return [o.state_after.pf for o in self.outcomes]


def run_single_seeded(
    params: TaxpayerParams, horizon: int, seed: int, replicate: int = 0
) -> SingleRun:
    """One seeded trajectory plus its analytic overlay slope."""
    audits = bernoulli_stream(
        StreamKey(seed, replicate, 0, "audit"), params.p, horizon
    )
    outcomes = run_single(params, horizon, audits)
    return SingleRun(params=params, outcomes=outcomes, drift=drift(params).drift)


def exp_single_trajectories(
    params_list: Sequence[TaxpayerParams], horizon: int, seed: int
) -> list[SingleRun]:
    """Trajectories for a family of parameter sets, one replicate each."""
    return [
        run_single_seeded(p, horizon, seed, replicate=i)
        for i, p in enumerate(params_list)
    ]


# ---------------------------------------------------------------------------
# Drift curves


def exp_drift_curves(
    k: float, lam: float, tau_grid: Sequence[float]
) -> list[tuple[float, float, float]]:
    """(tau, drift, noncompliance) rows over the grid, sorted by tau.

    noncompliance is -1/drift, infinite where drift is non-negative.
    """
    rows = []
    for tau in sorted(tau_grid):
        if not 0.0 < tau < 1.0:
            raise ValueError(f"tau grid value out of (0, 1): {tau}")
        d = drift_value(tau, k, lam)
        rows.append((tau, d, float("inf") if d >= 0.0 else -1.0 / d))
    return rows


# ---------------------------------------------------------------------------
# Star-network compliance times


@dataclass
class Table1Result:
    node_stats: list[SummaryStats]
    values: list[list[int]]  # [replicate][node] last-evasion times
    grand: SummaryStats
    naive_estimate: float


def exp_table1(
    seed: int, replicates: int = 50, horizon_cap: int = 20000
) -> Table1Result:
    """Last-evasion times on the ten-node star, per node over replicates."""
    g = star(10)
    cfg = NetworkConfig(shared=TABLE1_PARAMS)
    values: list[list[int]] = []
    for r in range(replicates):
        run = run_network(cfg, g, horizon_cap, seed, replicate=r, record=False)
        if run.evader_counts[-1] != 0:
            raise RuntimeError(
                f"replicate {r} still has evaders at the {horizon_cap}-step cap"
            )
        row = []
        for x, t in enumerate(run.last_evasion):
            if t is None:
                raise RuntimeError(f"taxpayer {x} never evaded despite pf0 > 0")
            row.append(t)
        values.append(row)
    node_stats = [
        summarize([values[r][x] for r in range(replicates)]) for x in range(g.n)
    ]
    grand = summarize([t for row in values for t in row])
    naive = naive_network_compliance_time([TABLE1_PARAMS.pf0] * g.n, TABLE1_PARAMS)
    return Table1Result(
        node_stats=node_stats, values=values, grand=grand, naive_estimate=naive
    )


# ---------------------------------------------------------------------------
# Tax-rate sweeps


@dataclass(frozen=True)
class SweepSpec:
    tau_grid: tuple[float, ...]
    graph: Graph
    base: NetworkConfig
    horizon: int = 1000
    replicates: int = 1

    def __post_init__(self) -> None:
        if len(self.tau_grid) == 0:
            raise ValueError("tau grid is empty")
        for tau in self.tau_grid:
            if not 0.0 < tau < 1.0:
                raise ValueError(f"tau grid value out of (0, 1): {tau}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be at least 1, got {self.replicates}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be at least 1, got {self.horizon}")


def exp_tau_sweep(spec: SweepSpec, seed: int) -> list[tuple[float, float]]:
    """Average evader count per step for each tax rate, sorted by tau.

    The average runs over all iterations of the horizon (zeros after full
    compliance included) and then over replicates. Replicates share stream
    keys across grid points, so curves use common random numbers.
    """
    rows = []
    for tau in sorted(spec.tau_grid):
        cfg = replace(spec.base, shared=replace(spec.base.shared, tau=tau))
        total = 0.0
        for r in range(spec.replicates):
            run = run_network(
                cfg, spec.graph, spec.horizon, seed, replicate=r, record=False
            )
            total += run.mean_evaders()
        rows.append((tau, total / spec.replicates))
    return rows


def sweep_minimizer(rows: Sequence[tuple[float, float]]) -> float:
    """Grid tau with the smallest average evader count (first on ties)."""
    if not rows:
        raise ValueError("empty sweep")
    best = min(rows, key=lambda r: (r[1], r[0]))
    return best[0]


# ---------------------------------------------------------------------------
# Heterogeneous savings rates


@dataclass
class HeteroResult:
    width: int
    height: int
    horizon: int
    k_values: list[float]
    k_avg: list[float]
    evasions: list[int]
    grid: list[list[int]]  # [row][col] evasion counts
    run: NetworkRun


def exp_heterogeneous_k(
    seed: int,
    width: int = 10,
    height: int = 10,
    horizon: int = 10000,
    tau: float = HETERO_TAU,
    p: float = HETERO_P,
    lam: float = HETERO_LAM,
    pf0: float = HETERO_PF0,
) -> HeteroResult:
    """Toroidal grid with Beta(2, 3) savings rates, one seeded run.

    Emits each taxpayer's own k, the closed-neighborhood average k, and the
    lifetime evasion count, plus the counts as a row/col grid.
    """
    g = torus(width, height)
    ks = beta_2_3_sample(StreamKey(seed, 0, 0, "parameter"), g.n)
    shared = TaxpayerParams(tau=tau, k=0.4, p=p, lam=lam, pf0=pf0)  # k overridden below
    cfg = NetworkConfig(shared=shared, k_overrides=tuple(float(v) for v in ks))
    run = run_network(cfg, g, horizon, seed, replicate=0, record=False)
    k_avg = [neighborhood_avg_k(cfg, g, x) for x in range(g.n)]
    grid = [
        [run.evasion_counts[i * width + j] for j in range(width)] for i in range(height)
    ]
    return HeteroResult(
        width=width,
        height=height,
        horizon=horizon,
        k_values=[float(v) for v in ks],
        k_avg=k_avg,
        evasions=list(run.evasion_counts),
        grid=grid,
        run=run,
    )


# ---------------------------------------------------------------------------
# CSV rendering (headers are part of the wire format; floats use 6
# significant digits, flags are 0/1, newline is "\n")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".6g")


def render_csv(header: str, rows: Iterable[Sequence]) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def csv_single(outcomes: Sequence[StepOutcome]) -> str:
    return render_csv(
        "t,evaded,audited,repaid,f,pf,n",
        (
            (
                o.state_after.t - 1,
                o.evaded,
                o.audited,
                o.repaid,
                o.state_after.f,
                o.state_after.pf,
                o.state_after.n,
            )
            for o in outcomes
        ),
    )


def csv_network(trajectories: Sequence[Sequence[StepOutcome]]) -> str:
    def rows():
        horizon = len(trajectories[0]) if trajectories else 0
        for t in range(horizon):
            for x, traj in enumerate(trajectories):
                o = traj[t]
                yield (
                    t,
                    x,
                    o.evaded,
                    o.audited,
                    o.repaid,
                    o.state_after.f,
                    o.state_after.pf,
                    o.state_after.n,
                )

    return render_csv("t,node,evaded,audited,repaid,f,pf,n", rows())


def csv_sweep(rows: Sequence[tuple[float, float]]) -> str:
    return render_csv("tau,avg_evaders", rows)


def csv_table1(result: Table1Result) -> str:
    return render_csv(
        "node,mean,sd",
        ((x, s.mean, s.sd) for x, s in enumerate(result.node_stats)),
    )


def csv_hetero(result: HeteroResult) -> str:
    def rows():
        for node in range(result.width * result.height):
            yield (
                node,
                node // result.width,
                node % result.width,
                result.k_values[node],
                result.k_avg[node],
                result.evasions[node],
            )

    return render_csv("node,row,col,k,k_avg,evasions", rows())


def csv_drift_curve(rows: Sequence[tuple[float, float, float]]) -> str:
    return render_csv("tau,drift,noncompliance", rows)
