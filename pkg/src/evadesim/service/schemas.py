"""Request and response models for the HTTP service.

Wire conventions: the penalty multiplier travels as "lambda"; infinities
(never-complies quantities) travel as null alongside the
compliant_eventually flag, since JSON has no inf.
"""
from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..analytic import drift, expected_compliance_time, noncompliance_measure, optimal_tax_rate
from ..graphs import Graph, from_edge_list, star, torus
from ..taxpayer import TaxpayerParams


class ParamsIn(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    tau: float = Field(gt=0, lt=1)
    k: float = Field(default=0.4, gt=0, lt=1)
    p: float = Field(default=0.01, gt=0, lt=1)
    lam: float = Field(default=1.5, gt=1, alias="lambda")
    pf0: float = Field(default=5.0, gt=0)

    def to_params(self) -> TaxpayerParams:
        return TaxpayerParams(tau=self.tau, k=self.k, p=self.p, lam=self.lam, pf0=self.pf0)


class TopologyIn(BaseModel):
    kind: Literal["star", "torus", "edgelist"]
    n: int | None = None
    width: int | None = None
    height: int | None = None
    edges: list[tuple[int, int]] | None = None

    def to_graph(self) -> Graph:
        if self.kind == "star":
            if self.n is None:
                raise ValueError("star topology needs n")
            return star(self.n)
        if self.kind == "torus":
            if self.width is None or self.height is None:
                raise ValueError("torus topology needs width and height")
            return torus(self.width, self.height)
        if self.edges is None:
            raise ValueError("edgelist topology needs edges")
        n = self.n if self.n is not None else max(max(u, v) for u, v in self.edges) + 1
        return from_edge_list(n, self.edges)


class AnalyticSummary(BaseModel):
    drift: float
    regime: str
    compliant_eventually: bool
    noncompliance: float | None
    expected_compliance_time: float | None
    optimal_tau: float


def build_summary(params: TaxpayerParams) -> AnalyticSummary:
    rep = drift(params)
    nc = noncompliance_measure(params)
    et = expected_compliance_time(params)
    return AnalyticSummary(
        drift=rep.drift,
        regime=rep.regime,
        compliant_eventually=rep.compliant_eventually,
        noncompliance=None if math.isinf(nc) else nc,
        expected_compliance_time=None if math.isinf(et) else et,
        optimal_tau=optimal_tax_rate(params.k, params.lam),
    )


# --- requests ---------------------------------------------------------------


class AnalyticRequest(BaseModel):
    params: ParamsIn
    tau_grid: list[float] | None = None


class SingleRunRequest(BaseModel):
    params: ParamsIn
    horizon: int = Field(default=1000, ge=1)
    seed: int = Field(ge=0)
    replicate: int = Field(default=0, ge=0)


class NetworkRunRequest(BaseModel):
    params: ParamsIn
    topology: TopologyIn
    horizon: int = Field(default=1000, ge=1)
    seed: int = Field(ge=0)
    replicate: int = Field(default=0, ge=0)
    beta: float | None = Field(default=None, ge=0)
    hetero_k: bool = False
    k_overrides: list[float] | None = None
    pf0_overrides: list[float] | None = None


class SweepRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    tau_grid: list[float]
    topology: TopologyIn
    k: float = Field(default=0.4, gt=0, lt=1)
    p: float = Field(default=0.01, gt=0, lt=1)
    lam: float = Field(default=1.5, gt=1, alias="lambda")
    pf0: float = Field(default=5.0, gt=0)
    horizon: int = Field(default=1000, ge=1)
    replicates: int = Field(default=1, ge=1)
    beta: float | None = Field(default=None, ge=0)
    seed: int = Field(ge=0)


class Table1Request(BaseModel):
    seed: int = Field(ge=0)
    replicates: int = Field(default=50, ge=1)
    horizon_cap: int = Field(default=20000, ge=1)


class HeteroRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    seed: int = Field(ge=0)
    width: int = Field(default=10, ge=3)
    height: int = Field(default=10, ge=3)
    horizon: int = Field(default=10000, ge=1)
    tau: float = Field(default=0.3, gt=0, lt=1)
    p: float = Field(default=0.1, gt=0, lt=1)
    lam: float = Field(default=1.5, gt=1, alias="lambda")
    pf0: float = Field(default=1.0, gt=0)


# --- responses ---------------------------------------------------------------


class AnalyticResponse(BaseModel):
    summary: AnalyticSummary
    csv: str | None = None


class SingleRunResponse(BaseModel):
    csv: str
    summary: AnalyticSummary
    horizon: int
    seed: int


class NetworkRunResponse(BaseModel):
    csv: str
    summary: AnalyticSummary
    mean_evaders: float
    n: int


class SweepResponse(BaseModel):
    csv: str
    minimizer_tau: float
    optimal_tau: float
    summary: AnalyticSummary  # evaluated at the minimizing tax rate


class Table1Response(BaseModel):
    csv: str
    summary: AnalyticSummary
    grand_mean: float
    grand_sd: float
    naive_estimate: float


class HeteroResponse(BaseModel):
    csv: str
    summary: AnalyticSummary  # evaluated at the mean drawn savings rate
    permanent_evaders: int
    middle_band_fraction: float


class HealthResponse(BaseModel):
    status: str
    version: str
