"""FastAPI service exposing the analytic formulas and experiment runners.

Every endpoint is a pure function of its request body: the same payload
always returns the same bytes, the CSV fields included.
"""
from __future__ import annotations

from dataclasses import replace

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..experiments import (
    TABLE1_PARAMS,
    SweepSpec,
    csv_drift_curve,
    csv_hetero,
    csv_network,
    csv_single,
    csv_sweep,
    csv_table1,
    exp_drift_curves,
    exp_heterogeneous_k,
    exp_table1,
    exp_tau_sweep,
    run_single_seeded,
    sweep_minimizer,
)
from ..network import NetworkConfig, run_network
from ..streams import StreamKey, beta_2_3_sample
from ..taxpayer import TaxpayerParams
from .schemas import (
    AnalyticRequest,
    AnalyticResponse,
    HealthResponse,
    HeteroRequest,
    HeteroResponse,
    NetworkRunRequest,
    NetworkRunResponse,
    SingleRunRequest,
    SingleRunResponse,
    SweepRequest,
    SweepResponse,
    Table1Request,
    Table1Response,
    build_summary,
)


def create_app() -> FastAPI:
    app = FastAPI(title="evadesim", version=__version__)

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(RuntimeError)
    async def runtime_error_handler(request: Request, exc: RuntimeError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/healthz", response_model=HealthResponse)
    async def healthz():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/analytic", response_model=AnalyticResponse)
    async def analytic(req: AnalyticRequest):
        params = req.params.to_params()
        csv = None
        if req.tau_grid:
            rows = exp_drift_curves(params.k, params.lam, req.tau_grid)
            csv = csv_drift_curve(rows)
        return AnalyticResponse(summary=build_summary(params), csv=csv)

    @app.post("/run/single", response_model=SingleRunResponse)
    async def run_single_endpoint(req: SingleRunRequest):
        params = req.params.to_params()
        run = run_single_seeded(params, req.horizon, req.seed, req.replicate)
        return SingleRunResponse(
            csv=csv_single(run.outcomes),
            summary=build_summary(params),
            horizon=req.horizon,
            seed=req.seed,
        )

    @app.post("/run/network", response_model=NetworkRunResponse)
    async def run_network_endpoint(req: NetworkRunRequest):
        params = req.params.to_params()
        g = req.topology.to_graph()
        k_overrides = req.k_overrides
        if req.hetero_k:
            if k_overrides is not None:
                raise ValueError("hetero_k and k_overrides are mutually exclusive")
            draws = beta_2_3_sample(
                StreamKey(req.seed, req.replicate, 0, "parameter"), g.n
            )
            k_overrides = [float(v) for v in draws]
        cfg = NetworkConfig(
            shared=params,
            k_overrides=tuple(k_overrides) if k_overrides is not None else None,
            pf0_overrides=tuple(req.pf0_overrides) if req.pf0_overrides is not None else None,
            beta=req.beta,
        )
        run = run_network(cfg, g, req.horizon, req.seed, req.replicate, record=True)
        summary_params = params
        if k_overrides is not None:
            summary_params = replace(params, k=sum(k_overrides) / len(k_overrides))
        return NetworkRunResponse(
            csv=csv_network(run.trajectories),
            summary=build_summary(summary_params),
            mean_evaders=run.mean_evaders(),
            n=g.n,
        )

    @app.post("/run/sweep", response_model=SweepResponse)
    async def run_sweep_endpoint(req: SweepRequest):
        g = req.topology.to_graph()
        base_params = TaxpayerParams(
            tau=req.tau_grid[0] if req.tau_grid else 0.5,
            k=req.k, p=req.p, lam=req.lam, pf0=req.pf0,
        )
        spec = SweepSpec(
            tau_grid=tuple(req.tau_grid),
            graph=g,
            base=NetworkConfig(shared=base_params, beta=req.beta),
            horizon=req.horizon,
            replicates=req.replicates,
        )
        rows = exp_tau_sweep(spec, req.seed)
        minimizer = sweep_minimizer(rows)
        return SweepResponse(
            csv=csv_sweep(rows),
            minimizer_tau=minimizer,
            optimal_tau=req.k / req.lam,
            summary=build_summary(replace(base_params, tau=minimizer)),
        )

    @app.post("/run/table1", response_model=Table1Response)
    async def run_table1_endpoint(req: Table1Request):
        result = exp_table1(req.seed, req.replicates, req.horizon_cap)
        return Table1Response(
            csv=csv_table1(result),
            summary=build_summary(TABLE1_PARAMS),
            grand_mean=result.grand.mean,
            grand_sd=result.grand.sd,
            naive_estimate=result.naive_estimate,
        )

    @app.post("/run/hetero", response_model=HeteroResponse)
    async def run_hetero_endpoint(req: HeteroRequest):
        result = exp_heterogeneous_k(
            req.seed,
            width=req.width,
            height=req.height,
            horizon=req.horizon,
            tau=req.tau,
            p=req.p,
            lam=req.lam,
            pf0=req.pf0,
        )
        mean_k = sum(result.k_values) / len(result.k_values)
        summary_params = TaxpayerParams(
            tau=req.tau, k=mean_k, p=req.p, lam=req.lam, pf0=req.pf0
        )
        permanent = sum(1 for e in result.evasions if e == req.horizon)
        middle = sum(
            1 for e in result.evasions if 0.2 * req.horizon <= e <= 0.8 * req.horizon
        )
        return HeteroResponse(
            csv=csv_hetero(result),
            summary=build_summary(summary_params),
            permanent_evaders=permanent,
            middle_band_fraction=middle / len(result.evasions),
        )

    return app


app = create_app()
