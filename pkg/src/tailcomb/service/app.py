"""FastAPI service exposing the analytic (request/response) operations.

The long-running Monte Carlo harness stays CLI-side; this service covers
the cheap closed-form surface: combining p-values, calibration ratios and
classification, tail-dependence coefficients, and bounded falsifier runs.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..combiners import cct, fct, pct, power_mean_test, tippett_test, combined_pvalue
from ..angular import asymptotic_ratio, classify
from ..errors import ConfigurationError, TailcombError
from ..experiments import run_falsifier
from .models import (
    CombineRequest,
    CombineResponse,
    FalsifyRequest,
    FalsifyResponse,
    HealthResponse,
    LambdaRequest,
    LambdaResponse,
    RatioRequest,
    RatioResponse,
)
from ..angular import t_copula_lambda

import numpy as np

app = FastAPI(title="tailcomb", version=__version__)

# Bounded falsifier budget: endpoints stay request/response-sized.
MAX_SERVICE_BUDGET = 50_000


def _test_spec(req: CombineRequest, d: int):
    name = req.test.lower()
    weights = req.weights if req.weights is not None else [1.0 / d] * d
    if name == "pct":
        return pct(weights)
    if name == "cct":
        return cct(weights)
    if name == "tippett":
        return tippett_test()
    if name == "powermean":
        if req.gamma is None:
            raise ConfigurationError("powermean requires gamma")
        return power_mean_test(req.gamma, weights)
    if name == "fct":
        if req.blocks is None:
            raise ConfigurationError("fct requires blocks")
        blocks0 = [[i - 1 for i in block] for block in req.blocks]
        block_weights = (
            req.weights if req.weights is not None else [1.0 / len(blocks0)] * len(blocks0)
        )
        return fct(blocks0, block_weights, d)
    raise ConfigurationError(f"unknown test {req.test!r}")


@app.exception_handler(TailcombError)
async def _tailcomb_error(_, exc: TailcombError):
    # safety net for paths not wrapped by an endpoint's own handler
    code = 422 if isinstance(exc, ConfigurationError) else 400
    return JSONResponse(status_code=code, content={"detail": str(exc)})


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/combine", response_model=CombineResponse)
def combine(req: CombineRequest) -> CombineResponse:
    if not req.pvalues:
        raise HTTPException(status_code=422, detail="pvalues must be nonempty")
    try:
        rows = np.asarray(req.pvalues, dtype=float)
        test = _test_spec(req, rows.shape[-1])
        combined = combined_pvalue(test, rows)
    except TailcombError as exc:
        code = 422 if isinstance(exc, ConfigurationError) else 400
        raise HTTPException(status_code=code, detail=str(exc)) from None
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return CombineResponse(combined=np.atleast_1d(combined).tolist())


@app.post("/ratio", response_model=RatioResponse)
def ratio(req: RatioRequest) -> RatioResponse:
    try:
        measure = req.measure.to_measure()
        combiner = req.combiner.to_spec()
        value = asymptotic_ratio(combiner, measure)
        bucket = classify(combiner, measure, tol=req.tol)
    except TailcombError as exc:
        code = 422 if isinstance(exc, ConfigurationError) else 400
        raise HTTPException(status_code=code, detail=str(exc)) from None
    return RatioResponse(ratio=value, classification=bucket.value)


@app.post("/lambda", response_model=LambdaResponse, response_model_by_alias=True)
def tail_lambda(req: LambdaRequest) -> LambdaResponse:
    try:
        value = t_copula_lambda(req.nu, req.rho)
    except TailcombError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return LambdaResponse(lambda_=value)


@app.post("/falsify", response_model=FalsifyResponse)
def falsify(req: FalsifyRequest) -> FalsifyResponse:
    if req.budget > MAX_SERVICE_BUDGET:
        raise HTTPException(
            status_code=422,
            detail=f"budget exceeds service cap {MAX_SERVICE_BUDGET}; use the CLI",
        )
    try:
        report = run_falsifier(
            req.combiner.to_spec(),
            d=req.d,
            beta=req.beta,
            n_atoms=req.n_atoms,
            budget=req.budget,
            seed=req.seed,
        )
    except TailcombError as exc:
        code = 422 if isinstance(exc, ConfigurationError) else 400
        raise HTTPException(status_code=code, detail=str(exc)) from None
    return FalsifyResponse(**report.to_json())
