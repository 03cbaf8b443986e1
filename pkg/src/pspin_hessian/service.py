"""HTTP front end for the harness.

Every experiment is reachable through ``POST /run`` with a RunConfig body;
the cheap analytic queries also have direct endpoints that return their
results without touching the filesystem.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from . import __version__
from .analytic import predict as predict_ground_state
from .errors import ConfigInvalid, PSpinError
from .harness import (DEFAULT_TOLERANCES, EXPERIMENTS, RunConfig, RunReport,
                      complexity_rows, load_spec, run)
from .mixture import derive_moments, e_inf_thresholds

app = FastAPI(title="pspin-hessian", version=__version__)


class SpecRequest(BaseModel):
    spec: Any = Field(..., examples=["3:0.5,4:0.5", {"gamma3": 0.5, "gamma4": 0.5}])


class CurveRequest(SpecRequest):
    grid: dict = Field(default_factory=dict)


class PredictionResponse(BaseModel):
    spec: dict
    klass: str
    is_pure: bool
    e0: float
    center: float
    radius: float
    lambda_min: float
    e_inf_pure: Optional[float]
    e_inf_prime: float
    e_inf_mixed: float
    z: Optional[float]
    y0: Optional[float]
    residuals: dict[str, float]


class ClassifyResponse(BaseModel):
    spec: dict
    xi1: float
    xip: float
    xipp: float
    g_value: float
    klass: str
    is_pure: bool
    e_inf_pure: Optional[float]
    e_inf_prime: float
    e_inf_mixed: float


class CurveResponse(BaseModel):
    header: list[str]
    rows: list[list[float]]


def _spec_or_400(value):
    try:
        return load_spec(value)
    except (PSpinError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/experiments")
def experiments():
    return {"experiments": sorted(EXPERIMENTS), "tolerances": DEFAULT_TOLERANCES}


@app.post("/predict", response_model=PredictionResponse)
def predict(req: SpecRequest):
    spec = _spec_or_400(req.spec)
    try:
        pred = predict_ground_state(spec)
    except PSpinError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return PredictionResponse(spec=spec.to_json(),
                              **{k: v for k, v in pred.to_dict().items()
                                 if k in PredictionResponse.model_fields and k != "spec"})


@app.post("/classify", response_model=ClassifyResponse)
def classify(req: SpecRequest):
    spec = _spec_or_400(req.spec)
    m = derive_moments(spec)
    pure, prime, mixed = e_inf_thresholds(spec)
    return ClassifyResponse(spec=spec.to_json(), xi1=m.xi1, xip=m.xip, xipp=m.xipp,
                            g_value=m.g_value, klass=m.klass.value, is_pure=m.is_pure,
                            e_inf_pure=pure, e_inf_prime=prime, e_inf_mixed=mixed)


@app.post("/complexity-curve", response_model=CurveResponse)
def complexity_curve(req: CurveRequest):
    spec = _spec_or_400(req.spec)
    try:
        header, rows = complexity_rows(spec, req.grid)
    except PSpinError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return CurveResponse(header=header, rows=[[float(v) for v in r] for r in rows])


@app.post("/run", response_model=RunReport)
def run_experiment(config: RunConfig):
    # plain def: FastAPI runs it in a worker thread, so long simulations do
    # not block /health
    try:
        report = run(config)
    except ConfigInvalid as exc:
        raise HTTPException(status_code=422, detail=exc.errors)
    except PSpinError as exc:
        raise HTTPException(status_code=400, detail=f"{type(exc).__name__}: {exc}")
    # serialize through the model so infinite window ends survive as strings
    return Response(content=report.model_dump_json(), media_type="application/json")
