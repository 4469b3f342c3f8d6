"""FastAPI wiring for the solver service."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import api
from .schemas import (
    CheckRequest,
    CheckResponse,
    GenerateRequest,
    HeuristicRequest,
    InstancePayload,
    LpRequest,
    OracleRequest,
    OracleResponse,
    PlotRequest,
    SchedulePayload,
    SolveRequest,
    SolveResponse,
    TextResponse,
)

app = FastAPI(title="flying-sidekick solver service", version="0.1.0")


def _run(fn, req):
    try:
        return fn(req)
    except api.ValidationFailure as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/generate", response_model=InstancePayload)
def generate(req: GenerateRequest) -> InstancePayload:
    return _run(api.generate, req)


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    return _run(api.solve, req)


@app.post("/oracle", response_model=OracleResponse)
def oracle(req: OracleRequest) -> OracleResponse:
    return _run(api.oracle, req)


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    return _run(api.check, req)


@app.post("/heuristic", response_model=SchedulePayload)
def heuristic(req: HeuristicRequest) -> SchedulePayload:
    return _run(api.heuristic_schedule, req)


@app.post("/lp", response_model=TextResponse)
def lp(req: LpRequest) -> TextResponse:
    return _run(api.lp_text, req)


@app.post("/plot", response_model=TextResponse)
def plot(req: PlotRequest) -> TextResponse:
    return _run(api.plot, req)
