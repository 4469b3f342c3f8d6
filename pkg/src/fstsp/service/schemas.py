"""Pydantic request/response models for the solver service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class InstancePayload(BaseModel):
    version: int = 1
    c: int
    eligible: list[int]
    sigma_l: float
    sigma_r: float
    endurance: float
    truck_time: list[list[Optional[float]]]
    drone_time: list[list[Optional[float]]]
    coords: Optional[list[list[float]]] = None
    meta: dict = Field(default_factory=dict)


class SchedulePayload(BaseModel):
    route: list[int]
    sorties: list[list[int]] = Field(default_factory=list)


class GenerateRequest(BaseModel):
    seed: int = 0
    c: int = Field(ge=1)
    depot: str = "a"
    endurance: float = 20.0
    speed: float = 25.0
    ratio: float = 0.8
    sigma_l: float = 1.0
    sigma_r: float = 1.0


class SolveRequest(BaseModel):
    instance: InstancePayload
    variant: str = "dmn2"
    mode: str = "wait"
    time_limit: Optional[float] = None
    node_limit: Optional[int] = None
    warm_start: bool = True
    backend: str = "highs"


class CutLogRow(BaseModel):
    node: int
    round: int
    family: str
    violation: float
    witness: list[int]


class SolveResponse(BaseModel):
    status: str
    value: Optional[float]
    schedule: Optional[SchedulePayload]
    lower_bound: Optional[float]
    gap_pct: Optional[float]
    root_gap_pct: Optional[float]
    nodes: int
    cuts_by_family: dict[str, int]
    elapsed: float
    cut_log: list[CutLogRow] = Field(default_factory=list)


class OracleRequest(BaseModel):
    instance: InstancePayload
    mode: str = "wait"
    node_limit: int = 50_000_000


class OracleResponse(BaseModel):
    value: float
    schedule: SchedulePayload
    explored: int
    proven_optimal: bool


class CheckRequest(BaseModel):
    instance: InstancePayload
    schedule: SchedulePayload
    mode: str = "wait"


class CheckResponse(BaseModel):
    feasible: bool
    completion: Optional[float] = None
    error: Optional[str] = None
    waits: Optional[dict[int, float]] = None


class HeuristicRequest(BaseModel):
    instance: InstancePayload
    mode: str = "wait"


class LpRequest(BaseModel):
    instance: InstancePayload
    variant: str = "dmn2"
    mode: str = "wait"


class TextResponse(BaseModel):
    content: str


class PlotRequest(BaseModel):
    instance: InstancePayload
    schedule: SchedulePayload
