"""Service handlers: pure functions from request models to response models.

Both the FastAPI routes and the in-process CLI client call these, so there
is exactly one implementation of each operation's wire behaviour.
"""

from __future__ import annotations

import math

from ..heuristic import initial_solution
from ..instance import Instance, ParameterError, generate_instance, instance_from_dict, instance_to_dict
from ..model import Variant, build, emit_lp
from ..oracle import solve_exhaustive
from ..plotting import schedule_svg
from ..schedule import (
    InfeasibilityReport,
    Schedule,
    StructureError,
    WaitMode,
    evaluate,
)
from ..solver import SolveLimits, solve_bnc
from .schemas import (
    CheckRequest,
    CheckResponse,
    CutLogRow,
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


class ValidationFailure(ValueError):
    """Request was well-formed but semantically invalid."""


def _instance(payload: InstancePayload) -> Instance:
    try:
        return instance_from_dict(payload.model_dump())
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None


def _schedule(payload: SchedulePayload) -> Schedule:
    return Schedule.make(payload.route, [tuple(s) for s in payload.sorties])


def _schedule_payload(sched: Schedule) -> SchedulePayload:
    return SchedulePayload(route=list(sched.route),
                           sorties=[list(s.as_tuple()) for s in sched.sorted_sorties()])


def _mode(text: str) -> WaitMode:
    try:
        return WaitMode.parse(text)
    except ValueError:
        raise ValidationFailure(f"unknown mode {text!r}") from None


def _variant(text: str) -> Variant:
    try:
        return Variant.parse(text)
    except ValueError:
        raise ValidationFailure(f"unknown variant {text!r}") from None


def generate(req: GenerateRequest) -> InstancePayload:
    try:
        inst = generate_instance(seed=req.seed, c=req.c, depot_pos=req.depot,
                                 endurance=req.endurance, drone_speed=req.speed,
                                 eligible_ratio=req.ratio,
                                 sigma_l=req.sigma_l, sigma_r=req.sigma_r)
    except ParameterError as exc:
        raise ValidationFailure(str(exc)) from None
    return InstancePayload(**instance_to_dict(inst))


def solve(req: SolveRequest) -> SolveResponse:
    inst = _instance(req.instance)
    mode = _mode(req.mode)
    variant = _variant(req.variant)
    warm = initial_solution(inst, mode) if req.warm_start else None
    report = solve_bnc(inst, variant, mode, warm_start=warm,
                       limits=SolveLimits(node_limit=req.node_limit,
                                          time_limit=req.time_limit),
                       backend=req.backend)

    def _num(v):
        return None if v is None or not math.isfinite(v) else v

    return SolveResponse(
        status=report.status,
        value=_num(report.value),
        schedule=None if report.incumbent is None else _schedule_payload(report.incumbent),
        lower_bound=_num(report.lower_bound),
        gap_pct=_num(report.gap_pct),
        root_gap_pct=_num(report.root_gap_pct),
        nodes=report.nodes,
        cuts_by_family=report.cuts_by_family,
        elapsed=report.elapsed,
        cut_log=[CutLogRow(node=e.node, round=e.round, family=e.family,
                           violation=e.violation, witness=list(e.witness))
                 for e in report.cut_log],
    )


def oracle(req: OracleRequest) -> OracleResponse:
    inst = _instance(req.instance)
    result = solve_exhaustive(inst, _mode(req.mode), node_limit=req.node_limit)
    return OracleResponse(value=result.value, schedule=_schedule_payload(result.best),
                          explored=result.explored, proven_optimal=result.proven_optimal)


def check(req: CheckRequest) -> CheckResponse:
    inst = _instance(req.instance)
    try:
        result = evaluate(inst, _schedule(req.schedule), _mode(req.mode))
    except StructureError as exc:
        return CheckResponse(feasible=False, error=str(exc))
    if isinstance(result, InfeasibilityReport):
        return CheckResponse(feasible=False, error=str(result))
    return CheckResponse(feasible=True, completion=result.completion,
                         waits={k: v for k, v in result.wait.items() if v > 0})


def heuristic_schedule(req: HeuristicRequest) -> SchedulePayload:
    inst = _instance(req.instance)
    return _schedule_payload(initial_solution(inst, _mode(req.mode)))


def lp_text(req: LpRequest) -> TextResponse:
    inst = _instance(req.instance)
    model = build(inst, _variant(req.variant), _mode(req.mode))
    return TextResponse(content=emit_lp(model))


def plot(req: PlotRequest) -> TextResponse:
    inst = _instance(req.instance)
    try:
        return TextResponse(content=schedule_svg(inst, _schedule(req.schedule)))
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None
