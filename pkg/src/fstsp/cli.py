"""Command-line front end.

Every command builds the same request models the HTTP service accepts and
dispatches them either in-process (default) or to a running service via
``--server``; the CLI itself only parses flags and moves bytes.  ``bench``
is the local reporting harness and always runs in-process.

Exit codes: 0 ok, 2 usage, 3 I/O error, 4 validation/infeasibility.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from pydantic import BaseModel, ValidationError

from . import bench as bench_mod
from .service import api
from .service.schemas import (
    CheckRequest,
    GenerateRequest,
    HeuristicRequest,
    InstancePayload,
    LpRequest,
    OracleRequest,
    PlotRequest,
    SchedulePayload,
    SolveRequest,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VALIDATION = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {out}: {exc}") from None


def _load_instance(path: str) -> InstancePayload:
    try:
        return InstancePayload.model_validate_json(_read_file(path))
    except ValidationError as exc:
        raise CliError(EXIT_VALIDATION, f"bad instance file {path}: {exc}") from None


def _load_schedule(path: str) -> SchedulePayload:
    try:
        return SchedulePayload.model_validate_json(_read_file(path))
    except ValidationError as exc:
        raise CliError(EXIT_VALIDATION, f"bad schedule file {path}: {exc}") from None


def _dispatch(server: Optional[str], endpoint: str, handler, request: BaseModel,
              response_cls):
    """In-process call, or POST to a running service when --server is set."""
    if server is None:
        try:
            return handler(request)
        except api.ValidationFailure as exc:
            raise CliError(EXIT_VALIDATION, str(exc)) from None
    import httpx

    try:
        resp = httpx.post(server.rstrip("/") + endpoint,
                          json=json.loads(request.model_dump_json()), timeout=None)
    except httpx.HTTPError as exc:
        raise CliError(EXIT_IO, f"cannot reach {server}: {exc}") from None
    if resp.status_code == 422:
        raise CliError(EXIT_VALIDATION, resp.text)
    if resp.status_code != 200:
        raise CliError(EXIT_IO, f"server error {resp.status_code}: {resp.text}")
    return response_cls.model_validate(resp.json())


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--server", help="base URL of a running service; default runs in-process")
    p.add_argument("--out", help="output path ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fstsp",
                                     description="truck-and-drone routing solver toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a random benchmark instance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--c", type=int, required=True)
    g.add_argument("--depot", choices=["a", "b", "c", "d"], default="a")
    g.add_argument("--endurance", type=float, default=20.0)
    g.add_argument("--speed", type=float, default=25.0)
    g.add_argument("--ratio", type=float, default=0.8)
    g.add_argument("--sigma-l", type=float, default=1.0)
    g.add_argument("--sigma-r", type=float, default=1.0)
    g.add_argument("--format", choices=["json"], default="json")
    _add_common(g)

    s = sub.add_parser("solve", help="branch-and-cut solve")
    s.add_argument("--instance", required=True)
    s.add_argument("--variant", choices=["mcbar", "dmn", "dmn2"], default="dmn2")
    s.add_argument("--mode", choices=["wait", "nowait"], default="wait")
    s.add_argument("--time-limit", type=float)
    s.add_argument("--node-limit", type=int)
    s.add_argument("--backend", choices=["highs", "simplex"], default="highs")
    s.add_argument("--no-warm-start", action="store_true")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.add_argument("--schedule-out", help="also write the incumbent schedule JSON here")
    s.add_argument("--cut-log", help="write the emitted-cut CSV log here")
    _add_common(s)

    o = sub.add_parser("oracle", help="exact enumeration (small instances)")
    o.add_argument("--instance", required=True)
    o.add_argument("--mode", choices=["wait", "nowait"], default="wait")
    o.add_argument("--node-limit", type=int, default=50_000_000)
    _add_common(o)

    c = sub.add_parser("check", help="validate a schedule against an instance")
    c.add_argument("--instance", required=True)
    c.add_argument("--schedule", required=True)
    c.add_argument("--mode", choices=["wait", "nowait"], default="wait")
    _add_common(c)

    h = sub.add_parser("heuristic", help="warm-start schedule")
    h.add_argument("--instance", required=True)
    h.add_argument("--mode", choices=["wait", "nowait"], default="wait")
    _add_common(h)

    e = sub.add_parser("emit-lp", help="write the LP file of a model")
    e.add_argument("--instance", required=True)
    e.add_argument("--variant", choices=["mcbar", "dmn", "dmn2"], default="dmn2")
    e.add_argument("--mode", choices=["wait", "nowait"], default="wait")
    e.add_argument("--format", choices=["lp"], default="lp")
    _add_common(e)

    p = sub.add_parser("plot", help="SVG figure of a schedule")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--format", choices=["svg"], default="svg")
    _add_common(p)

    b = sub.add_parser("bench", help="seeded benchmark grid with report tables")
    b.add_argument("--grid", choices=sorted(bench_mod.GRIDS), default="small")
    b.add_argument("--variants", default="dmn2",
                   help="comma list from mcbar,dmn,dmn2")
    b.add_argument("--modes", default="wait,nowait")
    b.add_argument("--time-limit", type=float)
    b.add_argument("--node-limit", type=int)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--backend", choices=["highs", "simplex"], default="highs")
    b.add_argument("--format", choices=["csv"], default="csv")
    b.add_argument("--out", required=True, help="output directory for the CSV tables")

    v = sub.add_parser("serve", help="run the HTTP service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_generate(args) -> int:
    req = GenerateRequest(seed=args.seed, c=args.c, depot=args.depot,
                          endurance=args.endurance, speed=args.speed, ratio=args.ratio,
                          sigma_l=args.sigma_l, sigma_r=args.sigma_r)
    payload = _dispatch(args.server, "/generate", api.generate, req, InstancePayload)
    _write_output(json.dumps(payload.model_dump(), indent=1, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _cmd_solve(args) -> int:
    req = SolveRequest(instance=_load_instance(args.instance), variant=args.variant,
                       mode=args.mode, time_limit=args.time_limit,
                       node_limit=args.node_limit, warm_start=not args.no_warm_start,
                       backend=args.backend)
    from .service.schemas import SolveResponse

    resp = _dispatch(args.server, "/solve", api.solve, req, SolveResponse)
    if args.format == "csv":
        fields = ["status", "value", "lower_bound", "gap_pct", "root_gap_pct",
                  "nodes", "elapsed"]
        text = ",".join(fields) + "\n" + ",".join(
            "" if getattr(resp, f) is None else f"{getattr(resp, f)}" for f in fields) + "\n"
        _write_output(text, args.out)
    else:
        data = resp.model_dump()
        data.pop("cut_log", None)
        _write_output(json.dumps(data, indent=1) + "\n", args.out)
    if args.schedule_out and resp.schedule is not None:
        _write_output(json.dumps(resp.schedule.model_dump(), indent=1) + "\n",
                      args.schedule_out)
    if args.cut_log:
        lines = ["node,round,family,violation,witness"]
        lines += [f"{e.node},{e.round},{e.family},{e.violation:.6f}," +
                  "|".join(map(str, e.witness)) for e in resp.cut_log]
        _write_output("\n".join(lines) + "\n", args.cut_log)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    from .service.schemas import OracleResponse

    req = OracleRequest(instance=_load_instance(args.instance), mode=args.mode,
                        node_limit=args.node_limit)
    resp = _dispatch(args.server, "/oracle", api.oracle, req, OracleResponse)
    _write_output(json.dumps(resp.model_dump(), indent=1) + "\n", args.out)
    return EXIT_OK


def _cmd_check(args) -> int:
    from .service.schemas import CheckResponse

    req = CheckRequest(instance=_load_instance(args.instance),
                       schedule=_load_schedule(args.schedule), mode=args.mode)
    resp = _dispatch(args.server, "/check", api.check, req, CheckResponse)
    _write_output(json.dumps(resp.model_dump(), indent=1) + "\n", args.out)
    return EXIT_OK if resp.feasible else EXIT_VALIDATION


def _cmd_heuristic(args) -> int:
    req = HeuristicRequest(instance=_load_instance(args.instance), mode=args.mode)
    resp = _dispatch(args.server, "/heuristic", api.heuristic_schedule, req, SchedulePayload)
    _write_output(json.dumps(resp.model_dump(), indent=1) + "\n", args.out)
    return EXIT_OK


def _cmd_emit_lp(args) -> int:
    from .service.schemas import TextResponse

    req = LpRequest(instance=_load_instance(args.instance), variant=args.variant,
                    mode=args.mode)
    resp = _dispatch(args.server, "/lp", api.lp_text, req, TextResponse)
    _write_output(resp.content, args.out)
    return EXIT_OK


def _cmd_plot(args) -> int:
    from .service.schemas import TextResponse

    req = PlotRequest(instance=_load_instance(args.instance),
                      schedule=_load_schedule(args.schedule))
    resp = _dispatch(args.server, "/plot", api.plot, req, TextResponse)
    _write_output(resp.content, args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    base = bench_mod.GRIDS[args.grid]
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    for v in variants:
        if v not in ("mcbar", "dmn", "dmn2"):
            raise CliError(EXIT_USAGE, f"unknown variant {v!r}")
    for m in modes:
        if m not in ("wait", "nowait"):
            raise CliError(EXIT_USAGE, f"unknown mode {m!r}")
    grid = bench_mod.BenchGrid(base.name, base.cs, base.seeds, base.depots,
                               base.endurances, base.speeds, base.ratio,
                               variants, modes)
    rows = bench_mod.run_bench(grid, time_limit=args.time_limit,
                               node_limit=args.node_limit, workers=args.workers,
                               backend=args.backend)
    try:
        os.makedirs(args.out, exist_ok=True)
        outputs = {
            "results.csv": bench_mod.rows_to_csv(rows),
            "by_speed.csv": bench_mod.table_by_speed(rows),
            "by_depot.csv": bench_mod.table_by_depot(rows),
            "wait_vs_nowait.csv": bench_mod.table_wait_vs_nowait(rows),
        }
        for name, text in outputs.items():
            with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
                fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write results: {exc}") from None
    sys.stdout.write(f"wrote {len(rows)} rows to {args.out}\n")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "oracle": _cmd_oracle,
    "check": _cmd_check,
    "heuristic": _cmd_heuristic,
    "emit-lp": _cmd_emit_lp,
    "plot": _cmd_plot,
    "bench": _cmd_bench,
    "serve": _cmd_serve,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
