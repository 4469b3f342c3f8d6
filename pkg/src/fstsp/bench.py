"""Benchmark harness: seeded instance grids, per-run rows and the aggregate
tables (bound quality by speed class and depot position, wait vs no-wait
comparison).

Rows are deterministic for a fixed grid except the ``elapsed`` column; the
aggregates averaging a time also carry that caveat.  ``gap_pct`` aggregates
average only the runs that did not finish optimal, matching how the solver
tables are usually read.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .heuristic import initial_solution
from .instance import generate_instance
from .model import Variant
from .schedule import WaitMode
from .solver import SolveLimits, solve_bnc

RESULT_FIELDS = [
    "instance", "c", "seed", "depot", "endurance", "speed", "ratio",
    "variant", "mode", "status", "value", "lower_bound", "gap_pct",
    "root_gap_pct", "nodes", "cuts", "elapsed",
]


@dataclass(frozen=True)
class BenchCell:
    c: int
    seed: int
    depot: str
    endurance: float
    speed: float
    ratio: float
    variant: str
    mode: str

    @property
    def instance_id(self) -> str:
        return (f"c{self.c}-s{self.seed}-{self.depot}"
                f"-E{self.endurance:g}-v{self.speed:g}-r{self.ratio:g}")


@dataclass
class BenchGrid:
    name: str
    cs: Sequence[int]
    seeds: Sequence[int]
    depots: Sequence[str]
    endurances: Sequence[float]
    speeds: Sequence[float]
    ratio: float = 0.8
    variants: Sequence[str] = ("dmn2",)
    modes: Sequence[str] = ("wait", "nowait")

    def cells(self) -> list[BenchCell]:
        out = []
        for c in self.cs:
            for e in self.endurances:
                for sp in self.speeds:
                    for dep in self.depots:
                        for seed in self.seeds:
                            for variant in self.variants:
                                for mode in self.modes:
                                    out.append(BenchCell(c, seed, dep, e, sp,
                                                         self.ratio, variant, mode))
        return out


GRIDS = {
    # desk-scale default: every table dimension, sized to finish in minutes
    "default": BenchGrid("default", cs=(5, 6, 7), seeds=(0, 1, 2),
                         depots=("a", "b", "c", "d"), endurances=(20.0, 40.0),
                         speeds=(15.0, 25.0, 35.0)),
    "small": BenchGrid("small", cs=(5,), seeds=(0, 1, 2),
                       depots=("a", "b", "c", "d"), endurances=(20.0,),
                       speeds=(15.0, 25.0, 35.0)),
    "smoke": BenchGrid("smoke", cs=(4,), seeds=(0, 1),
                       depots=("a",), endurances=(20.0,), speeds=(25.0,)),
}


def run_cell(cell: BenchCell, time_limit: Optional[float] = None,
             node_limit: Optional[int] = None, backend: str = "highs") -> dict:
    inst = generate_instance(seed=cell.seed, c=cell.c, depot_pos=cell.depot,
                             endurance=cell.endurance, drone_speed=cell.speed,
                             eligible_ratio=cell.ratio)
    mode = WaitMode.parse(cell.mode)
    warm = initial_solution(inst, mode)
    report = solve_bnc(inst, Variant.parse(cell.variant), mode, warm_start=warm,
                       limits=SolveLimits(node_limit=node_limit, time_limit=time_limit),
                       backend=backend)
    return {
        "instance": cell.instance_id,
        "c": cell.c,
        "seed": cell.seed,
        "depot": cell.depot,
        "endurance": f"{cell.endurance:g}",
        "speed": f"{cell.speed:g}",
        "ratio": f"{cell.ratio:g}",
        "variant": cell.variant,
        "mode": cell.mode,
        "status": report.status,
        "value": f"{report.value:.6f}",
        "lower_bound": f"{report.lower_bound:.6f}",
        "gap_pct": f"{report.gap_pct:.6f}",
        "root_gap_pct": "" if report.root_gap_pct is None else f"{report.root_gap_pct:.6f}",
        "nodes": report.nodes,
        "cuts": sum(report.cuts_by_family.values()),
        "elapsed": f"{report.elapsed:.3f}",
    }


def _cell_worker(args) -> dict:
    cell, time_limit, node_limit, backend = args
    return run_cell(cell, time_limit, node_limit, backend)


def run_bench(grid: BenchGrid, time_limit: Optional[float] = None,
              node_limit: Optional[int] = None, workers: int = 1,
              backend: str = "highs") -> list[dict]:
    cells = grid.cells()
    args = [(cell, time_limit, node_limit, backend) for cell in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_cell_worker, args))
    else:
        rows = [_cell_worker(a) for a in args]
    return rows


def rows_to_csv(rows: list[dict], fields: Optional[list[str]] = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields or RESULT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def strip_time_columns(csv_text: str) -> str:
    """Rows minus the wall-clock column, for byte-identical comparisons."""
    reader = csv.reader(io.StringIO(csv_text))
    table = list(reader)
    head = table[0]
    keep = [i for i, name in enumerate(head) if name not in ("elapsed", "time_avg")]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in table:
        writer.writerow([row[i] for i in keep])
    return buf.getvalue()


def _aggregate(rows: list[dict], key_fields: tuple[str, ...]) -> list[dict]:
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = tuple(row[f] for f in key_fields)
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups):
        members = groups[key]
        opts = [r for r in members if r["status"] == "Optimal"]
        unsolved = [r for r in members if r["status"] != "Optimal"]
        root_gaps = [float(r["root_gap_pct"]) for r in members if r["root_gap_pct"] != ""]
        rec = dict(zip(key_fields, key))
        rec.update({
            "runs": len(members),
            "opt": len(opts),
            "gap_pct": f"{sum(float(r['gap_pct']) for r in unsolved) / len(unsolved):.4f}" if unsolved else "0.0000",
            "root_gap_pct": f"{sum(root_gaps) / len(root_gaps):.4f}" if root_gaps else "",
            "nodes_avg": f"{sum(int(r['nodes']) for r in members) / len(members):.1f}",
            "time_avg": f"{sum(float(r['elapsed']) for r in members) / len(members):.3f}",
        })
        out.append(rec)
    return out


AGG_FIELDS = ["runs", "opt", "gap_pct", "root_gap_pct", "nodes_avg", "time_avg"]


def table_by_speed(rows: list[dict]) -> str:
    keys = ("endurance", "speed", "variant", "mode")
    return rows_to_csv(_aggregate(rows, keys), list(keys) + AGG_FIELDS)


def table_by_depot(rows: list[dict]) -> str:
    keys = ("endurance", "depot", "variant", "mode")
    return rows_to_csv(_aggregate(rows, keys), list(keys) + AGG_FIELDS)


def table_wait_vs_nowait(rows: list[dict]) -> str:
    """Per group: average 100*(opt_nowait - opt_wait)/opt_nowait over the
    instances where the two optima differ, and the occurrence count."""
    by_key: dict[tuple, dict[str, float]] = {}
    for row in rows:
        if row["status"] != "Optimal":
            continue
        key = (row["instance"], row["variant"])
        by_key.setdefault(key, {})[row["mode"]] = float(row["value"])
    groups: dict[tuple, list[float]] = {}
    counts: dict[tuple, int] = {}
    totals: dict[tuple, int] = {}
    for (instance, variant), values in sorted(by_key.items()):
        if "wait" not in values or "nowait" not in values:
            continue
        endurance = instance.split("-E")[1].split("-")[0]
        key = (endurance, variant)
        totals[key] = totals.get(key, 0) + 1
        diff = values["nowait"] - values["wait"]
        if diff > 1e-6 * max(values["nowait"], 1.0):
            counts[key] = counts.get(key, 0) + 1
            groups.setdefault(key, []).append(100.0 * diff / values["nowait"])
    out = []
    for key in sorted(totals):
        gaps = groups.get(key, [])
        out.append({
            "endurance": key[0],
            "variant": key[1],
            "pairs": totals[key],
            "gap_pct": f"{sum(gaps) / len(gaps):.4f}" if gaps else "0.0000",
            "occurrences": counts.get(key, 0),
        })
    return rows_to_csv(out, ["endurance", "variant", "pairs", "gap_pct", "occurrences"])
