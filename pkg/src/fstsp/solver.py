"""Branch-and-cut driver with lazy separation, plus the LP backend contract.

Policy: best-bound node selection; at each node the LP is re-solved and the
cut families are separated in order (subtour, crossing, backward).  Rounds on
fractional points are capped; integral points are always separated, because
the lazy families define feasibility, and a surviving integral point is
decoded and judged by the schedule simulator before becoming the incumbent.
Branching picks the most fractional binary, truck arcs first on ties.  One
run is single-threaded; cuts are globally valid and stay in the LP for the
whole tree.
"""

from __future__ import annotations

import heapq
import json
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import cuts as cut_mod
from .cuts import Cut
from .instance import Instance
from .lp import BoundedSimplex, LpResult, LpStatus
from .model import (
    INTEGRALITY_TOL,
    LinearModel,
    Variant,
    build,
    extract_schedule,
)
from .schedule import InfeasibilityReport, Schedule, WaitMode, evaluate

PRUNE_TOL = 1e-7

_FAMILY_PRIORITY = {"x": 0, "y": 1, "gf": 1, "gb": 1}


@dataclass
class SolveLimits:
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    cut_round_cap: int = 10
    cuts_per_round: int = cut_mod.MAX_CUTS_PER_FAMILY


@dataclass
class CutLogEntry:
    node: int
    round: int
    family: str
    violation: float
    witness: tuple

    def csv_row(self) -> str:
        wtxt = "|".join(map(str, self.witness))
        return f"{self.node},{self.round},{self.family},{self.violation:.6f},{wtxt}"


def cut_log_csv(entries: Sequence[CutLogEntry]) -> str:
    """Ablation-friendly dump of every cut emitted during a solve."""
    lines = ["node,round,family,violation,witness"]
    lines += [e.csv_row() for e in entries]
    return "\n".join(lines) + "\n"


@dataclass
class SolveReport:
    status: str                      # "Optimal" | "FeasibleBound"
    value: float
    incumbent: Optional[Schedule]
    lower_bound: float
    gap_pct: float
    root_lb: float
    root_gap_pct: Optional[float]
    nodes: int
    cuts_by_family: dict[str, int]
    elapsed: float
    cut_log: list[CutLogEntry] = field(default_factory=list)
    cut_rows: list[Cut] = field(default_factory=list)

    def to_json(self) -> str:
        def _num(v):
            return v if v is None or np.isfinite(v) else None

        data = {
            "status": self.status,
            "value": _num(self.value),
            "incumbent": None,
            "lower_bound": _num(self.lower_bound),
            "gap_pct": _num(self.gap_pct),
            "root_lb": _num(self.root_lb),
            "root_gap_pct": _num(self.root_gap_pct),
            "nodes": self.nodes,
            "cuts_by_family": self.cuts_by_family,
            "elapsed": self.elapsed,
        }
        if self.incumbent is not None:
            data["incumbent"] = {
                "route": list(self.incumbent.route),
                "sorties": [list(s.as_tuple()) for s in self.incumbent.sorted_sorties()],
            }
        return json.dumps(data, indent=1)


class SimplexBackend:
    """LpBackend over the built-in bounded simplex.  Re-solving after
    ``add_rows`` can only raise a minimization optimum; bound changes are
    reversible."""

    def __init__(self) -> None:
        self._lp: Optional[BoundedSimplex] = None
        self.model: Optional[LinearModel] = None

    def load(self, model: LinearModel) -> None:
        self.model = model
        c = np.zeros(len(model.variables))
        for pos, coef in model.objective.items():
            c[pos] = coef
        lo = [v.lb for v in model.variables]
        hi = [v.ub for v in model.variables]
        self._lp = BoundedSimplex(c, lo, hi)
        for row in model.rows:
            self._lp.add_row(row.coeffs, row.sense, row.rhs)

    def add_rows(self, new_cuts: Sequence[Cut]) -> None:
        assert self._lp is not None
        for cut in new_cuts:
            self._lp.add_row(cut.coeffs, cut.sense, cut.rhs)

    def change_bounds(self, var: int, lo: float, hi: float) -> None:
        assert self._lp is not None
        self._lp.set_bounds(var, lo, hi)

    def solve(self) -> LpResult:
        assert self._lp is not None
        return self._lp.solve()


def simplex_solve(model: LinearModel) -> LpResult:
    """Solve the continuous relaxation of a model with the built-in simplex."""
    backend = SimplexBackend()
    backend.load(model)
    return backend.solve()


def milp_reference_optimum(model: LinearModel,
                           extra_rows: Sequence[Cut] = ()) -> float:
    """Exact mixed-integer optimum of a model via HiGHS, used as an external
    reference for the polynomial variants (notably mcbar, whose plain
    branch-and-bound is hopeless beyond the smallest instances, matching the
    original experiments)."""
    from scipy import optimize, sparse

    n = len(model.variables)
    c = np.zeros(n)
    for pos, coef in model.objective.items():
        c[pos] = coef
    data, ridx, cidx, lo_r, hi_r = [], [], [], [], []
    all_rows = [(r.coeffs, r.sense, r.rhs) for r in model.rows]
    all_rows += [(cut.coeffs, cut.sense, cut.rhs) for cut in extra_rows]
    for r, (coeffs, sense, rhs) in enumerate(all_rows):
        if sense == "<=":
            lo_r.append(-np.inf)
            hi_r.append(rhs)
        elif sense == ">=":
            lo_r.append(rhs)
            hi_r.append(np.inf)
        else:
            lo_r.append(rhs)
            hi_r.append(rhs)
        for i, coef in coeffs.items():
            ridx.append(r)
            cidx.append(i)
            data.append(coef)
    mat = sparse.csr_matrix((data, (ridx, cidx)), shape=(len(all_rows), n))
    integrality = np.zeros(n)
    for pos in model.binaries():
        integrality[pos] = 1
    bounds = optimize.Bounds(np.array([v.lb for v in model.variables]),
                             np.array([v.ub for v in model.variables]))
    res = optimize.milp(c, constraints=optimize.LinearConstraint(mat, np.array(lo_r), np.array(hi_r)),
                        bounds=bounds, integrality=integrality,
                        options={"mip_rel_gap": 1e-9})
    if res.status != 0:
        raise RuntimeError(f"reference MILP solve failed: {res.message}")
    return float(res.fun)


class HighsBackend:
    """LpBackend over HiGHS: a persistent model with hot-started re-solves
    when scipy's vendored bindings are available, else one-shot linprog
    calls.  Same contract as SimplexBackend; this is the tree-search default
    purely for speed."""

    def __init__(self) -> None:
        self.model: Optional[LinearModel] = None
        self._inc = None

    def load(self, model: LinearModel) -> None:
        from . import _hi

        self.model = model
        n = len(model.variables)
        self._c = np.zeros(n)
        for pos, coef in model.objective.items():
            self._c[pos] = coef
        self._lo = np.array([v.lb for v in model.variables])
        self._hi = np.array([v.ub for v in model.variables])
        self._rows = [(row.coeffs, row.sense, row.rhs) for row in model.rows]
        if _hi.has_incremental():
            self._inc = _hi.IncrementalHighs()
            self._inc.load(self._c, self._lo, self._hi, self._rows)

    def add_rows(self, new_cuts: Sequence[Cut]) -> None:
        for cut in new_cuts:
            self._rows.append((cut.coeffs, cut.sense, cut.rhs))
            if self._inc is not None:
                self._inc.add_row(cut.coeffs, cut.sense, cut.rhs)

    def change_bounds(self, var: int, lo: float, hi: float) -> None:
        self._lo[var], self._hi[var] = lo, hi
        if self._inc is not None:
            self._inc.change_bounds(var, lo, hi)

    def solve(self) -> LpResult:
        if self._inc is not None:
            status, obj, x, iters = self._inc.solve()
            if status.startswith("failed"):
                # rebuild from scratch once; incremental state rarely sours
                # but a fresh model plus the accumulated rows is always valid
                from . import _hi

                self._inc = _hi.IncrementalHighs()
                self._inc.load(self._c, self._lo, self._hi, self._rows)
                status, obj, x, iters = self._inc.solve()
            mapped = {
                "optimal": LpStatus.OPTIMAL,
                "infeasible": LpStatus.INFEASIBLE,
                "unbounded": LpStatus.UNBOUNDED,
            }.get(status, LpStatus.NUMERICAL)
            return LpResult(mapped, obj, x, iters,
                            "" if mapped is LpStatus.OPTIMAL else status)
        return self._solve_linprog()

    def _solve_linprog(self) -> LpResult:
        from scipy import sparse
        from scipy.optimize import linprog

        ub_rows, eq_rows = [], []
        for coeffs, sense, rhs in self._rows:
            if sense == "<=":
                ub_rows.append((coeffs, rhs))
            elif sense == ">=":
                ub_rows.append(({i: -c for i, c in coeffs.items()}, -rhs))
            else:
                eq_rows.append((coeffs, rhs))

        def pack(rows):
            data, ridx, cidx, rhs = [], [], [], []
            for r, (coeffs, b) in enumerate(rows):
                rhs.append(b)
                for i, c in coeffs.items():
                    ridx.append(r)
                    cidx.append(i)
                    data.append(c)
            return (sparse.csr_matrix((data, (ridx, cidx)),
                                      shape=(len(rows), len(self._c))),
                    np.array(rhs))

        A_ub, b_ub = pack(ub_rows)
        A_eq, b_eq = pack(eq_rows)
        res = linprog(self._c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                      bounds=np.column_stack([self._lo, self._hi]), method="highs")
        if res.status == 0:
            return LpResult(LpStatus.OPTIMAL, float(res.fun), np.asarray(res.x), int(res.nit))
        if res.status == 2:
            return LpResult(LpStatus.INFEASIBLE, float("nan"), None, int(res.nit or 0))
        if res.status == 3:
            return LpResult(LpStatus.UNBOUNDED, float("nan"), None, int(res.nit or 0))
        return LpResult(LpStatus.NUMERICAL, float("nan"), None, 0, res.message)


BACKENDS = {"simplex": SimplexBackend, "highs": HighsBackend}


def _is_integral(model: LinearModel, x: np.ndarray) -> bool:
    for pos in model.binaries():
        if abs(x[pos] - round(x[pos])) > INTEGRALITY_TOL:
            return False
    return True


def _branch_variable(model: LinearModel, x: np.ndarray) -> int:
    best = None
    for pos in model.binaries():
        frac = abs(x[pos] - round(x[pos]))
        if frac <= INTEGRALITY_TOL:
            continue
        fam = _FAMILY_PRIORITY.get(model.variables[pos].family, 2)
        key = (-frac, fam, pos)
        if best is None or key < best:
            best = key
    assert best is not None
    return best[2]


class _BnC:
    def __init__(self, inst: Instance, variant: Variant, mode: WaitMode,
                 warm_start: Optional[Schedule], limits: SolveLimits,
                 backend: str = "highs") -> None:
        self.inst = inst
        self.variant = variant
        self.mode = mode
        self.limits = limits
        self.model = build(inst, variant, mode)
        self.backend = BACKENDS[backend]()
        self.backend.load(self.model)
        self.lazy = variant in (Variant.DMN, Variant.DMN2)

        self.ub = float("inf")
        self.incumbent: Optional[Schedule] = None
        if warm_start is not None:
            result = evaluate(inst, warm_start, mode)
            if isinstance(result, InfeasibilityReport):
                raise ValueError(f"warm start infeasible: {result}")
            self.ub = result.completion
            self.incumbent = warm_start

        self.pool: set[tuple] = set()
        self.cut_counts: dict[str, int] = {}
        self.cut_log: list[CutLogEntry] = []
        self.cut_rows: list[Cut] = []
        self.applied: dict[int, tuple[float, float]] = {}
        self.nodes_processed = 0
        self.root_lb = float("-inf")
        self.started = time.perf_counter()

    # -- plumbing ---------------------------------------------------------------

    def _apply(self, changes: tuple[tuple[int, float, float], ...]) -> None:
        target = {var: (lo, hi) for var, lo, hi in changes}
        for var in list(self.applied):
            if var not in target:
                ref = self.model.variables[var]
                self.backend.change_bounds(var, ref.lb, ref.ub)
                del self.applied[var]
        for var, bounds in target.items():
            if self.applied.get(var) != bounds:
                self.backend.change_bounds(var, *bounds)
                self.applied[var] = bounds

    def _separate(self, x: np.ndarray) -> list[Cut]:
        found = cut_mod.separate_families(self.model, x, tournament=True,
                                          max_cuts=self.limits.cuts_per_round)
        return [c for c in found if c.key() not in self.pool]

    def _register(self, cuts: Sequence[Cut], node: int, rnd: int) -> None:
        for cut in cuts:
            self.pool.add(cut.key())
            self.cut_counts[cut.family] = self.cut_counts.get(cut.family, 0) + 1
            self.cut_log.append(CutLogEntry(node, rnd, cut.family, cut.violation, cut.witness))
            self.cut_rows.append(cut)
        self.backend.add_rows(cuts)

    def _out_of_budget(self) -> bool:
        if self.limits.node_limit is not None and self.nodes_processed >= self.limits.node_limit:
            return True
        if self.limits.time_limit is not None and \
                time.perf_counter() - self.started > self.limits.time_limit:
            return True
        return False

    # -- node processing -----------------------------------------------------------

    def _process(self, node_id: int, changes) -> tuple[Optional[float], Optional[np.ndarray]]:
        """Cut-and-resolve loop for one node.  Returns (bound, point) where a
        ``None`` point means the node is finished (pruned or incumbent)."""
        self._apply(changes)
        fractional_rounds = 0
        bound: Optional[float] = None
        while True:
            res = self.backend.solve()
            if res.status is LpStatus.INFEASIBLE:
                return bound, None
            if res.status is not LpStatus.OPTIMAL:
                raise RuntimeError(f"LP backend failed at node {node_id}: {res.message}")
            bound = res.objective if bound is None else max(bound, res.objective)
            x = res.x
            integral = _is_integral(self.model, x)
            # the root always finishes its cutting loop (root_lb must match a
            # standalone root run); deeper nodes prune as early as possible
            if node_id > 0 and not integral and bound >= self.ub - PRUNE_TOL:
                return bound, None
            if self.lazy:
                may_round = integral or fractional_rounds < self.limits.cut_round_cap
                if may_round:
                    cuts = self._separate(x)
                    if cuts:
                        self._register(cuts, node_id, fractional_rounds)
                        if not integral:
                            fractional_rounds += 1
                        continue
            if node_id == 0:
                self.root_lb = bound
            if bound >= self.ub - PRUNE_TOL:
                return bound, None
            if integral:
                sched = extract_schedule(self.model, x)
                result = evaluate(self.inst, sched, self.mode)
                if isinstance(result, InfeasibilityReport):
                    raise RuntimeError(
                        f"integral point passed all rows but fails simulation: {result}")
                if result.completion < self.ub - 1e-9:
                    self.ub = result.completion
                    self.incumbent = sched
                return bound, None
            return bound, x

    def run(self) -> SolveReport:
        heap: list[tuple[float, int, tuple]] = []
        seq = 0
        heapq.heappush(heap, (float("-inf"), seq, ()))
        truncated = False

        while heap:
            if self._out_of_budget():
                truncated = True
                break
            bound, _, changes = heapq.heappop(heap)
            if bound >= self.ub - PRUNE_TOL:
                continue
            node_id = self.nodes_processed
            self.nodes_processed += 1
            new_bound, x = self._process(node_id, changes)
            if x is None:
                continue
            assert new_bound is not None
            var = _branch_variable(self.model, x)
            for lo, hi in ((1.0, 1.0), (0.0, 0.0)):
                seq += 1
                heapq.heappush(heap, (new_bound, seq, changes + ((var, lo, hi),)))

        if truncated and heap:
            status = "FeasibleBound"
            lb = min(self.ub, min(entry[0] for entry in heap))
            lb = max(lb, 0.0)  # availability times are non-negative
        else:
            status = "Optimal"
            lb = self.ub
        if np.isfinite(self.ub) and self.ub > 0:
            gap = 100.0 * (self.ub - lb) / self.ub
        elif np.isfinite(self.ub):
            gap = 0.0
        else:
            gap = float("inf")
        root_gap = None
        if status == "Optimal" and self.ub > 0 and np.isfinite(self.root_lb):
            root_gap = 100.0 * (self.ub - max(self.root_lb, 0.0)) / self.ub
        elapsed = time.perf_counter() - self.started
        return SolveReport(
            status=status,
            value=self.ub,
            incumbent=self.incumbent,
            lower_bound=lb,
            gap_pct=gap,
            root_lb=self.root_lb,
            root_gap_pct=root_gap,
            nodes=self.nodes_processed,
            cuts_by_family=dict(sorted(self.cut_counts.items())),
            elapsed=elapsed,
            cut_log=self.cut_log,
            cut_rows=self.cut_rows,
        )


def solve_bnc(inst: Instance, variant: Variant, mode: WaitMode,
              warm_start: Optional[Schedule] = None,
              limits: Optional[SolveLimits] = None,
              backend: str = "highs") -> SolveReport:
    driver = _BnC(inst, variant, mode, warm_start, limits or SolveLimits(), backend)
    return driver.run()


def root_relaxation_gap(inst: Instance, variant: Variant, mode: WaitMode,
                        opt: float, limits: Optional[SolveLimits] = None,
                        backend: str = "highs") -> float:
    """Run only the root cutting loop and report 100*(opt - LB)/opt."""
    driver = _BnC(inst, variant, mode, None, limits or SolveLimits(), backend)
    _bound, _x = driver._process(0, ())
    lb = driver.root_lb
    if opt <= 0:
        return 0.0
    return 100.0 * (opt - max(lb, 0.0)) / opt
