"""MILP builders for the three formulation variants, LP text emission and the
mapping between LP points and schedules.

Variants:
  * ``mcbar``: the corrected three-index compact model (launch service charged
    on the arc leaving the launch node and added to the drone clock, never at
    the depot), with MTZ ordering, pairwise precedence variables and explicit
    crossing rows.  Polynomial; solvable by plain branch-and-bound.
  * ``dmn``:  three-index model with the component-wise objective (travel +
    service charges + truck waiting variables), two-node subtour rows, and the
    crossing/backward/subtour families left to lazy separation.
  * ``dmn2``: two-index drone-arc model (``gf`` = launch arc into a customer,
    ``gb`` = return arc out of a customer) with per-leg variable fixing.

Big-M handling: one global constant per model, sized so the natural
assignment of every structurally feasible schedule satisfies every
deactivated row (see ``compute_big_m``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .instance import Instance, sortie_catalog
from .schedule import Schedule, Timeline, WaitMode

INTEGRALITY_TOL = 1e-6
ROW_FEASIBILITY_TOL = 1e-7


class Variant(enum.Enum):
    MCBAR = "mcbar"
    DMN = "dmn"
    DMN2 = "dmn2"

    @classmethod
    def parse(cls, text: str) -> "Variant":
        return cls(text.strip().lower())


class DecodeError(ValueError):
    """An integral point does not decode to a valid schedule; this signals a
    missing lazy cut, not an extraction bug."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class VarRef:
    name: str
    family: str                  # x, y, gf, gb, tT, tD, u, p, w
    indices: tuple[int, ...]
    lb: float
    ub: float
    integer: bool


@dataclass(frozen=True)
class Row:
    name: str
    tag: str                     # constraint family, also the LP section label
    coeffs: dict[int, float]     # variable position -> coefficient
    sense: str                   # "<=", ">=", "="
    rhs: float

    def activity(self, point: np.ndarray) -> float:
        return float(sum(c * point[i] for i, c in self.coeffs.items()))

    def violation(self, point: np.ndarray) -> float:
        act = self.activity(point)
        if self.sense == "<=":
            return act - self.rhs
        if self.sense == ">=":
            return self.rhs - act
        return abs(act - self.rhs)


@dataclass
class LinearModel:
    variant: Variant
    mode: WaitMode
    inst: Instance
    variables: list[VarRef]
    rows: list[Row]
    objective: dict[int, float]
    big_m: float
    index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.index:
            self.index = {v.name: pos for pos, v in enumerate(self.variables)}

    def var(self, name: str) -> int:
        return self.index[name]

    def binaries(self) -> list[int]:
        return [pos for pos, v in enumerate(self.variables) if v.integer]

    def objective_value(self, point: np.ndarray) -> float:
        return float(sum(c * point[i] for i, c in self.objective.items()))

    def violated_rows(self, point: np.ndarray, tol: float = ROW_FEASIBILITY_TOL) -> list[tuple[Row, float]]:
        out = []
        for row in self.rows:
            v = row.violation(point)
            if v > tol:
                out.append((row, v))
        return out


class _Builder:
    def __init__(self) -> None:
        self.variables: list[VarRef] = []
        self.index: dict[str, int] = {}
        self.rows: list[Row] = []

    def add_var(self, name: str, family: str, indices: tuple[int, ...],
                lb: float, ub: float, integer: bool) -> int:
        pos = len(self.variables)
        self.variables.append(VarRef(name, family, indices, lb, ub, integer))
        self.index[name] = pos
        return pos

    def add_row(self, name: str, tag: str, coeffs: dict[int, float], sense: str, rhs: float) -> None:
        clean = {i: c for i, c in sorted(coeffs.items()) if c != 0.0}
        self.rows.append(Row(name, tag, clean, sense, rhs))


def compute_big_m(inst: Instance) -> float:
    """Upper bound on any feasible availability time, plus one arc of slack.

    Completion of any structurally feasible schedule is at most the sum of
    row-wise maximal truck times, plus per-sortie service charges, plus per
    sortie at most one full flight span of truck waiting; deactivated rows
    additionally need one arc time and one service pair of headroom.
    """
    arcs = list(inst.arcs())
    row_max = 0.0
    for i in inst.launch_nodes():
        row_max += max(inst.tau_truck(i, j) for j in inst.rendezvous_nodes() if j != i)
    max_arc = max(inst.tau_truck(i, j) for i, j in arcs)
    catalog = sortie_catalog(inst)
    span = max((inst.sortie_energy(*t) for t in catalog.triplets), default=0.0)
    return (row_max + max_arc
            + (inst.c + 1) * (inst.sigma_l + inst.sigma_r)
            + (inst.c + 1) * span)


def _x_name(i: int, j: int) -> str:
    return f"x_{i}_{j}"


def build(inst: Instance, variant: Variant, mode: WaitMode) -> LinearModel:
    """Variant-complete polynomial model.  The exponential families (subtour,
    crossing, backward with |S| > 2 / path witnesses) are not materialized for
    dmn/dmn2; they are added lazily by the solver."""
    b = _Builder()
    M = compute_big_m(inst)
    cplus = inst.end_depot
    arcs = list(inst.arcs())
    catalog = sortie_catalog(inst)
    E = inst.endurance
    sl, sr = inst.sigma_l, inst.sigma_r

    x = {(i, j): b.add_var(_x_name(i, j), "x", (i, j), 0.0, 1.0, True) for i, j in arcs}

    y: dict[tuple[int, int, int], int] = {}
    gf: dict[tuple[int, int], int] = {}
    gb: dict[tuple[int, int], int] = {}
    if variant in (Variant.MCBAR, Variant.DMN):
        for t in catalog.sorted():
            i, j, k = t
            y[t] = b.add_var(f"y_{i}_{j}_{k}", "y", t, 0.0, 1.0, True)
    else:
        for i, j in arcs:
            if j in inst.drone_eligible and inst.tau_drone(i, j) <= E:
                gf[(i, j)] = b.add_var(f"gf_{i}_{j}", "gf", (i, j), 0.0, 1.0, True)
        for j, k in arcs:
            if j in inst.drone_eligible and inst.tau_drone(j, k) + sr <= E:
                gb[(j, k)] = b.add_var(f"gb_{j}_{k}", "gb", (j, k), 0.0, 1.0, True)

    tT = {i: b.add_var(f"tT_{i}", "tT", (i,), 0.0, 0.0 if i == 0 else M, False)
          for i in inst.nodes()}
    tD = {i: b.add_var(f"tD_{i}", "tD", (i,), 0.0, 0.0 if i == 0 else M, False)
          for i in inst.nodes()}

    u: dict[int, int] = {}
    p: dict[tuple[int, int], int] = {}
    w: dict[int, int] = {}
    if variant is Variant.MCBAR:
        for i in inst.rendezvous_nodes():
            u[i] = b.add_var(f"u_{i}", "u", (i,), 1.0, inst.c + 2.0, False)
        for j in inst.customers():
            p[(0, j)] = b.add_var(f"p_0_{j}", "p", (0, j), 1.0, 1.0, True)
        for i in inst.customers():
            for j in inst.customers():
                if i != j:
                    p[(i, j)] = b.add_var(f"p_{i}_{j}", "p", (i, j), 0.0, 1.0, True)
    else:
        for i in inst.nodes():
            w[i] = b.add_var(f"w_{i}", "w", (i,), 0.0, M, False)

    # sortie lookup tables (three-index variants)
    launches_at: dict[int, list] = {i: [] for i in inst.launch_nodes()}
    lands_at: dict[int, list] = {k: [] for k in inst.rendezvous_nodes()}
    serves: dict[int, list] = {j: [] for j in inst.customers()}
    for t in catalog.sorted():
        launches_at[t[0]].append(t)
        lands_at[t[2]].append(t)
        serves[t[1]].append(t)

    # -- objective ----------------------------------------------------------
    objective: dict[int, float] = {}
    if variant is Variant.MCBAR:
        objective[tT[cplus]] = 1.0
    else:
        for (i, j), pos in x.items():
            objective[pos] = objective.get(pos, 0.0) + inst.tau_truck(i, j)
        if variant is Variant.DMN:
            for t, pos in y.items():
                objective[pos] = sr if t[0] == 0 else sl + sr
        else:
            for (i, j), pos in gf.items():
                if i != 0:
                    objective[pos] = sl
            for (j, k), pos in gb.items():
                objective[pos] = objective.get(pos, 0.0) + sr
        for i in inst.nodes():
            objective[w[i]] = 1.0
        objective = {pos: coef for pos, coef in objective.items() if coef != 0.0}

    # -- customer covering & truck routing ----------------------------------
    for j in inst.customers():
        coeffs = {x[(i, j)]: 1.0 for i in inst.launch_nodes() if i != j}
        if variant is Variant.DMN2:
            for i in inst.launch_nodes():
                if (i, j) in gf:
                    coeffs[gf[(i, j)]] = 1.0
        else:
            for t in serves[j]:
                coeffs[y[t]] = 1.0
        b.add_row(f"cover_in_{j}", "cover_in", coeffs, "=", 1.0)
    if variant is Variant.DMN2:
        for i in inst.customers():
            coeffs = {x[(i, j)]: 1.0 for j in inst.rendezvous_nodes() if j != i}
            for k in inst.rendezvous_nodes():
                if (i, k) in gb:
                    coeffs[gb[(i, k)]] = 1.0
            b.add_row(f"cover_out_{i}", "cover_out", coeffs, "=", 1.0)

    b.add_row("depot_out", "depot_out",
              {x[(0, j)]: 1.0 for j in inst.rendezvous_nodes()}, "=", 1.0)
    b.add_row("depot_in", "depot_in",
              {x[(i, cplus)]: 1.0 for i in inst.launch_nodes()}, "=", 1.0)
    for j in inst.customers():
        coeffs: dict[int, float] = {}
        for i in inst.launch_nodes():
            if i != j:
                coeffs[x[(i, j)]] = coeffs.get(x[(i, j)], 0.0) + 1.0
        for k in inst.rendezvous_nodes():
            if k != j:
                coeffs[x[(j, k)]] = coeffs.get(x[(j, k)], 0.0) - 1.0
        b.add_row(f"flow_{j}", "flow", coeffs, "=", 0.0)

    # -- sortie structure ----------------------------------------------------
    if variant in (Variant.MCBAR, Variant.DMN):
        for i in inst.launch_nodes():
            if launches_at[i]:
                b.add_row(f"launch_once_{i}", "launch_once",
                          {y[t]: 1.0 for t in launches_at[i]}, "<=", 1.0)
        for k in inst.rendezvous_nodes():
            if lands_at[k]:
                b.add_row(f"land_once_{k}", "land_once",
                          {y[t]: 1.0 for t in lands_at[k]}, "<=", 1.0)
        for t in catalog.sorted():
            i, j, k = t
            if i != 0:
                coeffs = {y[t]: 2.0}
                for h in inst.launch_nodes():
                    if h != i and (h, i) in x:
                        coeffs[x[(h, i)]] = coeffs.get(x[(h, i)], 0.0) - 1.0
                for l in inst.launch_nodes():
                    if l != k and (l, k) in x:
                        coeffs[x[(l, k)]] = coeffs.get(x[(l, k)], 0.0) - 1.0
                b.add_row(f"link_{i}_{j}_{k}", "link", coeffs, "<=", 0.0)
            else:
                coeffs = {y[t]: 1.0}
                for h in inst.launch_nodes():
                    if h != k and (h, k) in x:
                        coeffs[x[(h, k)]] = coeffs.get(x[(h, k)], 0.0) - 1.0
                b.add_row(f"link0_{j}_{k}", "link0", coeffs, "<=", 0.0)
    else:
        for i in inst.launch_nodes():
            out_g = [gf[(i, j)] for j in inst.rendezvous_nodes() if (i, j) in gf]
            if out_g:
                coeffs = {pos: 1.0 for pos in out_g}
                for h in inst.rendezvous_nodes():
                    if (i, h) in x:
                        coeffs[x[(i, h)]] = -1.0
                b.add_row(f"couple_launch_{i}", "couple_launch", coeffs, "<=", 0.0)
        for j in inst.rendezvous_nodes():
            in_g = [gb[(i, j)] for i in inst.customers() if (i, j) in gb]
            if in_g:
                coeffs = {pos: 1.0 for pos in in_g}
                for h in inst.launch_nodes():
                    if (h, j) in x:
                        coeffs[x[(h, j)]] = -1.0
                b.add_row(f"couple_land_{j}", "couple_land", coeffs, "<=", 0.0)
        for j in sorted(inst.drone_eligible):
            coeffs = {}
            for i in inst.launch_nodes():
                if (i, j) in gf:
                    coeffs[gf[(i, j)]] = 1.0
            for k in inst.rendezvous_nodes():
                if (j, k) in gb:
                    coeffs[gb[(j, k)]] = -1.0
            if coeffs:
                b.add_row(f"gflow_{j}", "gflow", coeffs, "=", 0.0)
        for i, j in arcs:
            if (i, j) in gf and (i, j) in gb:
                b.add_row(f"pair_same_{i}_{j}", "pair_same",
                          {gf[(i, j)]: 1.0, gb[(i, j)]: 1.0}, "<=", 1.0)
            if (i, j) in gf and (j, i) in gb:
                b.add_row(f"pair_rev_{i}_{j}", "pair_rev",
                          {gf[(i, j)]: 1.0, gb[(j, i)]: 1.0}, "<=", 1.0)

    # -- truck/drone synchronization -----------------------------------------
    def launch_activator(i: int) -> dict[int, float]:
        if variant is Variant.DMN2:
            return {gf[(i, j)]: 1.0 for j in inst.rendezvous_nodes() if (i, j) in gf}
        return {y[t]: 1.0 for t in launches_at[i]}

    def land_activator(k: int) -> dict[int, float]:
        if variant is Variant.DMN2:
            return {gb[(j, k)]: 1.0 for j in inst.customers() if (j, k) in gb}
        return {y[t]: 1.0 for t in lands_at[k]}

    for i in inst.customers():
        act = launch_activator(i)
        if act:
            lo = {tD[i]: 1.0, tT[i]: -1.0}
            for pos, cf in act.items():
                lo[pos] = -M * cf
            b.add_row(f"sync_launch_lo_{i}", "sync_launch", lo, ">=", -M)
            hi = {tD[i]: 1.0, tT[i]: -1.0}
            for pos, cf in act.items():
                hi[pos] = M * cf
            b.add_row(f"sync_launch_hi_{i}", "sync_launch", hi, "<=", M)
    for k in inst.rendezvous_nodes():
        act = land_activator(k)
        if act:
            lo = {tD[k]: 1.0, tT[k]: -1.0}
            for pos, cf in act.items():
                lo[pos] = -M * cf
            b.add_row(f"sync_land_lo_{k}", "sync_land", lo, ">=", -M)
            hi = {tD[k]: 1.0, tT[k]: -1.0}
            for pos, cf in act.items():
                hi[pos] = M * cf
            b.add_row(f"sync_land_hi_{k}", "sync_land", hi, "<=", M)

    # -- truck timing ---------------------------------------------------------
    def sigma_r_terms(k: int) -> dict[int, float]:
        return {pos: sr * cf for pos, cf in land_activator(k).items()}

    def sigma_l_terms(h: int, excluded_customer: int) -> dict[int, float]:
        # charge the launch service on the arc leaving h; a sortie whose
        # customer is the arc head never coexists with that truck arc
        if variant is Variant.DMN2:
            return {gf[(h, l)]: sl for l in inst.rendezvous_nodes() if (h, l) in gf}
        return {y[t]: sl for t in launches_at[h] if t[1] != excluded_customer}

    for h, k in arcs:
        coeffs = {tT[k]: 1.0, tT[h]: -1.0}
        if variant is not Variant.MCBAR:
            coeffs[w[k]] = -1.0
        for pos, cf in sigma_r_terms(k).items():
            coeffs[pos] = coeffs.get(pos, 0.0) - cf
        if h != 0:
            for pos, cf in sigma_l_terms(h, k).items():
                coeffs[pos] = coeffs.get(pos, 0.0) - cf
        lo = dict(coeffs)
        lo[x[(h, k)]] = lo.get(x[(h, k)], 0.0) - M
        b.add_row(f"truck_lo_{h}_{k}", "truck_time", lo, ">=", inst.tau_truck(h, k) - M)
        if variant is not Variant.MCBAR:
            hi = dict(coeffs)
            hi[x[(h, k)]] = hi.get(x[(h, k)], 0.0) + M
            b.add_row(f"truck_hi_{h}_{k}", "truck_time", hi, "<=", inst.tau_truck(h, k) + M)

    # -- drone timing -----------------------------------------------------------
    if variant is Variant.DMN2:
        for (i, j), pos in sorted(gf.items()):
            coeffs = {tD[j]: 1.0, tD[i]: -1.0, pos: -M}
            extra = sl if i != 0 else 0.0
            tag = "drone_out" if i != 0 else "drone_out0"
            b.add_row(f"{tag}_{i}_{j}", tag, coeffs, ">=", inst.tau_drone(i, j) + extra - M)
        for (j, k), pos in sorted(gb.items()):
            coeffs = {tD[k]: 1.0, tD[j]: -1.0, pos: -M}
            b.add_row(f"drone_back_{j}_{k}", "drone_back", coeffs, ">=",
                      inst.tau_drone(j, k) + sr - M)
    else:
        by_leg_out: dict[tuple[int, int], list] = {}
        by_leg_back: dict[tuple[int, int], list] = {}
        for t in catalog.sorted():
            i, j, k = t
            by_leg_out.setdefault((i, j), []).append(t)
            by_leg_back.setdefault((j, k), []).append(t)
        for (i, j), ts in sorted(by_leg_out.items()):
            coeffs = {tD[j]: 1.0, tD[i]: -1.0}
            for t in ts:
                coeffs[y[t]] = -M
            extra = sl if i != 0 else 0.0
            tag = "drone_out" if i != 0 else "drone_out0"
            b.add_row(f"{tag}_{i}_{j}", tag, coeffs, ">=", inst.tau_drone(i, j) + extra - M)
        for (j, k), ts in sorted(by_leg_back.items()):
            coeffs = {tD[k]: 1.0, tD[j]: -1.0}
            for t in ts:
                coeffs[y[t]] = -M
            b.add_row(f"drone_back_{j}_{k}", "drone_back", coeffs, ">=",
                      inst.tau_drone(j, k) + sr - M)

    # -- endurance ----------------------------------------------------------------
    if variant is Variant.DMN2:
        for j in sorted(inst.drone_eligible):
            for i in inst.launch_nodes():
                if (i, j) not in gf:
                    continue
                for k in inst.rendezvous_nodes():
                    if k == i or (j, k) not in gb:
                        continue
                    act = {gf[(i, j)]: M, gb[(j, k)]: M}
                    if mode is WaitMode.WAIT:
                        coeffs = {tD[k]: 1.0, tD[j]: -1.0, **act}
                        rhs = E - inst.tau_drone(i, j) + 2 * M
                    else:
                        coeffs = {tD[k]: 1.0, tD[i]: -1.0, **act}
                        rhs = E + (sl if i != 0 else 0.0) + 2 * M
                    b.add_row(f"energy_{i}_{j}_{k}", "energy", coeffs, "<=", rhs)
    else:
        for t in catalog.sorted():
            i, j, k = t
            if mode is WaitMode.WAIT:
                coeffs = {tD[k]: 1.0, tD[j]: -1.0, y[t]: M}
                rhs = E - inst.tau_drone(i, j) + M
            else:
                coeffs = {tD[k]: 1.0, tD[i]: -1.0, y[t]: M}
                rhs = E + (sl if i != 0 else 0.0) + M
            b.add_row(f"energy_{i}_{j}_{k}", "energy", coeffs, "<=", rhs)

    # -- ordering / anti-subtour ----------------------------------------------------
    if variant is Variant.MCBAR:
        big = inst.c + 2.0
        for i, j in arcs:
            if i != 0:
                b.add_row(f"mtz_{i}_{j}", "mtz",
                          {u[i]: 1.0, u[j]: -1.0, x[(i, j)]: big}, "<=", big - 1.0)
        for i in inst.customers():
            for k in inst.rendezvous_nodes():
                if k == i:
                    continue
                ts = [t for t in launches_at[i] if t[2] == k]
                if not ts:
                    continue
                coeffs = {u[k]: 1.0, u[i]: -1.0}
                for t in ts:
                    coeffs[y[t]] = -big
                b.add_row(f"sortie_order_{i}_{k}", "sortie_order", coeffs, ">=", 1.0 - big)
        for i in inst.customers():
            for j in inst.customers():
                if i < j:
                    b.add_row(f"p_pair_{i}_{j}", "p_pair",
                              {p[(i, j)]: 1.0, p[(j, i)]: 1.0}, "=", 1.0)
        for i in inst.customers():
            for j in inst.customers():
                if i == j:
                    continue
                b.add_row(f"up_lo_{i}_{j}", "u_p",
                          {u[i]: 1.0, u[j]: -1.0, p[(i, j)]: big}, ">=", 1.0)
                b.add_row(f"up_hi_{i}_{j}", "u_p",
                          {u[i]: 1.0, u[j]: -1.0, p[(i, j)]: big}, "<=", big - 1.0)
        for i in inst.launch_nodes():
            for l in inst.customers():
                if l == i:
                    continue
                for k in inst.rendezvous_nodes():
                    if k == l or k == i:
                        continue
                    s1 = [t for t in lands_at[k] if t[0] == i and t[1] != l]
                    s2 = [t for t in launches_at[l] if t[1] not in (i, k) and t[2] not in (i, k)]
                    if not s1 or not s2:
                        continue
                    coeffs = {tD[l]: 1.0, tD[k]: -1.0, p[(i, l)]: -M}
                    for t in s1:
                        coeffs[y[t]] = -M
                    for t in s2:
                        coeffs[y[t]] = coeffs.get(y[t], 0.0) - M
                    b.add_row(f"crossing_{i}_{l}_{k}", "crossing", coeffs, ">=", -3.0 * M)
    else:
        for i in inst.customers():
            for j in inst.customers():
                if i < j:
                    b.add_row(f"sec2_{i}_{j}", "sec2",
                              {x[(i, j)]: 1.0, x[(j, i)]: 1.0}, "<=", 1.0)

    return LinearModel(variant=variant, mode=mode, inst=inst, variables=b.variables,
                       rows=b.rows, objective=objective, big_m=M, index=b.index)


# -- LP text emission ----------------------------------------------------------


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _linear_expr(coeffs: dict[int, float], variables: Sequence[VarRef]) -> str:
    parts = []
    for pos in sorted(coeffs):
        coef = coeffs[pos]
        sign = "-" if coef < 0 else "+"
        parts.append(f"{sign} {_fmt(abs(coef))} {variables[pos].name}")
    if not parts:
        return "0 " + variables[0].name
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def emit_lp(model: LinearModel) -> str:
    """CPLEX-style LP text; deterministic ordering, rows grouped and named by
    constraint family.  Dialect documented in docs/lp-format.md."""
    lines = [
        "\\ flying-sidekick TSP model",
        f"\\ variant={model.variant.value} mode={model.mode.value}"
        f" vars={len(model.variables)} rows={len(model.rows)} bigM={_fmt(model.big_m)}",
        "Minimize",
        f" obj: {_linear_expr(model.objective, model.variables)}",
        "Subject To",
    ]
    last_tag = None
    for row in model.rows:
        if row.tag != last_tag:
            lines.append(f" \\ {row.tag}")
            last_tag = row.tag
        sense = {"<=": "<=", ">=": ">=", "=": "="}[row.sense]
        lines.append(f" {row.name}: {_linear_expr(row.coeffs, model.variables)} {sense} {_fmt(row.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.lb == v.ub:
            lines.append(f" {v.name} = {_fmt(v.lb)}")
        else:
            lines.append(f" {_fmt(v.lb)} <= {v.name} <= {_fmt(v.ub)}")
    binaries = [v.name for v in model.variables if v.integer]
    if binaries:
        lines.append("Binaries")
        for chunk in range(0, len(binaries), 8):
            lines.append(" " + " ".join(binaries[chunk:chunk + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


# -- schedule <-> point -----------------------------------------------------------


def _service_sequence(sched: Schedule) -> list[int]:
    """Service order over N+: route nodes in order, each sortie customer right
    after its launch node (depot launches first)."""
    launch_at = {s.launch: s for s in sched.sorties}
    seq: list[int] = []
    if 0 in launch_at:
        seq.append(launch_at[0].customer)
    for v in sched.route[1:]:
        seq.append(v)
        if v in launch_at:
            seq.append(launch_at[v].customer)
    return seq


def encode_schedule(model: LinearModel, inst: Instance, sched: Schedule,
                    timeline: Timeline) -> np.ndarray:
    """Natural variable assignment of a schedule: the point every row of the
    matching-mode model must accept."""
    point = np.zeros(len(model.variables))
    for v in model.variables:
        point[model.index[v.name]] = v.lb  # fixed vars sit at their bound
    for h, k in zip(sched.route, sched.route[1:]):
        point[model.var(_x_name(h, k))] = 1.0

    for s in sched.sorties:
        i, j, k = s.as_tuple()
        if model.variant is Variant.DMN2:
            point[model.var(f"gf_{i}_{j}")] = 1.0
            point[model.var(f"gb_{j}_{k}")] = 1.0
        else:
            point[model.var(f"y_{i}_{j}_{k}")] = 1.0

    for v, t in timeline.truck.items():
        point[model.var(f"tT_{v}")] = t
        point[model.var(f"tD_{v}")] = t
    for s, leg in timeline.drone.items():
        point[model.var(f"tD_{s.customer}")] = leg.departure_customer
        point[model.var(f"tT_{s.customer}")] = leg.departure_customer

    if model.variant is Variant.MCBAR:
        seq = _service_sequence(sched)
        rank = {v: pos + 1.0 for pos, v in enumerate(seq)}
        for v, r in rank.items():
            point[model.var(f"u_{v}")] = r
        for i in inst.customers():
            for j in inst.customers():
                if i != j:
                    point[model.var(f"p_{i}_{j}")] = 1.0 if rank[i] < rank[j] else 0.0
    else:
        for v, wv in timeline.wait.items():
            point[model.var(f"w_{v}")] = wv
    return point


def extract_schedule(model: LinearModel, point: np.ndarray) -> Schedule:
    """Decode an integral point into a schedule; raises DecodeError when the
    binaries do not describe a valid structure (a missing-cut signal)."""
    for pos in model.binaries():
        if abs(point[pos] - round(point[pos])) > INTEGRALITY_TOL:
            raise DecodeError("FRACTIONAL", f"{model.variables[pos].name} = {point[pos]!r}")

    succ: dict[int, int] = {}
    used = []
    for v in model.variables:
        if v.family == "x" and point[model.index[v.name]] > 0.5:
            i, j = v.indices
            if i in succ:
                raise DecodeError("BROKEN_FLOW", f"two arcs leave {i}")
            succ[i] = j
            used.append((i, j))
    route = [0]
    seen = {0}
    while route[-1] in succ:
        nxt = succ[route[-1]]
        if nxt in seen:
            raise DecodeError("BROKEN_FLOW", f"route revisits {nxt}")
        route.append(nxt)
        seen.add(nxt)
    if len(route) - 1 != len(used):
        raise DecodeError("SUBTOUR", "truck arcs not all on the depot walk")

    sorties = []
    if model.variant is Variant.DMN2:
        launch_of: dict[int, int] = {}
        land_of: dict[int, int] = {}
        for v in model.variables:
            if point[model.index[v.name]] <= 0.5:
                continue
            if v.family == "gf":
                i, j = v.indices
                if j in launch_of:
                    raise DecodeError("BROKEN_FLOW", f"customer {j} entered twice by drone")
                launch_of[j] = i
            elif v.family == "gb":
                j, k = v.indices
                if j in land_of:
                    raise DecodeError("BROKEN_FLOW", f"customer {j} left twice by drone")
                land_of[j] = k
        if set(launch_of) != set(land_of):
            raise DecodeError("BROKEN_FLOW", "drone arc flow unbalanced")
        sorties = [(launch_of[j], j, land_of[j]) for j in sorted(launch_of)]
    else:
        for v in model.variables:
            if v.family == "y" and point[model.index[v.name]] > 0.5:
                sorties.append(v.indices)

    sched = Schedule.make(route, sorties)
    from .schedule import StructureError, validate_structure
    try:
        validate_structure(model.inst, sched)
    except StructureError as exc:
        raise DecodeError(exc.code, str(exc)) from None
    return sched


@dataclass(frozen=True)
class RowViolation:
    row: str
    tag: str
    amount: float


def check_against_model(inst: Instance, sched: Schedule, mode: WaitMode,
                        tol: float = 1e-7) -> list[RowViolation]:
    """Substitute the schedule's natural assignment into every dmn2 row and
    the lazily separated families, and report whatever is violated.  Empty
    for feasible schedules; an interleaved schedule shows up as a crossing
    cut, an energy breach as an endurance row."""
    from . import cuts as _cuts
    from .schedule import simulate, validate_structure

    model = build(inst, Variant.DMN2, mode)
    validate_structure(inst, sched, check_interleave=False)
    timeline = simulate(inst, sched, mode)
    point = encode_schedule(model, inst, sched, timeline)
    report = [RowViolation(row.name, row.tag, amount)
              for row, amount in model.violated_rows(point, tol)]
    for cut in _cuts.separate_families(model, point):
        report.append(RowViolation(cut.name, cut.family, cut.violation))
    return report
