"""Lazy constraint families and their separation over the residual graph.

Three families are separated against a fractional (or integral) point:

  * SEC   - subtour elimination on the truck arcs, separated by max-flow /
            min-cut from the depot (pair subtours are explicit model rows);
  * TCS / TCS2  - tournament crossing-sortie elimination: two launches on a
            truck path with no rendezvous in between;
  * TBS / TBS2  - tournament backward-sortie elimination: sortie mass landing
            on a depot-rooted path from a launch outside it.

The two-index forms differ from the three-index ones where the
launch-rendezvous pairing is not expressible: TCS2 carries a compensating
rendezvous-mass term and TBS2 is stated per customer, so that every emitted
row is valid for every feasible integer schedule (the walk only emits rows
it can certify as violated at the separating point).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .model import LinearModel, Variant

RESIDUAL_EPS = 1e-6
VIOLATION_TOL = 1e-4
MAX_CUTS_PER_FAMILY = 50
_MAX_PATHS_PER_ROOT = 20_000


@dataclass(frozen=True)
class Cut:
    name: str
    family: str                  # SEC, TCS, TBS, TCS2, TBS2, CSEC, BSEC
    coeffs: dict[int, float]
    sense: str                   # always "<="
    rhs: float
    witness: tuple
    violation: float

    def key(self) -> tuple:
        return (self.family, self.witness)


@dataclass
class ResidualGraph:
    nodes: list[int]
    arcs: dict[tuple[int, int], float]            # truck arcs with x > eps
    adjacency: dict[int, list[int]]
    launch_total: dict[int, float]                # sortie-out weight per node
    land_total: dict[int, float]                  # sortie-in weight per node
    # detail maps (variant specific, empty dicts where not applicable)
    y_from: dict[int, list[tuple[int, int, float]]]   # launch -> [(j, k, val)]
    y_into: dict[int, list[tuple[int, int, float]]]   # rendezvous -> [(i, j, val)]
    gf_from: dict[int, dict[int, float]]              # launch -> {customer: val}
    gf_into: dict[int, dict[int, float]]              # customer -> {launch: val}
    gb_into: dict[int, dict[int, float]]              # rendezvous -> {customer: val}


def residual_graph(model: LinearModel, point: np.ndarray, eps: float = RESIDUAL_EPS) -> ResidualGraph:
    inst = model.inst
    arcs: dict[tuple[int, int], float] = {}
    launch_total: dict[int, float] = {}
    land_total: dict[int, float] = {}
    y_from: dict[int, list[tuple[int, int, float]]] = {}
    y_into: dict[int, list[tuple[int, int, float]]] = {}
    gf_from: dict[int, dict[int, float]] = {}
    gf_into: dict[int, dict[int, float]] = {}
    gb_into: dict[int, dict[int, float]] = {}

    for pos, v in enumerate(model.variables):
        val = float(point[pos])
        if val <= eps:
            continue
        if v.family == "x":
            arcs[v.indices] = val
        elif v.family == "y":
            i, j, k = v.indices
            launch_total[i] = launch_total.get(i, 0.0) + val
            land_total[k] = land_total.get(k, 0.0) + val
            y_from.setdefault(i, []).append((j, k, val))
            y_into.setdefault(k, []).append((i, j, val))
        elif v.family == "gf":
            i, j = v.indices
            launch_total[i] = launch_total.get(i, 0.0) + val
            gf_from.setdefault(i, {})[j] = val
            gf_into.setdefault(j, {})[i] = val
        elif v.family == "gb":
            j, k = v.indices
            land_total[k] = land_total.get(k, 0.0) + val
            gb_into.setdefault(k, {})[j] = val

    adjacency: dict[int, list[int]] = {}
    for (i, j) in sorted(arcs):
        adjacency.setdefault(i, []).append(j)
    return ResidualGraph(
        nodes=list(inst.nodes()), arcs=arcs, adjacency=adjacency,
        launch_total=launch_total, land_total=land_total,
        y_from=y_from, y_into=y_into,
        gf_from=gf_from, gf_into=gf_into, gb_into=gb_into,
    )


def _top_cuts(cuts: list[Cut], limit: int) -> list[Cut]:
    seen = set()
    unique = []
    for cut in sorted(cuts, key=lambda c: (-c.violation, c.family, c.witness)):
        if cut.key() in seen:
            continue
        seen.add(cut.key())
        unique.append(cut)
    return unique[:limit]


# -- subtour elimination -------------------------------------------------------


def _min_cut(n_nodes: int, arcs: dict[tuple[int, int], float],
             source: int, sink: int) -> tuple[float, set[int]]:
    """Edmonds-Karp max-flow on the tiny residual graph; returns the cut
    value and the sink-side node set."""
    cap = [[0.0] * n_nodes for _ in range(n_nodes)]
    for (i, j), val in arcs.items():
        cap[i][j] += val
    adj: list[list[int]] = [[] for _ in range(n_nodes)]
    for i, j in arcs:
        adj[i].append(j)
        adj[j].append(i)
    flow = 0.0
    while True:
        parent = [-1] * n_nodes
        parent[source] = source
        queue = deque([source])
        while queue and parent[sink] < 0:
            u = queue.popleft()
            for v in adj[u]:
                if parent[v] < 0 and cap[u][v] > RESIDUAL_EPS:
                    parent[v] = u
                    queue.append(v)
        if parent[sink] < 0:
            break
        push = float("inf")
        v = sink
        while v != source:
            push = min(push, cap[parent[v]][v])
            v = parent[v]
        v = sink
        while v != source:
            cap[parent[v]][v] -= push
            cap[v][parent[v]] += push
            v = parent[v]
        flow += push
    reachable = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in reachable and cap[u][v] > RESIDUAL_EPS:
                reachable.add(v)
                queue.append(v)
    return flow, set(range(n_nodes)) - reachable


def separate_sec(model: LinearModel, point: np.ndarray,
                 max_cuts: int = MAX_CUTS_PER_FAMILY) -> list[Cut]:
    """Max-flow/min-cut from the depot toward every fractionally-entered
    customer; emits the classic set rows for |S| > 2."""
    inst = model.inst
    rg = residual_graph(model, point)
    if not rg.arcs:
        return []
    n_nodes = inst.c + 2

    inflow: dict[int, float] = {}
    for (i, j), val in rg.arcs.items():
        inflow[j] = inflow.get(j, 0.0) + val

    cuts: list[Cut] = []
    seen_sets: set[frozenset[int]] = set()
    for t in inst.customers():
        flow_needed = inflow.get(t, 0.0)
        if flow_needed <= RESIDUAL_EPS:
            continue
        cut_value, sink_side = _min_cut(n_nodes, rg.arcs, 0, t)
        if cut_value >= flow_needed - VIOLATION_TOL:
            continue
        s_set = set(sink_side)
        # drop nodes that contribute nothing inside S; they only weaken the row
        while True:
            keep = {v for v in s_set
                    if any((v, u) in rg.arcs or (u, v) in rg.arcs for u in s_set if u != v)}
            if keep == s_set:
                break
            s_set = keep
        if t not in s_set or len(s_set) < 3 or 0 in s_set:
            continue
        fs = frozenset(s_set)
        if fs in seen_sets:
            continue
        seen_sets.add(fs)
        coeffs: dict[int, float] = {}
        lhs = 0.0
        for i in sorted(s_set):
            for j in sorted(s_set):
                if i != j and f"x_{i}_{j}" in model.index:
                    pos = model.var(f"x_{i}_{j}")
                    coeffs[pos] = 1.0
                    lhs += point[pos]
        rhs = float(len(s_set) - 1)
        violation = lhs - rhs
        if violation < VIOLATION_TOL:
            continue
        witness = tuple(sorted(s_set))
        cuts.append(Cut(name=f"sec_{'_'.join(map(str, witness))}", family="SEC",
                        coeffs=coeffs, sense="<=", rhs=rhs, witness=witness,
                        violation=violation))
    return _top_cuts(cuts, max_cuts)


# -- path walks ------------------------------------------------------------------


def _iter_paths(rg: ResidualGraph, root: int):
    """Depth-first simple paths (length >= 2) along residual truck arcs."""
    budget = [_MAX_PATHS_PER_ROOT]
    path = [root]
    on_path = {root}

    def rec():
        tail = path[-1]
        for nxt in rg.adjacency.get(tail, []):
            if nxt in on_path or budget[0] <= 0:
                continue
            path.append(nxt)
            on_path.add(nxt)
            budget[0] -= 1
            yield list(path)
            yield from rec()
            on_path.discard(nxt)
            path.pop()

    yield from rec()


def _tournament_coeffs(model: LinearModel, path: list[int]) -> dict[int, float]:
    coeffs: dict[int, float] = {}
    for a_pos in range(len(path) - 1):
        for b_pos in range(a_pos + 1, len(path)):
            name = f"x_{path[a_pos]}_{path[b_pos]}"
            if name in model.index:
                coeffs[model.var(name)] = 1.0
    return coeffs


def _consecutive_coeffs(model: LinearModel, path: list[int]) -> dict[int, float]:
    coeffs: dict[int, float] = {}
    for a, b in zip(path, path[1:]):
        name = f"x_{a}_{b}"
        if name in model.index:
            coeffs[model.var(name)] = 1.0
    return coeffs


def _path_x_sum(rg: ResidualGraph, path: list[int], tournament: bool) -> float:
    if tournament:
        total = 0.0
        for a_pos in range(len(path) - 1):
            for b_pos in range(a_pos + 1, len(path)):
                total += rg.arcs.get((path[a_pos], path[b_pos]), 0.0)
        return total
    return sum(rg.arcs.get((a, b), 0.0) for a, b in zip(path, path[1:]))


# -- crossing sorties --------------------------------------------------------------


def separate_crossing(model: LinearModel, point: np.ndarray, tournament: bool = True,
                      max_cuts: int = MAX_CUTS_PER_FAMILY) -> list[Cut]:
    """Walk residual truck paths from every launching node; a second launch at
    the path end with no rendezvous mass inside flags a crossing."""
    inst = model.inst
    rg = residual_graph(model, point)
    two_index = model.variant is Variant.DMN2
    family = ("TCS2" if two_index else ("TCS" if tournament else "CSEC"))

    cuts: list[Cut] = []
    roots = sorted(i for i in inst.launch_nodes() if rg.launch_total.get(i, 0.0) > RESIDUAL_EPS)
    for root in roots:
        for path in _iter_paths(rg, root):
            end = path[-1]
            if end not in inst.customers():
                continue
            if rg.launch_total.get(end, 0.0) <= RESIDUAL_EPS:
                continue
            in_path = set(path)
            xsum = _path_x_sum(rg, path, tournament)
            if two_index:
                a1 = sum(v for j, v in rg.gf_from.get(root, {}).items() if j not in in_path)
                a2 = sum(v for j, v in rg.gf_from.get(end, {}).items() if j not in in_path)
                rmass = sum(rg.land_total.get(k, 0.0) for k in path[1:])
                lhs = xsum + a1 + a2 - rmass
            else:
                a1 = sum(v for (j, k, v) in rg.y_from.get(root, []) if k not in in_path)
                a2 = sum(v for (_j, _k, v) in rg.y_from.get(end, []))
                lhs = xsum + a1 + a2
            rhs = float(len(path))
            if lhs <= rhs + VIOLATION_TOL:
                continue

            coeffs = (_tournament_coeffs(model, path) if tournament
                      else _consecutive_coeffs(model, path))
            if two_index:
                for v in model.variables:
                    if v.family == "gf":
                        i, j = v.indices
                        if (i == root or i == end) and j not in in_path:
                            coeffs[model.index[v.name]] = 1.0
                    elif v.family == "gb":
                        _j, k = v.indices
                        if k in in_path and k != root:
                            coeffs[model.index[v.name]] = -1.0
            else:
                for v in model.variables:
                    if v.family != "y":
                        continue
                    i, _j, k = v.indices
                    if (i == root and k not in in_path) or i == end:
                        coeffs[model.index[v.name]] = 1.0
            violation = float(sum(c * point[pos] for pos, c in coeffs.items()) - rhs)
            if violation < VIOLATION_TOL:
                continue
            witness = tuple(path)
            cuts.append(Cut(name=f"{family.lower()}_{'_'.join(map(str, witness))}",
                            family=family, coeffs=coeffs, sense="<=", rhs=rhs,
                            witness=witness, violation=violation))
    return _top_cuts(cuts, max_cuts)


# -- backward sorties ---------------------------------------------------------------


def separate_backward(model: LinearModel, point: np.ndarray, tournament: bool = True,
                      max_cuts: int = MAX_CUTS_PER_FAMILY) -> list[Cut]:
    """Walk depot-rooted residual paths; sortie mass landing on the path from
    a launch outside it flags a backward sortie."""
    inst = model.inst
    rg = residual_graph(model, point)
    two_index = model.variant is Variant.DMN2
    family = ("TBS2" if two_index else ("TBS" if tournament else "BSEC"))

    cuts: list[Cut] = []
    for path in _iter_paths(rg, 0):
        end = path[-1]
        in_path = set(path)
        xsum = _path_x_sum(rg, path, tournament)
        if two_index:
            for h, gb_val in sorted(rg.gb_into.get(end, {}).items()):
                if gb_val <= RESIDUAL_EPS or h in in_path:
                    continue
                outside_launch = sum(v for a, v in rg.gf_into.get(h, {}).items()
                                     if a not in in_path)
                lhs = xsum + gb_val + outside_launch
                rhs = float(len(path))
                if lhs <= rhs + VIOLATION_TOL:
                    continue
                coeffs = (_tournament_coeffs(model, path) if tournament
                          else _consecutive_coeffs(model, path))
                name_gb = f"gb_{h}_{end}"
                coeffs[model.var(name_gb)] = coeffs.get(model.var(name_gb), 0.0) + 1.0
                for v in model.variables:
                    if v.family == "gf" and v.indices[1] == h and v.indices[0] not in in_path:
                        coeffs[model.index[v.name]] = 1.0
                violation = float(sum(c * point[pos] for pos, c in coeffs.items()) - rhs)
                if violation < VIOLATION_TOL:
                    continue
                witness = tuple(path) + (h,)
                cuts.append(Cut(name=f"{family.lower()}_{'_'.join(map(str, witness))}",
                                family=family, coeffs=coeffs, sense="<=", rhs=rhs,
                                witness=witness, violation=violation))
        else:
            if end not in inst.customers():
                continue
            if tournament:
                mass = sum(v for k in path[1:] for (i, _j, v) in rg.y_into.get(k, [])
                           if i not in in_path)
            else:
                mass = sum(v for (i, _j, v) in rg.y_into.get(end, []) if i not in in_path)
            lhs = xsum + mass
            rhs = float(len(path) - 1)
            if lhs <= rhs + VIOLATION_TOL:
                continue
            coeffs = (_tournament_coeffs(model, path) if tournament
                      else _consecutive_coeffs(model, path))
            for v in model.variables:
                if v.family != "y":
                    continue
                i, _j, k = v.indices
                if i in in_path:
                    continue
                if (tournament and k in in_path) or (not tournament and k == end):
                    coeffs[model.index[v.name]] = 1.0
            violation = float(sum(c * point[pos] for pos, c in coeffs.items()) - rhs)
            if violation < VIOLATION_TOL:
                continue
            witness = tuple(path)
            cuts.append(Cut(name=f"{family.lower()}_{'_'.join(map(str, witness))}",
                            family=family, coeffs=coeffs, sense="<=", rhs=rhs,
                            witness=witness, violation=violation))
    return _top_cuts(cuts, max_cuts)


def separate_families(model: LinearModel, point: np.ndarray, tournament: bool = True,
                      max_cuts: int = MAX_CUTS_PER_FAMILY) -> list[Cut]:
    """All families in separation order: SEC, then crossing, then backward."""
    cuts = separate_sec(model, point, max_cuts)
    cuts += separate_crossing(model, point, tournament, max_cuts)
    cuts += separate_backward(model, point, tournament, max_cuts)
    return cuts


def cut_satisfied_by(cut: Cut, point: np.ndarray, tol: float = VIOLATION_TOL) -> bool:
    lhs = sum(c * point[pos] for pos, c in cut.coeffs.items())
    return lhs <= cut.rhs + tol
