"""Warm start: greedy truck tour, relocate/swap local search, then repeated
best-sortie insertion.

The truck-only tour is always feasible, so the heuristic never fails.  Each
sortie insertion removes one eligible customer from the route and re-times
the whole schedule through the simulator, so mode-specific endurance and the
non-interleaving discipline are enforced exactly; only strictly improving
insertions are applied, which bounds the loop by the customer count.
"""

from __future__ import annotations

from typing import Optional

from .instance import Instance
from .schedule import InfeasibilityReport, Schedule, Sortie, StructureError, WaitMode, evaluate


def _tour_time(inst: Instance, route: list[int]) -> float:
    return sum(inst.tau_truck(a, b) for a, b in zip(route, route[1:]))


def nearest_neighbor_tour(inst: Instance) -> list[int]:
    route = [0]
    remaining = set(inst.customers())
    while remaining:
        here = route[-1]
        nxt = min(remaining, key=lambda v: (inst.tau_truck(here, v), v))
        route.append(nxt)
        remaining.discard(nxt)
    route.append(inst.end_depot)
    return route


def local_search(inst: Instance, route: list[int]) -> list[int]:
    """First-improvement relocate then swap, cycling until no move helps.
    Ties break on the lexicographically smallest move."""
    route = list(route)
    best = _tour_time(inst, route)
    improved = True
    while improved:
        improved = False
        n = len(route)
        # relocate one customer to another position
        for a in range(1, n - 1):
            for b in range(1, n - 1):
                if b == a:
                    continue
                cand = route[:a] + route[a + 1:]
                cand.insert(b, route[a])
                t = _tour_time(inst, cand)
                if t < best - 1e-9:
                    route, best, improved = cand, t, True
                    break
            if improved:
                break
        if improved:
            continue
        for a in range(1, n - 1):
            for b in range(a + 1, n - 1):
                cand = list(route)
                cand[a], cand[b] = cand[b], cand[a]
                t = _tour_time(inst, cand)
                if t < best - 1e-9:
                    route, best, improved = cand, t, True
                    break
            if improved:
                break
    return route


def _single_insertions(inst: Instance, sched: Schedule, mode: WaitMode):
    """Yield (completion, candidate) for every admissible conversion of one
    routed eligible customer into a sortie on the current route."""
    route = list(sched.route)
    for j in route[1:-1]:
        if j not in inst.drone_eligible:
            continue
        shorter = [v for v in route if v != j]
        for lp in range(len(shorter) - 1):
            for rp in range(lp + 1, len(shorter)):
                sortie = Sortie(shorter[lp], j, shorter[rp])
                cand = Schedule.make(shorter, sched.sorties | {sortie})
                try:
                    result = evaluate(inst, cand, mode)
                except StructureError:
                    continue
                if isinstance(result, InfeasibilityReport):
                    continue
                yield result.completion, cand, (j, sortie.launch, sortie.rendezvous)


def initial_solution(inst: Instance, mode: WaitMode) -> Schedule:
    route = local_search(inst, nearest_neighbor_tour(inst))
    sched = Schedule.make(route)
    current = evaluate(inst, sched, mode).completion
    while True:
        best: Optional[tuple] = None
        for completion, cand, move in _single_insertions(inst, sched, mode):
            if completion < current - 1e-9 and (best is None or
                                                (completion, move) < (best[0], best[2])):
                best = (completion, cand, move)
        if best is None:
            return sched
        current, sched = best[0], best[1]
