"""Brute-force exact solver by pruned enumeration; ground truth for small c.

Enumerates every truck customer subset and order, and for each route every
non-interleaved assignment of the off-route customers to sorties.  Intended
for c <= 8.  Also exposes ``enumerate_feasible``, which the test suite uses
to list every feasible schedule of a tiny instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .instance import Instance, sortie_catalog
from .schedule import InfeasibilityReport, Schedule, Sortie, WaitMode, evaluate


@dataclass(frozen=True)
class OracleResult:
    best: Schedule
    value: float
    explored: int
    proven_optimal: bool


def _assignments(
    inst: Instance,
    route: tuple[int, ...],
    flying: tuple[int, ...],
    catalog,
) -> Iterator[frozenset[Sortie]]:
    """All non-interleaved sortie assignments of ``flying`` onto ``route``.

    Sorties are placed left to right by launch position, so each assignment
    is produced exactly once; a later sortie may launch where the previous
    one landed.
    """

    def rec(remaining: tuple[int, ...], min_pos: int, chosen: tuple[Sortie, ...]):
        if not remaining:
            yield frozenset(chosen)
            return
        for j in remaining:
            rest = tuple(r for r in remaining if r != j)
            for lp in range(min_pos, len(route) - 1):
                for rp in range(lp + 1, len(route)):
                    triplet = (route[lp], j, route[rp])
                    if triplet not in catalog:
                        continue
                    yield from rec(rest, rp, chosen + (Sortie(*triplet),))

    yield from rec(flying, 0, ())


def enumerate_feasible(
    inst: Instance,
    mode: Optional[WaitMode] = None,
    check_energy: bool = True,
) -> Iterator[tuple[Schedule, float]]:
    """Yield (schedule, completion) for structurally valid schedules.

    With ``check_energy`` the energy-infeasible ones are skipped; pass
    ``check_energy=False`` to get every structurally valid schedule with
    its completion time regardless of endurance.
    """
    mode = mode or WaitMode.WAIT
    catalog = sortie_catalog(inst)
    customers = list(inst.customers())
    for routed in itertools.chain.from_iterable(
        itertools.combinations(customers, m) for m in range(len(customers) + 1)
    ):
        flying = tuple(v for v in customers if v not in routed)
        if any(v not in inst.drone_eligible for v in flying):
            continue
        for perm in itertools.permutations(routed):
            route = (0,) + perm + (inst.end_depot,)
            for sorties in _assignments(inst, route, flying, catalog):
                sched = Schedule(route=route, sorties=sorties)
                result = evaluate(inst, sched, mode)
                if isinstance(result, InfeasibilityReport):
                    if check_energy:
                        continue
                    # structurally fine; report the wait-mode completion
                    wait_result = evaluate(inst, sched, WaitMode.WAIT)
                    if isinstance(wait_result, InfeasibilityReport):
                        continue
                    yield sched, wait_result.completion
                else:
                    yield sched, result.completion


def solve_exhaustive(
    inst: Instance,
    mode: WaitMode,
    node_limit: int = 50_000_000,
) -> OracleResult:
    catalog = sortie_catalog(inst)
    customers = list(inst.customers())
    explored = 0
    truncated = False

    # the full truck tour is always feasible, so an incumbent always exists
    best_sched: Optional[Schedule] = None
    best_value = float("inf")
    best_key: Optional[tuple] = None

    def consider(sched: Schedule) -> None:
        nonlocal best_sched, best_value, best_key
        result = evaluate(inst, sched, mode)
        if isinstance(result, InfeasibilityReport):
            return
        value = result.completion
        key = sched.sort_key()
        if value < best_value - 1e-9 or (abs(value - best_value) <= 1e-9 and
                                         (best_key is None or key < best_key)):
            best_sched, best_value, best_key = sched, value, key

    def assign(route: tuple[int, ...], remaining: tuple[int, ...], min_pos: int,
               chosen: tuple[Sortie, ...]) -> None:
        nonlocal explored, truncated
        if truncated:
            return
        explored += 1
        if explored > node_limit:
            truncated = True
            return
        if not remaining:
            consider(Schedule(route=route, sorties=frozenset(chosen)))
            return
        for j in remaining:
            rest = tuple(r for r in remaining if r != j)
            for lp in range(min_pos, len(route) - 1):
                for rp in range(lp + 1, len(route)):
                    triplet = (route[lp], j, route[rp])
                    if triplet not in catalog:
                        continue
                    assign(route, rest, rp, chosen + (Sortie(*triplet),))

    def extend(prefix: list[int], used: set[int], flying: tuple[int, ...],
               partial_time: float) -> None:
        nonlocal explored, truncated
        if truncated:
            return
        explored += 1
        if explored > node_limit:
            truncated = True
            return
        if partial_time > best_value + 1e-9:
            return  # truck travel alone already beats any extension
        routed_left = [v for v in customers if v not in used and v not in flying]
        if not routed_left:
            route = tuple(prefix) + (inst.end_depot,)
            assign(route, flying, 0, ())
            return
        for v in routed_left:
            extend(prefix + [v], used | {v}, flying,
                   partial_time + inst.tau_truck(prefix[-1], v))

    for m in range(len(customers) + 1):
        for flying in itertools.combinations(customers, m):
            if any(v not in inst.drone_eligible for v in flying):
                continue
            extend([0], set(), flying, 0.0)

    assert best_sched is not None, "the full truck tour is always feasible"
    return OracleResult(best=best_sched, value=best_value, explored=explored,
                        proven_optimal=not truncated)
