"""Solution objects and the operational timing semantics both wait modes share.

A schedule is a truck route (0 .. c+1) plus a set of non-interleaved drone
sorties serving the off-route customers.  ``evaluate`` runs the forward
simulation that every formulation must agree with: it is the ultimate
feasibility arbiter used by the oracle, the heuristic and the branch-and-cut
incumbent check.

Timing rules:
  * the launch service sigma_l is charged when the truck departs the launch
    node (never at the depot, where the drone is prepared offline) and the
    drone leaves together with the truck;
  * the rendezvous service sigma_r is charged on arrival at the rendezvous
    node and always counts against the endurance;
  * in Wait mode the drone may idle on the ground at the customer for free,
    so a sortie's energy is exactly tau_D(i,j) + tau_D(j,k) + sigma_r;
  * in NoWait mode every minute between leaving the launch node and becoming
    available at the rendezvous counts, including any hover at the rendezvous.
"""

from __future__ import annotations

import enum
import io
import json
from dataclasses import dataclass
from typing import Union

from .instance import Instance


class WaitMode(enum.Enum):
    WAIT = "wait"
    NOWAIT = "nowait"

    @classmethod
    def parse(cls, text: str) -> "WaitMode":
        return cls(text.strip().lower().replace("-", "").replace("_", ""))


class StructureError(ValueError):
    """A schedule violates a structural invariant; ``code`` identifies which."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True, order=True)
class Sortie:
    launch: int
    customer: int
    rendezvous: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.launch, self.customer, self.rendezvous)


@dataclass(frozen=True)
class Schedule:
    route: tuple[int, ...]
    sorties: frozenset[Sortie]

    @staticmethod
    def make(route: list[int] | tuple[int, ...],
             sorties: list[tuple[int, int, int]] | frozenset[Sortie] = ()) -> "Schedule":
        if isinstance(sorties, frozenset):
            ss = sorties
        else:
            ss = frozenset(Sortie(*s) if not isinstance(s, Sortie) else s for s in sorties)
        return Schedule(route=tuple(route), sorties=ss)

    def sorted_sorties(self) -> list[Sortie]:
        return sorted(self.sorties)

    def sort_key(self) -> tuple:
        """Reproducible tie-break key: (route, sorted sortie triplets)."""
        return (self.route, tuple(s.as_tuple() for s in self.sorted_sorties()))


@dataclass(frozen=True)
class DroneLeg:
    """Times of one sortie: leave the launch node, reach the customer,
    leave the customer, become available at the rendezvous."""

    departure: float
    arrival_customer: float
    departure_customer: float
    rendezvous_available: float


@dataclass(frozen=True)
class Timeline:
    truck: dict[int, float]           # availability per route node
    drone: dict[Sortie, DroneLeg]
    wait: dict[int, float]            # truck wait, recorded at the rendezvous node
    completion: float


@dataclass(frozen=True)
class InfeasibilityReport:
    code: str                         # "ENERGY_EXCEEDED"
    sortie: Sortie
    energy: float
    endurance: float

    def __str__(self) -> str:
        i, j, k = self.sortie.as_tuple()
        return (f"{self.code}: sortie <{i},{j},{k}> needs {self.energy:.6f} min "
                f"but endurance is {self.endurance:.6f}")


def validate_structure(inst: Instance, sched: Schedule, check_interleave: bool = True) -> None:
    """Raise StructureError on the first violated schedule invariant.

    ``check_interleave=False`` keeps the per-sortie checks but skips the
    non-interleaving rule; the cross-validation harness uses it to time a
    deliberately crossing schedule and show which model rows reject it.
    """
    route = sched.route
    if len(route) < 2 or route[0] != 0 or route[-1] != inst.end_depot:
        raise StructureError("ROUTE_ENDPOINTS", "route must start at 0 and end at c+1")
    if len(set(route)) != len(route):
        raise StructureError("ROUTE_REPEAT", "route visits a node twice")
    for v in route[1:-1]:
        if v not in inst.customers():
            raise StructureError("ROUTE_NODE", f"{v} is not a customer")
    pos = {v: p for p, v in enumerate(route)}

    served = {v: 1 for v in route[1:-1]}
    launches: set[int] = set()
    landings: set[int] = set()
    for s in sched.sorted_sorties():
        i, j, k = s.as_tuple()
        if len({i, j, k}) != 3:
            raise StructureError("SORTIE_DISTINCT", f"<{i},{j},{k}> repeats a node")
        if j not in inst.drone_eligible:
            raise StructureError("SORTIE_ELIGIBLE", f"customer {j} is not drone-eligible")
        if i not in pos or k not in pos:
            raise StructureError("SORTIE_ON_ROUTE", f"<{i},{j},{k}> endpoints must be on the route")
        if pos[i] >= pos[k]:
            raise StructureError("SORTIE_ORDER", f"launch {i} must precede rendezvous {k}")
        if i in launches:
            raise StructureError("LAUNCH_CLASH", f"two sorties launch at {i}")
        if k in landings:
            raise StructureError("LAND_CLASH", f"two sorties land at {k}")
        launches.add(i)
        landings.add(k)
        served[j] = served.get(j, 0) + 1
    for v in inst.customers():
        if served.get(v, 0) != 1:
            raise StructureError("COVERAGE", f"customer {v} served {served.get(v, 0)} times")

    if check_interleave:
        spans = sorted((pos[s.launch], pos[s.rendezvous]) for s in sched.sorties)
        for (a, b), (a2, _b2) in zip(spans, spans[1:]):
            if a2 < b:
                raise StructureError("INTERLEAVE", "a sortie launches before the previous one returns")


def simulate(inst: Instance, sched: Schedule, mode: WaitMode) -> Timeline:
    """The forward pass behind ``evaluate``, without validation or the energy
    test.  Callers must guarantee (at least) that sortie endpoints sit on the
    route in launch-before-rendezvous order."""
    route = sched.route
    launch_at = {s.launch: s for s in sched.sorties}
    land_at = {s.rendezvous: s for s in sched.sorties}

    truck: dict[int, float] = {0: 0.0}
    wait: dict[int, float] = {v: 0.0 for v in route}
    for h, k in zip(route, route[1:]):
        leave = truck[h]
        if h in launch_at and h != 0:
            leave += inst.sigma_l
        arrival = leave + inst.tau_truck(h, k)
        base = arrival + (inst.sigma_r if k in land_at else 0.0)
        if k in land_at:
            s = land_at[k]
            launch_departure = truck[s.launch] + (inst.sigma_l if s.launch != 0 else 0.0)
            drone_min = launch_departure + inst.sortie_energy(*s.as_tuple())
            wait[k] = max(0.0, drone_min - base)
            truck[k] = base + wait[k]
        else:
            truck[k] = base

    legs: dict[Sortie, DroneLeg] = {}
    for s in sched.sorted_sorties():
        i, j, k = s.as_tuple()
        launch_departure = truck[i] + (inst.sigma_l if i != 0 else 0.0)
        arrival_j = launch_departure + inst.tau_drone(i, j)
        available_k = truck[k]
        if mode is WaitMode.WAIT:
            # idle on the ground as late as possible, land just in time
            depart_j = available_k - inst.sigma_r - inst.tau_drone(j, k)
        else:
            depart_j = arrival_j
        legs[s] = DroneLeg(launch_departure, arrival_j, depart_j, available_k)
    return Timeline(truck=truck, drone=legs, wait=wait, completion=truck[inst.end_depot])


def sortie_energy_used(inst: Instance, timeline: Timeline, s: Sortie, mode: WaitMode) -> float:
    """Energy drawn by one sortie: the fixed flight-plus-rendezvous span in
    Wait mode, the whole launch-to-availability span in NoWait mode."""
    if mode is WaitMode.WAIT:
        return inst.sortie_energy(*s.as_tuple())
    leg = timeline.drone[s]
    return leg.rendezvous_available - leg.departure


def evaluate(inst: Instance, sched: Schedule, mode: WaitMode) -> Union[Timeline, InfeasibilityReport]:
    """Forward-simulate the schedule; componentwise-minimal feasible times.

    Returns the Timeline, or an InfeasibilityReport when some sortie exceeds
    the endurance in the requested mode.  Structural violations raise.
    """
    validate_structure(inst, sched)
    timeline = simulate(inst, sched, mode)
    for s in sched.sorted_sorties():
        energy = sortie_energy_used(inst, timeline, s, mode)
        if energy > inst.endurance + 1e-9:
            return InfeasibilityReport("ENERGY_EXCEEDED", s, energy, inst.endurance)
    return timeline


def objective(inst: Instance, sched: Schedule, mode: WaitMode) -> float:
    """Completion time of a feasible schedule.  Equal, by construction, to
    truck travel + sigma_r per sortie + sigma_l per off-depot sortie + waits."""
    result = evaluate(inst, sched, mode)
    if isinstance(result, InfeasibilityReport):
        raise ValueError(str(result))
    return result.completion


def decomposition(inst: Instance, sched: Schedule, timeline: Timeline) -> float:
    """Explicit objective components; must reproduce Timeline.completion."""
    total = sum(inst.tau_truck(h, k) for h, k in zip(sched.route, sched.route[1:]))
    total += inst.sigma_r * len(sched.sorties)
    total += inst.sigma_l * sum(1 for s in sched.sorties if s.launch != 0)
    total += sum(timeline.wait.values())
    return total


# -- serialization ------------------------------------------------------------


def schedule_to_dict(sched: Schedule) -> dict:
    return {
        "route": list(sched.route),
        "sorties": [list(s.as_tuple()) for s in sched.sorted_sorties()],
    }


def write_schedule(sched: Schedule) -> str:
    return json.dumps(schedule_to_dict(sched), indent=1)


def read_schedule(text: str) -> Schedule:
    try:
        data = json.loads(text)
        route = [int(v) for v in data["route"]]
        sorties = [tuple(int(x) for x in s) for s in data.get("sorties", [])]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed schedule file: {exc}") from None
    if any(len(s) != 3 for s in sorties):
        raise ValueError("malformed schedule file: sorties must be [i, j, k] triplets")
    return Schedule.make(route, sorties)


def timeline_to_csv(sched: Schedule, timeline: Timeline) -> str:
    """Debug dump: one row per route node plus one per sortie."""
    out = io.StringIO()
    out.write("kind,node_or_sortie,truck_time,wait,drone_departure,drone_available\n")
    for v in sched.route:
        out.write(f"truck,{v},{timeline.truck[v]:.6f},{timeline.wait[v]:.6f},,\n")
    for s in sched.sorted_sorties():
        leg = timeline.drone[s]
        i, j, k = s.as_tuple()
        out.write(f"sortie,{i}-{j}-{k},,,{leg.departure:.6f},{leg.rendezvous_available:.6f}\n")
    return out.getvalue()
