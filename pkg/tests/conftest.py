import random

import pytest

from fstsp.instance import Instance, generate_instance, sortie_catalog
from fstsp.schedule import InfeasibilityReport, Schedule, Sortie, WaitMode, evaluate


def make_tiny_instance(c=1, truck=None, drone=None, sigma_l=1.0, sigma_r=1.0,
                       endurance=20.0, eligible=None) -> Instance:
    """Hand-set instance; matrices given as dense (c+2)x(c+2) lists of times
    (diagonal ignored)."""
    n = c + 2

    def clean(mat):
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                row.append(None if i == j else float(mat[i][j]))
            out.append(tuple(row))
        return tuple(out)

    if truck is None:
        truck = [[0.0] * n for _ in range(n)]
    if drone is None:
        drone = [[0.0] * n for _ in range(n)]
    truck = [list(r) for r in truck]
    drone = [list(r) for r in drone]
    truck[0][n - 1] = drone[0][n - 1] = 0.0
    return Instance(
        c=c,
        drone_eligible=frozenset(eligible if eligible is not None else range(1, c + 1)),
        truck_time=clean(truck),
        drone_time=clean(drone),
        sigma_l=sigma_l,
        sigma_r=sigma_r,
        endurance=endurance,
    )


def random_feasible_schedule(inst, rng: random.Random, mode: WaitMode):
    """A uniform-ish random structurally-and-energy feasible schedule with
    its timeline; falls back to the full truck tour."""
    catalog = sortie_catalog(inst)
    customers = list(inst.customers())
    for _attempt in range(80):
        flyable = [j for j in customers if j in inst.drone_eligible]
        rng.shuffle(flyable)
        flying = set(flyable[: rng.randint(0, len(flyable))])
        routed = [v for v in customers if v not in flying]
        rng.shuffle(routed)
        route = [0] + routed + [inst.end_depot]
        sorties = []
        min_pos = 0
        ok = True
        for j in rng.sample(sorted(flying), len(flying)):
            options = [(lp, rp)
                       for lp in range(min_pos, len(route) - 1)
                       for rp in range(lp + 1, len(route))
                       if (route[lp], j, route[rp]) in catalog]
            if not options:
                ok = False
                break
            lp, rp = options[rng.randrange(len(options))]
            sorties.append(Sortie(route[lp], j, route[rp]))
            min_pos = rp
        if not ok:
            continue
        sched = Schedule.make(route, frozenset(sorties))
        result = evaluate(inst, sched, mode)
        if not isinstance(result, InfeasibilityReport):
            return sched, result
    sched = Schedule.make([0] + customers + [inst.end_depot])
    return sched, evaluate(inst, sched, mode)


@pytest.fixture
def small_instance():
    return generate_instance(seed=1, c=4, depot_pos="a", endurance=20,
                             drone_speed=25, eligible_ratio=0.9)
