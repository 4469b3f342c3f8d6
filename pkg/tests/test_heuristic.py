import pytest
from conftest import make_tiny_instance

from fstsp.heuristic import initial_solution, local_search, nearest_neighbor_tour
from fstsp.instance import generate_instance
from fstsp.oracle import solve_exhaustive
from fstsp.schedule import InfeasibilityReport, Schedule, Sortie, WaitMode, evaluate


def _tour_time(inst, route):
    return sum(inst.tau_truck(a, b) for a, b in zip(route, route[1:]))


def test_all_ineligible_gives_pure_tour():
    inst = make_tiny_instance(c=3, truck=[[0, 5, 9, 4, 0], [5, 0, 3, 7, 5],
                                          [9, 3, 0, 2, 9], [4, 7, 2, 0, 4],
                                          [0, 5, 9, 4, 0]], eligible=[])
    sched = initial_solution(inst, WaitMode.WAIT)
    assert not sched.sorties
    nn = nearest_neighbor_tour(inst)
    assert _tour_time(inst, list(sched.route)) <= _tour_time(inst, nn) + 1e-9


def test_local_search_never_worsens():
    for seed in range(10):
        inst = generate_instance(seed=seed, c=6, depot_pos="b", endurance=20,
                                 drone_speed=25, eligible_ratio=0.8)
        nn = nearest_neighbor_tour(inst)
        improved = local_search(inst, nn)
        assert _tour_time(inst, improved) <= _tour_time(inst, nn) + 1e-9
        assert sorted(improved) == sorted(nn)


def test_feasible_and_bounded_by_oracle():
    for seed in range(8):
        inst = generate_instance(seed=seed, c=6, depot_pos="abcd"[seed % 4],
                                 endurance=20, drone_speed=(15, 25, 35)[seed % 3],
                                 eligible_ratio=0.8)
        for mode in WaitMode:
            sched = initial_solution(inst, mode)
            result = evaluate(inst, sched, mode)
            assert not isinstance(result, InfeasibilityReport)
            oracle = solve_exhaustive(inst, mode)
            assert result.completion >= oracle.value - 1e-9


def test_single_customer_fast_drone_uses_depot_sortie():
    truck = [[0, 10, 0], [10, 0, 10], [0, 10, 0]]
    drone = [[0, 2, 0], [2, 0, 2], [0, 2, 0]]
    inst = make_tiny_instance(c=1, truck=truck, drone=drone, endurance=20)
    sched = initial_solution(inst, WaitMode.WAIT)
    assert sched.route == (0, 2)
    assert sched.sorties == frozenset({Sortie(0, 1, 2)})
    assert evaluate(inst, sched, WaitMode.WAIT).completion == pytest.approx(5.0)


def test_applies_improving_sortie_whenever_one_exists():
    # exhaustive single-insertion enumeration: if any insertion on the local
    # search tour improves, the heuristic must end strictly better than that tour
    for seed in range(10):
        inst = generate_instance(seed=seed, c=5, depot_pos="c", endurance=40,
                                 drone_speed=35, eligible_ratio=0.8)
        for mode in WaitMode:
            tour = local_search(inst, nearest_neighbor_tour(inst))
            tour_sched = Schedule.make(tour)
            tour_value = evaluate(inst, tour_sched, mode).completion
            exists_improving = False
            for j in tour[1:-1]:
                if j not in inst.drone_eligible:
                    continue
                shorter = [v for v in tour if v != j]
                for lp in range(len(shorter) - 1):
                    for rp in range(lp + 1, len(shorter)):
                        cand = Schedule.make(shorter, [(shorter[lp], j, shorter[rp])])
                        result = evaluate(inst, cand, mode)
                        if not isinstance(result, InfeasibilityReport) and \
                                result.completion < tour_value - 1e-9:
                            exists_improving = True
            final = evaluate(inst, initial_solution(inst, mode), mode).completion
            if exists_improving:
                assert final < tour_value - 1e-9
            assert final <= tour_value + 1e-9


def test_each_sortie_serves_distinct_customer():
    inst = generate_instance(seed=3, c=7, depot_pos="a", endurance=40,
                             drone_speed=35, eligible_ratio=0.9)
    sched = initial_solution(inst, WaitMode.WAIT)
    flown = [s.customer for s in sched.sorties]
    assert len(flown) == len(set(flown))
    assert len(sched.sorties) <= inst.c
