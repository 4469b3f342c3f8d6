import pytest
from conftest import make_tiny_instance

from fstsp.instance import generate_instance
from fstsp.oracle import enumerate_feasible, solve_exhaustive
from fstsp.schedule import Schedule, WaitMode, evaluate


def test_single_customer_two_candidates():
    # tour takes 8; depot sortie finishes in 5+5+1 = 11 -> tour wins
    truck = [[0, 4, 0], [4, 0, 4], [0, 4, 0]]
    drone = [[0, 5, 0], [5, 0, 5], [0, 5, 0]]
    inst = make_tiny_instance(c=1, truck=truck, drone=drone, endurance=20)
    res = solve_exhaustive(inst, WaitMode.WAIT)
    assert res.value == pytest.approx(8.0)
    assert res.best.route == (0, 1, 2) and not res.best.sorties
    # make the drone fast enough and the sortie wins
    drone_fast = [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    inst2 = make_tiny_instance(c=1, truck=truck, drone=drone_fast, endurance=20)
    res2 = solve_exhaustive(inst2, WaitMode.WAIT)
    assert res2.value == pytest.approx(3.0)  # 1 + 1 + sigma_r
    assert res2.best.route == (0, 2)


def test_value_is_evaluation_of_best():
    inst = generate_instance(seed=3, c=4, depot_pos="c", endurance=20,
                             drone_speed=25, eligible_ratio=0.9)
    for mode in WaitMode:
        res = solve_exhaustive(inst, mode)
        assert res.proven_optimal
        assert evaluate(inst, res.best, mode).completion == pytest.approx(res.value)


def test_mode_dominance():
    inst = generate_instance(seed=3, c=4, depot_pos="a", endurance=20,
                             drone_speed=25, eligible_ratio=0.9)
    wait = solve_exhaustive(inst, WaitMode.WAIT)
    nowait = solve_exhaustive(inst, WaitMode.NOWAIT)
    assert wait.value <= nowait.value + 1e-9


def test_optimum_beats_truck_only_tour():
    for seed in range(5):
        inst = generate_instance(seed=seed, c=5, depot_pos="b", endurance=40,
                                 drone_speed=35, eligible_ratio=0.8)
        res = solve_exhaustive(inst, WaitMode.WAIT)
        best_tour = min(
            evaluate(inst, Schedule.make((0,) + perm + (inst.end_depot,)), WaitMode.WAIT).completion
            for perm in __import__("itertools").permutations(inst.customers())
        )
        assert res.value <= best_tour + 1e-9


def test_removing_customer_never_increases_optimum():
    import dataclasses
    inst = generate_instance(seed=6, c=4, depot_pos="a", endurance=20,
                             drone_speed=25, eligible_ratio=1.0)
    base = solve_exhaustive(inst, WaitMode.WAIT).value
    # drop customer c by slicing the matrices (relabel c+1 down)
    keep = [0, 1, 2, 3, 5]
    truck = tuple(tuple(inst.truck_time[i][j] for j in keep) for i in keep)
    drone = tuple(tuple(inst.drone_time[i][j] for j in keep) for i in keep)
    smaller = dataclasses.replace(inst, c=3, truck_time=truck, drone_time=drone,
                                  drone_eligible=frozenset({1, 2, 3}), coords=None)
    assert solve_exhaustive(smaller, WaitMode.WAIT).value <= base + 1e-9


def test_node_limit_truncates():
    inst = generate_instance(seed=2, c=5, depot_pos="a", endurance=40,
                             drone_speed=25, eligible_ratio=1.0)
    res = solve_exhaustive(inst, WaitMode.WAIT, node_limit=50)
    assert not res.proven_optimal
    assert evaluate(inst, res.best, WaitMode.WAIT).completion == pytest.approx(res.value)


def test_deterministic_tie_break():
    inst = generate_instance(seed=8, c=4, depot_pos="d", endurance=20,
                             drone_speed=15, eligible_ratio=0.8)
    a = solve_exhaustive(inst, WaitMode.WAIT)
    b = solve_exhaustive(inst, WaitMode.WAIT)
    assert a.best == b.best and a.explored == b.explored


def test_enumerate_feasible_matches_oracle_optimum():
    inst = generate_instance(seed=4, c=3, depot_pos="b", endurance=20,
                             drone_speed=25, eligible_ratio=1.0)
    for mode in WaitMode:
        res = solve_exhaustive(inst, mode)
        values = [v for _s, v in enumerate_feasible(inst, mode)]
        assert min(values) == pytest.approx(res.value)
