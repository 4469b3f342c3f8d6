import dataclasses

import pytest
from conftest import make_tiny_instance

from fstsp import cuts as cut_mod
from fstsp.heuristic import initial_solution
from fstsp.instance import generate_instance
from fstsp.model import Variant, build, encode_schedule
from fstsp.oracle import solve_exhaustive
from fstsp.schedule import WaitMode, evaluate
from fstsp.solver import (
    SolveLimits,
    milp_reference_optimum,
    root_relaxation_gap,
    solve_bnc,
)


@pytest.mark.parametrize("variant", [Variant.DMN, Variant.DMN2])
@pytest.mark.parametrize("mode", list(WaitMode))
def test_bnc_equals_oracle_small(variant, mode):
    for seed in (0, 3):
        inst = generate_instance(seed=seed, c=4, depot_pos="a", endurance=20,
                                 drone_speed=25, eligible_ratio=0.9)
        oracle = solve_exhaustive(inst, mode)
        rep = solve_bnc(inst, variant, mode, warm_start=initial_solution(inst, mode))
        assert rep.status == "Optimal"
        assert rep.value == pytest.approx(oracle.value, rel=1e-6)
        assert rep.lower_bound == pytest.approx(rep.value)
        result = evaluate(inst, rep.incumbent, mode)
        assert result.completion == pytest.approx(rep.value)


def test_mcbar_bnc_small():
    inst = generate_instance(seed=2, c=3, depot_pos="b", endurance=20,
                             drone_speed=25, eligible_ratio=1.0)
    oracle = solve_exhaustive(inst, WaitMode.WAIT)
    rep = solve_bnc(inst, Variant.MCBAR, WaitMode.WAIT,
                    warm_start=initial_solution(inst, WaitMode.WAIT))
    assert rep.status == "Optimal"
    assert rep.value == pytest.approx(oracle.value, rel=1e-6)
    assert rep.cuts_by_family == {}  # no lazy families for this variant


def test_builtin_simplex_backend_end_to_end():
    inst = generate_instance(seed=1, c=3, depot_pos="c", endurance=20,
                             drone_speed=25, eligible_ratio=1.0)
    oracle = solve_exhaustive(inst, WaitMode.WAIT)
    rep = solve_bnc(inst, Variant.DMN2, WaitMode.WAIT,
                    warm_start=initial_solution(inst, WaitMode.WAIT),
                    backend="simplex", limits=SolveLimits(node_limit=20000))
    assert rep.status == "Optimal"
    assert rep.value == pytest.approx(oracle.value, rel=1e-6)


def test_warm_start_optimal_keeps_incumbent():
    inst = generate_instance(seed=4, c=4, depot_pos="d", endurance=20,
                             drone_speed=25, eligible_ratio=0.9)
    opt = solve_exhaustive(inst, WaitMode.WAIT)
    rep = solve_bnc(inst, Variant.DMN2, WaitMode.WAIT, warm_start=opt.best)
    assert rep.value == pytest.approx(opt.value)
    assert rep.incumbent == opt.best  # never replaced: no strict improvement exists


def test_infeasible_warm_start_rejected():
    inst = make_tiny_instance(c=1, drone=[[0, 9, 0], [9, 0, 9], [0, 9, 0]],
                              endurance=5.0)
    from fstsp.schedule import Schedule

    with pytest.raises(ValueError, match="warm start"):
        solve_bnc(inst, Variant.DMN2, WaitMode.WAIT,
                  warm_start=Schedule.make([0, 2], [(0, 1, 2)]))


def test_limits_give_feasible_bound_status():
    inst = generate_instance(seed=5, c=5, depot_pos="a", endurance=40,
                             drone_speed=25, eligible_ratio=0.8)
    oracle = solve_exhaustive(inst, WaitMode.WAIT)
    warm = initial_solution(inst, WaitMode.WAIT)
    rep = solve_bnc(inst, Variant.DMN2, WaitMode.WAIT, warm_start=warm,
                    limits=SolveLimits(node_limit=3))
    assert rep.status == "FeasibleBound"
    assert rep.lower_bound <= oracle.value + 1e-6
    assert rep.value >= oracle.value - 1e-9
    assert rep.gap_pct >= 0


def test_determinism_of_reports():
    inst = generate_instance(seed=6, c=4, depot_pos="b", endurance=20,
                             drone_speed=35, eligible_ratio=0.9)
    warm = initial_solution(inst, WaitMode.NOWAIT)
    a = solve_bnc(inst, Variant.DMN2, WaitMode.NOWAIT, warm_start=warm)
    b = solve_bnc(inst, Variant.DMN2, WaitMode.NOWAIT, warm_start=warm)
    strip = lambda r: dataclasses.replace(r, elapsed=0.0)
    assert strip(a) == strip(b)


def test_mode_relation_wait_le_nowait():
    for seed in (0, 1, 2):
        inst = generate_instance(seed=seed, c=4, depot_pos="a", endurance=20,
                                 drone_speed=25, eligible_ratio=0.9)
        w = solve_bnc(inst, Variant.DMN2, WaitMode.WAIT,
                      warm_start=initial_solution(inst, WaitMode.WAIT))
        n = solve_bnc(inst, Variant.DMN2, WaitMode.NOWAIT,
                      warm_start=initial_solution(inst, WaitMode.NOWAIT))
        assert w.value <= n.value + 1e-9


def test_cut_safety_on_oracle_optimum():
    # no emitted cut may exclude the oracle-optimal schedule
    from fstsp.schedule import simulate

    for seed in (0, 1, 2, 3):
        inst = generate_instance(seed=seed, c=5, depot_pos="b", endurance=20,
                                 drone_speed=25, eligible_ratio=0.8)
        for mode in WaitMode:
            oracle = solve_exhaustive(inst, mode)
            for variant in (Variant.DMN, Variant.DMN2):
                model = build(inst, variant, mode)
                rep = solve_bnc(inst, variant, mode,
                                warm_start=initial_solution(inst, mode))
                point = encode_schedule(model, inst, oracle.best,
                                        simulate(inst, oracle.best, mode))
                for cut in rep.cut_rows:
                    assert cut_mod.cut_satisfied_by(cut, point), (cut.name, seed)


def test_root_gap_matches_standalone_recomputation():
    for seed in (1, 2):
        inst = generate_instance(seed=seed, c=4, depot_pos="c", endurance=20,
                                 drone_speed=25, eligible_ratio=0.9)
        rep = solve_bnc(inst, Variant.DMN2, WaitMode.WAIT,
                        warm_start=initial_solution(inst, WaitMode.WAIT))
        assert rep.status == "Optimal" and rep.root_gap_pct is not None
        again = root_relaxation_gap(inst, Variant.DMN2, WaitMode.WAIT, opt=rep.value)
        assert again == pytest.approx(rep.root_gap_pct, abs=1e-6)


def test_root_gap_zero_when_integral():
    # single customer, drone useless: root LP is already the truck tour
    truck = [[0, 4, 0], [4, 0, 4], [0, 4, 0]]
    drone = [[0, 50, 0], [50, 0, 50], [0, 50, 0]]
    inst = make_tiny_instance(c=1, truck=truck, drone=drone, endurance=1.0)
    rep = solve_bnc(inst, Variant.DMN2, WaitMode.WAIT)
    assert rep.value == pytest.approx(8.0)
    assert rep.root_gap_pct == pytest.approx(0.0, abs=1e-6)


def test_milp_reference_matches_oracle():
    inst = generate_instance(seed=7, c=4, depot_pos="d", endurance=20,
                             drone_speed=15, eligible_ratio=0.8)
    for mode in WaitMode:
        oracle = solve_exhaustive(inst, mode)
        for variant in Variant:
            val = milp_reference_optimum(build(inst, variant, mode))
            assert val == pytest.approx(oracle.value, rel=1e-6)


def test_report_json_roundtrip():
    import json

    inst = generate_instance(seed=1, c=3, depot_pos="a", endurance=20,
                             drone_speed=25, eligible_ratio=1.0)
    rep = solve_bnc(inst, Variant.DMN2, WaitMode.WAIT)
    data = json.loads(rep.to_json())
    assert data["status"] == "Optimal"
    assert data["incumbent"]["route"][0] == 0
