import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ttp_cosolver import (InfeasiblePlan, StalePreview, commit, delta_bitflip, delta_two_opt,
                          evaluate_full, random_instance, travel_cost, velocity)
from ttp_cosolver.bench import random_feasible_plan, random_tour
from ttp_cosolver.verification import naive_evaluate

from conftest import make_instance, tour_0


def test_velocity_endpoints(tiny3):
    assert velocity(tiny3, 0.0) == tiny3.v_max
    assert velocity(tiny3, tiny3.capacity) == pytest.approx(tiny3.v_min, abs=1e-15)
    assert velocity(tiny3, 2.0) == pytest.approx(0.4, abs=1e-15)


# hand walks: legs 3/1.0 + 5/0.4 + 4/0.4 and 4/1.0 + 5/1.0 + 3/0.4
@pytest.mark.parametrize("ids, plan, time, gain", [
    ((1, 2, 3), (1, 0), 25.5, -5.5),
    ((1, 3, 2), (1, 0), 16.5, 3.5),
    ((1, 2, 3), (0, 0), 12.0, -12.0),
])
def test_evaluate_full_tiny3(tiny3, ids, plan, time, gain):
    s = evaluate_full(tiny3, tour_0(ids), plan)
    assert s.total_time == pytest.approx(time, abs=1e-12)
    assert s.gain == pytest.approx(gain, abs=1e-12)
    assert s.total_profit == 20 * plan[0]


def test_accumulators_tiny3(tiny3):
    s = evaluate_full(tiny3, tour_0((1, 2, 3)), (1, 0))
    assert s.w_reg.tolist() == [0, 2, 0]
    assert s.w_acc.tolist() == [0, 2, 2]
    np.testing.assert_allclose(s.t_reg, [3.0, 12.5, 10.0])
    np.testing.assert_allclose(s.t_acc, [3.0, 15.5, 25.5])
    assert s.t_acc[-1] == s.total_time


def test_empty_plan_travels_at_vmax():
    inst = random_instance(11, 9, 12)
    tour = random_tour(np.random.default_rng(0), 9)
    s = evaluate_full(inst, tour, np.zeros(12))
    assert s.gain == pytest.approx(-inst.renting_ratio * inst.tour_length(tour) / inst.v_max)


def test_travel_cost(tiny3):
    assert travel_cost(evaluate_full(tiny3, tour_0((1, 2, 3)), (1, 0)), tiny3) == 25.5
    assert travel_cost(evaluate_full(tiny3, tour_0((1, 3, 2)), (1, 0)), tiny3) == 16.5
    free = make_instance(tiny3.coords, [(20, 2, 1)], 3, renting_ratio=0.0)
    assert travel_cost(evaluate_full(free, [0, 1, 2], [1]), free) == 0.0


def test_infeasible_plan_rejected(tiny3):
    with pytest.raises(InfeasiblePlan) as err:
        evaluate_full(tiny3, [0, 1, 2], (1, 1))
    assert err.value.overflow == 2


def test_invalid_tour_rejected(tiny3):
    with pytest.raises(ValueError):
        evaluate_full(tiny3, [1, 0, 2], (0, 0))
    with pytest.raises(ValueError):
        evaluate_full(tiny3, [0, 1, 1], (0, 0))


def test_bitflip_preview_tiny3(tiny3):
    s = evaluate_full(tiny3, tour_0((1, 3, 2)), (0, 0))
    before = s.copy()
    pv = delta_bitflip(tiny3, s, 0)
    assert pv.feasible and pv.gain == evaluate_full(tiny3, tour_0((1, 3, 2)), (1, 0)).gain
    assert pv.gain == pytest.approx(3.5)
    assert pv.start == 2
    assert np.array_equal(s.plan, before.plan) and s.gain == before.gain


def test_bitflip_involution(tiny3):
    s = evaluate_full(tiny3, tour_0((1, 2, 3)), (1, 0))
    g0 = s.gain
    commit(s, delta_bitflip(tiny3, s, 0))
    assert delta_bitflip(tiny3, s, 0).gain == g0


def test_bitflip_overflow_is_infeasible_preview(tiny3):
    s = evaluate_full(tiny3, tour_0((1, 2, 3)), (1, 0))
    pv = delta_bitflip(tiny3, s, 1)
    assert not pv.feasible and pv.gain is None
    assert pv.total_weight == 5 and pv.overflow == 2
    with pytest.raises(InfeasiblePlan):
        commit(s, pv)


def test_two_opt_preview_and_commit_tiny3(tiny3):
    s = evaluate_full(tiny3, tour_0((1, 2, 3)), (1, 0))
    pv = delta_two_opt(tiny3, s, 1, 2)
    assert pv.gain == pytest.approx(3.5)
    commit(s, pv)
    ref = evaluate_full(tiny3, tour_0((1, 3, 2)), (1, 0))
    assert s.tour.tolist() == [0, 2, 1]
    assert s.w_acc.tolist() == [0, 0, 2]
    assert s.gain == ref.gain and np.array_equal(s.t_acc, ref.t_acc)
    assert s.pos.tolist() == [0, 2, 1]


def test_noop_reversal(tiny3):
    s = evaluate_full(tiny3, tour_0((1, 2, 3)), (1, 0))
    before = s.copy()
    pv = delta_two_opt(tiny3, s, 2, 2)
    assert pv.gain == s.gain
    commit(s, pv)
    for f in ("tour", "plan", "w_acc", "t_acc", "t_reg", "w_reg", "p_acc"):
        assert np.array_equal(getattr(s, f), getattr(before, f))
    assert s.gain == before.gain


def test_two_opt_empty_plan_is_length_change():
    inst = random_instance(5, 10, 6)
    rng = np.random.default_rng(1)
    s = evaluate_full(inst, random_tour(rng, 10), np.zeros(6))
    old_len = inst.tour_length(s.tour)
    pv = delta_two_opt(inst, s, 2, 7)
    new = s.tour.copy()
    new[2:8] = new[2:8][::-1]
    expected = -inst.renting_ratio * (inst.tour_length(new) - old_len) / inst.v_max
    assert pv.gain - s.gain == pytest.approx(expected, abs=1e-9)


def test_stale_preview(tiny3):
    s = evaluate_full(tiny3, tour_0((1, 2, 3)), (0, 0))
    first = delta_two_opt(tiny3, s, 1, 2)
    commit(s, delta_bitflip(tiny3, s, 0))
    with pytest.raises(StalePreview):
        commit(s, first)


def test_bad_positions(tiny3):
    s = evaluate_full(tiny3, tour_0((1, 2, 3)), (0, 0))
    for i, j in ((0, 1), (2, 1), (1, 3)):
        with pytest.raises(ValueError):
            delta_two_opt(tiny3, s, i, j)


def _mutated(state, move):
    tour, plan = state.tour.copy(), state.plan.copy()
    if move[0] == "flip":
        plan[move[1]] = not plan[move[1]]
    else:
        i, j = move[1:]
        tour[i:j + 1] = tour[i:j + 1][::-1]
    return tour, plan


@st.composite
def solution_and_moves(draw):
    n = draw(st.integers(2, 12))
    m = draw(st.integers(0, 16))
    seed = draw(st.integers(0, 2**32 - 1))
    frac = draw(st.floats(0.1, 0.9))
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, m, capacity_fraction=frac)
    moves = []
    for _ in range(draw(st.integers(1, 6))):
        if m and (n < 3 or draw(st.booleans())):
            moves.append(("flip", draw(st.integers(0, m - 1))))
        elif n >= 3:
            i = draw(st.integers(1, n - 1))
            moves.append(("2opt", i, draw(st.integers(i, n - 1))))
    return inst, random_tour(rng, n), random_feasible_plan(rng, inst), moves


@settings(max_examples=300, deadline=None)
@given(solution_and_moves())
def test_previews_and_commits_match_full_evaluation_exactly(case):
    inst, tour, plan, moves = case
    state = evaluate_full(inst, tour, plan)
    for move in moves:
        pv = (delta_bitflip(inst, state, move[1]) if move[0] == "flip"
              else delta_two_opt(inst, state, *move[1:]))
        tour2, plan2 = _mutated(state, move)
        try:
            ref = evaluate_full(inst, tour2, plan2)
        except InfeasiblePlan:
            assert not pv.feasible
            continue
        assert pv.feasible
        assert pv.gain == ref.gain
        commit(state, pv)
        for f in ("tour", "pos", "plan", "legs", "w_reg", "w_acc", "t_reg", "t_acc",
                  "p_reg", "p_acc"):
            assert np.array_equal(getattr(state, f), getattr(ref, f)), f
        assert (state.gain, state.total_time, state.total_weight) == \
            (ref.gain, ref.total_time, ref.total_weight)
        # accumulators stay prefix sums of the registers
        np.testing.assert_allclose(state.w_acc, np.cumsum(state.w_reg), rtol=1e-12, atol=0)
        np.testing.assert_allclose(state.t_acc, np.cumsum(state.t_reg), rtol=1e-12, atol=0)
        assert state.total_weight <= inst.capacity
        assert state.gain == state.total_profit - inst.renting_ratio * state.total_time


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40), st.integers(0, 120), st.integers(0, 2**32 - 1))
def test_fast_evaluator_matches_naive(n, m, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, m)
    tour = random_tour(rng, n)
    plan = random_feasible_plan(rng, inst)
    fast = evaluate_full(inst, tour, plan)
    assert (fast.gain, fast.total_time, fast.total_profit, fast.total_weight) == \
        naive_evaluate(inst, tour, plan)
