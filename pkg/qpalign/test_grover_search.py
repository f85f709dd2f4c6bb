"""
Grover Search Tests
===================
Diffusion, closed-form amplification, phase oracle and the search driver.
"""

import math

import numpy as np
import pytest

from qpalign.Alignment_Core import TransitionString, path_profit
from qpalign.Circuit_Builder import ProfitPlan, hadamard_layer, run_circuit
from qpalign.Classical_Oracles import brute_force_max, dp_max
from qpalign.Grover_Search import (
    SearchConfig,
    build_marking_oracle,
    build_phase_oracle,
    diffusion,
    find_max,
    grover_iterate,
    marked_probability,
)
from qpalign.QSim_Engine import Gate, RegisterLayout, make_rng, new_state
from qpalign.Verification_Suite import random_pairs
from qpalign.utils import InstanceTooLargeError


def uniform_state(layout, backend="sparse"):
    state = new_state(layout.total_qubits, backend)
    return state.apply_gates(Gate.h(q) for q in layout.qubits("step"))


def marked_mass(state, layout, marked):
    dist = state.register_distribution(layout.qubits("step"))
    return float(sum(dist[v] for v in marked))


# ============================================================================
# Diffusion and Closed Form
# ============================================================================

@pytest.mark.parametrize("t", [1, 2, 3])
def test_uniform_state_is_fixed_point(t):
    layout = RegisterLayout.build([("step", 2 * t)])
    start = uniform_state(layout, "dense")
    after = run_circuit(diffusion(layout), start.copy())
    assert start.max_amplitude_difference(after) < 1e-9


def test_diffusion_twice_is_identity():
    layout = RegisterLayout.build([("step", 4)])
    start = uniform_state(layout)
    run_circuit(build_marking_oracle(layout, "step", {1, 6, 11}), start)
    twice = run_circuit(diffusion(layout), run_circuit(diffusion(layout), start.copy()))
    assert start.max_amplitude_difference(twice) < 1e-9


def test_one_marked_of_four():
    layout = RegisterLayout.build([("step", 2)])
    state = grover_iterate(uniform_state(layout), build_marking_oracle(layout, "step", {2}), 1)
    assert marked_mass(state, layout, {2}) == pytest.approx(1.0, abs=1e-9)


def test_four_marked_of_sixteen():
    layout = RegisterLayout.build([("step", 4)])
    marked = {0, 5, 10, 15}
    state = grover_iterate(uniform_state(layout), build_marking_oracle(layout, "step", marked), 1)
    assert marked_mass(state, layout, marked) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3, 7])
@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_closed_form(k, r):
    layout = RegisterLayout.build([("step", 4)])
    marked = set(range(0, 2 * k, 2))
    state = grover_iterate(uniform_state(layout), build_marking_oracle(layout, "step", marked), r)
    assert marked_mass(state, layout, marked) == pytest.approx(marked_probability(k, 16, r), abs=1e-9)


def test_no_marked_states_leaves_state_unchanged():
    layout = RegisterLayout.build([("step", 4)])
    start = uniform_state(layout)
    state = grover_iterate(start.copy(), build_marking_oracle(layout, "step", set()), 3)
    assert start.max_amplitude_difference(state) < 1e-9


def test_zero_iterations_leave_state_unchanged():
    layout = RegisterLayout.build([("step", 2)])
    start = uniform_state(layout)
    state = grover_iterate(start.copy(), build_marking_oracle(layout, "step", {1}), 0)
    assert start.max_amplitude_difference(state) == 0.0


def test_negative_iterations_rejected():
    layout = RegisterLayout.build([("step", 2)])
    with pytest.raises(ValueError):
        grover_iterate(uniform_state(layout), build_marking_oracle(layout, "step", {1}), -1)


# ============================================================================
# Phase Oracle
# ============================================================================

def flipped_steps(plan, threshold):
    prepared = run_circuit(hadamard_layer(plan))
    before = prepared.amplitudes()
    after = run_circuit(build_phase_oracle(plan, threshold), prepared).amplitudes()
    assert after.keys() == before.keys()
    flipped = set()
    for basis, amp in before.items():
        ratio = after[basis] / amp
        assert abs(abs(ratio) - 1) < 1e-12
        if abs(ratio + 1) < 1e-9:
            flipped.add(plan.layout.value_of(basis, "step"))
        else:
            assert abs(ratio - 1) < 1e-9
    return flipped


def test_oracle_marks_best_branches():
    plan = ProfitPlan.create("A", "A")
    marked = {str(TransitionString.from_index(s, 2)) for s in flipped_steps(plan, 2)}
    assert marked == {"DN", "ND"}


def test_oracle_above_bound_is_identity():
    plan = ProfitPlan.create("A", "A")
    assert flipped_steps(plan, 3) == set()
    assert flipped_steps(plan, 7) == set()


def test_oracle_below_zero_marks_valid_set():
    plan = ProfitPlan.create("A", "C")
    valid = {s for s in range(16) if path_profit(TransitionString.from_index(s, 2), "A", "C")[1]}
    assert flipped_steps(plan, -1) == valid


# ============================================================================
# Driver
# ============================================================================

def test_find_max_single_match():
    result, trace = find_max("A", "A", SearchConfig(seed=7))
    assert result.profit == 3
    assert (result.alignment.top, result.alignment.bottom) == ("A", "A")
    assert trace.total_iterations <= result.budget_limit


def test_find_max_single_mismatch():
    result, _ = find_max("A", "C", SearchConfig(seed=3))
    assert result.profit == 2
    assert result.path in brute_force_max("A", "C").optimal_paths


def test_find_max_empty_instance():
    result, trace = find_max("", "", SearchConfig(seed=1))
    assert result.profit == 0
    assert result.alignment.top == ""
    assert trace.rounds == []


def test_find_max_is_deterministic():
    config = SearchConfig(seed=11)
    first = find_max("AG", "G", config)
    second = find_max("AG", "G", config)
    assert first[1] == second[1]
    assert first[0] == second[0]


def test_find_max_width_guard():
    with pytest.raises(InstanceTooLargeError):
        find_max("ACGT", "ACGT", SearchConfig(max_qubits=20))


@pytest.mark.parametrize("kwargs", [{"budget_c": 0}, {"budget_c": -1.0}, {"growth": 1.0}, {"growth": 1.5}])
def test_search_config_validation(kwargs):
    with pytest.raises(ValueError):
        SearchConfig(**kwargs)


def test_ripple_adder_search_agrees():
    result, _ = find_max("AC", "A", SearchConfig(seed=5, adder="ripple"))
    assert result.profit <= dp_max("AC", "A")[0]
    assert path_profit(result.path, "AC", "A") == (result.profit, True)


@pytest.mark.slow
def test_success_rate_over_seeded_runs():
    rng = make_rng(2718)
    instances = random_pairs(rng, 10, 2, min_len=1)
    hits = 0
    runs = 50
    for i in range(runs):
        s1, s2 = instances[i % len(instances)]
        result, trace = find_max(s1, s2, SearchConfig(seed=int(rng.integers(0, 2 ** 63))))
        best = dp_max(s1, s2)[0]
        assert result.profit <= best
        assert path_profit(result.path, s1, s2) == (result.profit, True)
        assert trace.total_iterations <= 3.0 * math.sqrt(4 ** (len(s1) + len(s2)))
        thresholds = trace.accepted_thresholds()
        assert all(b > a for a, b in zip(thresholds, thresholds[1:]))
        hits += result.profit == best
    assert hits / runs >= 0.9
