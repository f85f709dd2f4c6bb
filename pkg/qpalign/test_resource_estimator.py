"""
Resource Estimator Tests
========================
"""

import pytest

from qpalign.Circuit_Builder import ProfitPlan
from qpalign.Resource_Estimator import estimate_resources
from qpalign.utils import SequenceValidationError


def test_worked_instance_widths():
    est = estimate_resources(9, 6, count_gates=False)
    assert est.node_count == 70
    assert (est.t_min, est.t) == (9, 15)
    assert est.step_qubits == 30
    assert est.max_profit == 21
    assert est.profit_width == 5
    assert est.counter_widths == (4, 4)
    assert est.address_widths == (4, 3)
    assert est.char_qubits == 4
    assert est.ancilla_qubits == 3
    assert est.total_qubits == 50
    assert est.gate_count is None


def test_empty_instance():
    est = estimate_resources(0, 0)
    assert est.t == 0
    assert est.total_qubits == 7
    assert est.gate_count is not None


def test_profit_width_small_instance():
    assert estimate_resources(2, 2, count_gates=False).profit_width == 3


def test_per_step_characters():
    est = estimate_resources(9, 6, mode="per-step", count_gates=False)
    assert est.char_qubits == 60
    assert est.total_qubits == 50 - 4 + 60


def test_total_matches_layout():
    est = estimate_resources(2, 1, s1="AC", s2="G")
    assert est.total_qubits == ProfitPlan.create("AC", "G").layout.total_qubits
    assert est.gate_count > 0
    assert 0 < est.depth <= est.gate_count
    assert est.grover_iteration_gates > 2 * est.gate_count


@pytest.mark.parametrize("m, n", [(-1, 2), (3, -4)])
def test_negative_lengths_rejected(m, n):
    with pytest.raises(SequenceValidationError):
        estimate_resources(m, n)


def test_sequence_length_mismatch():
    with pytest.raises(SequenceValidationError):
        estimate_resources(2, 2, s1="ACG", s2="AC")


def test_json_dump():
    data = estimate_resources(1, 1).model_dump()
    assert data["counter_widths"] == (1, 1)
    assert data["char_mode"] == "reuse"
    assert data["adder"] == "draper"
