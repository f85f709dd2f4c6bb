"""
Pipeline Report Tests
=====================
"""

import json

import pytest

from qpalign.Alignment_Core import ProfitParams, path_profit, TransitionString
from qpalign.Grover_Search import SearchConfig
from qpalign.Pipeline_Reports import AlignMode, RunReport, run_alignment, search_config_from
from qpalign.utils import ConfigManager, SequenceValidationError


def test_dp_worked_example(worked_pair):
    report = run_alignment(*worked_pair, mode="dp")
    assert report.profit == 20
    assert report.alignment.top == "ATGGTCAGC"
    assert report.alignment.bottom == "ACGGTC___"
    assert report.path == "DDDDDDHHH"
    assert report.edit_distance == 4
    assert report.valid
    assert report.resources is None
    assert report.oracle_check is None


def test_brute_mode_always_cross_checks():
    report = run_alignment("AC", "G", mode=AlignMode.BRUTE)
    assert report.oracle_check.referee == "dp"
    assert report.oracle_check.agrees
    assert path_profit(TransitionString.parse(report.path), "AC", "G") == (report.profit, True)


def test_dp_check_uses_brute_force():
    report = run_alignment("GAT", "GT", check=True)
    assert report.oracle_check.referee == "brute"
    assert report.oracle_check.referee_profit == report.profit


def test_dp_check_skipped_above_guard():
    report = run_alignment("A" * 12, "C" * 12, check=True)
    assert report.oracle_check is None
    assert report.profit == 24


def test_quantum_mode_report():
    report = run_alignment("A", "A", mode="quantum", config=SearchConfig(seed=7), check=True)
    assert report.mode is AlignMode.QUANTUM
    assert report.profit == 3
    assert report.seed == 7
    assert report.resources.total_qubits > 0
    assert report.search.adder == "draper"
    assert report.budget_used <= report.budget_limit
    assert report.oracle_check.agrees


def test_lowercase_input_is_normalized():
    report = run_alignment("acg", "ag")
    assert report.sequences.a == "ACG"


def test_invalid_symbol():
    with pytest.raises(SequenceValidationError):
        run_alignment("ACX", "A")


def test_general_profit_params():
    config = SearchConfig(p=ProfitParams(2, 3, 7))
    report = run_alignment("AC", "A", config=config)
    assert report.profit == 11


def test_report_json_is_stable():
    first = run_alignment("GATTACA", "GCATGC")
    second = run_alignment("GATTACA", "GCATGC")
    assert first.stable_json() == second.stable_json()
    data = json.loads(first.to_json())
    assert data["schema_version"] == 1
    assert data["mode"] == "dp"
    assert RunReport.model_validate(data).profit == first.profit


def test_search_config_from_settings():
    settings = ConfigManager().config
    config = search_config_from(settings, seed=5, adder=None, char_mode="per-step")
    assert config.seed == 5
    assert config.adder.value == "draper"
    assert config.char_mode.value == "per-step"
    assert config.max_qubits == 28
