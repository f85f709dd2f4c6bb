"""
Verification Suite Tests
========================
Each check passes on the real pipeline and catches a tampered model.
"""

import pytest

from qpalign.Alignment_Core import ProfitParams
from qpalign.Verification_Suite import (
    all_single_base_pairs,
    check_arithmetic,
    check_backend_equivalence,
    check_char_modes,
    check_classical_track,
    check_grover_closed_form,
    check_measurement_law,
    check_oracle_phase_purity,
    random_pairs,
    run_verification,
)
from qpalign.utils import InstanceTooLargeError, SequenceValidationError


TAMPERED = ProfitParams(1, 1, 3)


def test_random_pairs_lengths(rng):
    pairs = random_pairs(rng, 30, 3, min_len=1)
    assert len(pairs) == 30
    assert all(1 <= len(a) <= 3 and 1 <= len(b) <= 3 for a, b in pairs)
    assert all(set(a + b) <= set("ACGT") for a, b in pairs)


def test_classical_track_passes(rng):
    pairs = all_single_base_pairs()[:6] + random_pairs(rng, 4, 2)
    result = check_classical_track(pairs)
    assert result.passed, result.detail
    assert result.cases > 0


def test_classical_track_ripple():
    assert check_classical_track([("AC", "G"), ("", "T")], adder="ripple").passed


def test_classical_track_detects_tampered_profits():
    result = check_classical_track([("A", "A"), ("A", "C")], TAMPERED)
    assert not result.passed
    assert result.failures > 0


def test_char_modes_agree():
    assert check_char_modes([("A", "C"), ("AG", "G"), ("", "T")]).passed


def test_arithmetic_exact():
    result = check_arithmetic(max_width=3)
    assert result.passed, result.detail


def test_backend_equivalence():
    assert check_backend_equivalence([("A", "A"), ("", "G")]).passed


def test_grover_closed_form(rng):
    assert check_grover_closed_form(rng).passed


def test_measurement_law(rng):
    result = check_measurement_law(rng)
    assert result.passed, result.detail
    assert result.cases == 2


def test_oracle_phase_purity():
    assert check_oracle_phase_purity([("A", "A"), ("A", "C")]).passed
    assert not check_oracle_phase_purity([("A", "A")], TAMPERED).passed


def test_verification_width_guard():
    with pytest.raises(InstanceTooLargeError, match="instance too large for full quantum verification"):
        run_verification(max_len=9)


@pytest.mark.parametrize("max_len, trials", [(0, 3), (-1, 3), (1, -1)])
def test_verification_rejects_bad_sizes(max_len, trials):
    with pytest.raises(SequenceValidationError):
        run_verification(max_len=max_len, trials=trials)


@pytest.mark.slow
def test_full_verification_passes():
    report = run_verification(max_len=2, trials=50, seed=1)
    assert report.passed, [c.detail for c in report.checks if not c.passed]
    assert [c.name for c in report.checks] == [
        "classical_track", "char_modes", "arithmetic", "backend_equivalence",
        "grover_closed_form", "measurement_law", "oracle_phase_purity", "quantum_success",
    ]


@pytest.mark.slow
def test_tampered_verification_fails():
    report = run_verification(max_len=1, trials=10, seed=3, tamper_profit=TAMPERED)
    assert not report.passed
    failed = {c.name for c in report.checks if not c.passed}
    assert "classical_track" in failed
