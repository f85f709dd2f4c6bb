"""
Alignment Core Tests
====================
Encodings, profit rules, path scoring and decoding.
"""

import itertools

import pytest

from qpalign.Alignment_Core import (
    Alignment,
    GridModel,
    ProfitParams,
    Sequence,
    Transition,
    TransitionString,
    alignment_to_path,
    decode_alignment,
    decode_base,
    encode_base,
    is_valid_path,
    iter_step_strings,
    max_profit_bound,
    path_profit,
    step_profit,
    transition_bounds,
)
from qpalign.utils import InvalidPathError, SequenceValidationError


WORKED_PATH = TransitionString.parse("DDDDDDHHH")


# ============================================================================
# Encodings
# ============================================================================

@pytest.mark.parametrize("symbol, code", [("A", 0b00), ("C", 0b01), ("G", 0b10), ("T", 0b11), ("t", 0b11)])
def test_encode_base(symbol, code):
    assert encode_base(symbol) == code
    assert decode_base(code) == symbol.upper()


def test_encode_base_rejects_unknown_symbol():
    with pytest.raises(SequenceValidationError, match="invalid nucleotide"):
        encode_base("X")


def test_sequence_error_names_character_and_position():
    with pytest.raises(SequenceValidationError) as excinfo:
        Sequence("aXg")
    assert "'X'" in str(excinfo.value)
    assert "position 2" in str(excinfo.value)


def test_sequence_is_stored_uppercase():
    seq = Sequence("acgt")
    assert str(seq) == "ACGT"
    assert seq.encoded() == [0, 1, 2, 3]


def test_transition_codes():
    assert [t.value for t in (Transition.NONE, Transition.VERTICAL, Transition.HORIZONTAL, Transition.DIAGONAL)] \
        == [0b00, 0b01, 0b10, 0b11]
    assert Transition.from_letter("d") is Transition.DIAGONAL
    with pytest.raises(InvalidPathError):
        Transition.from_letter("Q")


def test_step_register_encoding():
    path = TransitionString.parse("HVD")
    assert path.to_index() == 0b11_01_10
    assert TransitionString.from_index(path.to_index(), 3) == path
    assert len(list(iter_step_strings(2))) == 16


# ============================================================================
# Profit
# ============================================================================

@pytest.mark.parametrize("tr, ch, cv, expected", [
    (Transition.DIAGONAL, "A", "A", 3),
    (Transition.HORIZONTAL, "G", None, 1),
    (Transition.VERTICAL, None, "C", 1),
    (Transition.NONE, None, None, 0),
    (Transition.DIAGONAL, "A", "C", 2),
])
def test_step_profit_defaults(tr, ch, cv, expected):
    assert step_profit(tr, ch, cv) == expected


def test_step_profit_diagonal_needs_both_characters():
    with pytest.raises(ValueError):
        step_profit(Transition.DIAGONAL, "A", None)


@pytest.mark.parametrize("x, y, z", [(0, 1, 2), (1, 0, 2), (1, 2, 2), (1, 3, 2)])
def test_profit_params_constraints(x, y, z):
    with pytest.raises(ValueError):
        ProfitParams(x, y, z)


def test_worked_path_profit(worked_pair):
    padded = WORKED_PATH.padded(15)
    assert len(padded) == 15
    assert path_profit(padded, *worked_pair) == (20, True)


def test_empty_path_on_empty_sequences():
    assert path_profit(TransitionString(), "", "") == (0, True)


def test_overrun_stops_scoring():
    assert path_profit(TransitionString.parse("HH"), "A", "A") == (2, False)
    assert path_profit(TransitionString.parse("DD"), "A", "A") == (5, False)


def test_profit_bounded_for_every_valid_path():
    s1, s2 = "ACG", "AG"
    bound = max_profit_bound(3, 2)
    for path in iter_step_strings(5):
        profit, valid = path_profit(path, s1, s2)
        if valid:
            assert 0 <= profit <= bound


def test_general_profit_params():
    p = ProfitParams(2, 3, 7)
    assert step_profit(Transition.DIAGONAL, "A", "A", p) == 9
    assert step_profit(Transition.DIAGONAL, "A", "T", p) == 5
    assert path_profit(TransitionString.parse("DH"), "AC", "A", p) == (11, True)


# ============================================================================
# Decoding
# ============================================================================

def test_decode_worked_alignment(worked_pair):
    alignment = decode_alignment(WORKED_PATH.padded(15), *worked_pair)
    assert alignment.top == "ATGGTCAGC"
    assert alignment.bottom == "ACGGTC___"
    assert alignment.profit == 20


def test_decode_identity():
    alignment = decode_alignment(TransitionString.parse("DD"), "AC", "AC")
    assert (alignment.top, alignment.bottom) == ("AC", "AC")


def test_none_steps_are_skipped():
    with_none = decode_alignment(TransitionString.parse("DND"), "AC", "AC")
    plain = decode_alignment(TransitionString.parse("DD"), "AC", "AC")
    assert with_none == plain


def test_decode_rejects_invalid_path():
    with pytest.raises(InvalidPathError, match=r"path does not terminate at \(m,n\)"):
        decode_alignment(TransitionString.parse("D"), "AC", "AC")


def test_inserting_none_steps_changes_nothing():
    s1, s2 = "ACG", "AG"
    path = TransitionString.parse("DHD")
    base = (path_profit(path, s1, s2), decode_alignment(path, s1, s2))
    for pos in range(len(path) + 1):
        steps = list(path.steps)
        steps.insert(pos, Transition.NONE)
        longer = TransitionString(tuple(steps))
        assert (path_profit(longer, s1, s2), decode_alignment(longer, s1, s2)) == base


def test_alignment_round_trip():
    s1, s2 = "GAT", "GT"
    for letters in itertools.product("HVD", repeat=4):
        path = TransitionString.parse(''.join(letters))
        if is_valid_path(path, 3, 2):
            alignment = decode_alignment(path, s1, s2)
            assert alignment_to_path(alignment) == path
            assert alignment.ungapped() == (s1, s2)


def test_alignment_rejects_double_gap():
    with pytest.raises(InvalidPathError):
        Alignment("A_", "C_")


# ============================================================================
# Sizing
# ============================================================================

@pytest.mark.parametrize("m, n, bounds", [(9, 6, (9, 15)), (4, 4, (4, 8)), (0, 0, (0, 0))])
def test_transition_bounds(m, n, bounds):
    assert transition_bounds(m, n) == bounds


@pytest.mark.parametrize("m, n, bound", [(9, 6, 21), (5, 5, 15), (0, 0, 0), (2, 5, 9)])
def test_max_profit_bound(m, n, bound):
    assert max_profit_bound(m, n) == bound


def test_grid_model():
    assert GridModel(9, 6).node_count == 70
