"""
Classical Oracle Tests
======================
Brute force, dynamic programming, Delannoy counting and edit distance.
"""

import itertools

import pytest

from qpalign.Alignment_Core import ProfitParams, TransitionString, path_profit
from qpalign.Classical_Oracles import brute_force_max, count_paths, dp_max, edit_distance
from qpalign.Verification_Suite import random_pairs
from qpalign.utils import InstanceTooLargeError


def _all_sequences(max_len):
    for length in range(max_len + 1):
        for letters in itertools.product("ACGT", repeat=length):
            yield ''.join(letters)


def test_brute_force_single_match():
    result = brute_force_max("A", "A")
    assert result.max_profit == 3
    assert result.optimal_paths == {TransitionString.parse("D")}


def test_brute_force_single_mismatch():
    result = brute_force_max("A", "C")
    assert result.max_profit == 2
    assert result.path_count_examined == 3
    assert result.optimal_paths == {TransitionString.parse(p) for p in ("D", "HV", "VH")}


def test_brute_force_worked_example(worked_pair):
    result = brute_force_max(*worked_pair)
    assert result.max_profit == 20
    assert result.path_count_examined == count_paths(9, 6)
    for path in result.optimal_paths:
        assert path_profit(path, *worked_pair) == (20, True)


def test_brute_force_guard():
    with pytest.raises(InstanceTooLargeError):
        brute_force_max("A" * 12, "C" * 12)


@pytest.mark.parametrize("s1, s2, profit, path", [
    ("AC", "AC", 6, "DD"),
    ("ATGGTCAGC", "ACGGTC", 20, "DDDDDDHHH"),
    ("", "AC", 2, "VV"),
    ("AC", "", 2, "HH"),
    ("", "", 0, ""),
])
def test_dp_max(s1, s2, profit, path):
    assert dp_max(s1, s2) == (profit, TransitionString.parse(path))


def test_dp_matches_brute_force_exhaustively():
    sequences = list(_all_sequences(2))
    for s1, s2 in itertools.product(sequences, repeat=2):
        assert dp_max(s1, s2)[0] == brute_force_max(s1, s2).max_profit, (s1, s2)


def test_dp_matches_brute_force_on_random_pairs(rng):
    for s1, s2 in random_pairs(rng, 200, 4):
        profit, path = dp_max(s1, s2)
        assert profit == brute_force_max(s1, s2).max_profit, (s1, s2)
        assert path_profit(path, s1, s2) == (profit, True)


def test_dp_with_general_profits():
    p = ProfitParams(2, 3, 7)
    for s1, s2 in [("GATTACA", "GCATGC"), ("AAT", "TAA")]:
        assert dp_max(s1, s2, p)[0] == brute_force_max(s1, s2, p).max_profit


@pytest.mark.parametrize("m, n, count", [(1, 1, 3), (2, 2, 13), (0, 5, 1), (3, 3, 63), (10, 10, 8097453)])
def test_count_paths(m, n, count):
    assert count_paths(m, n) == count


def test_count_paths_symmetry():
    for m in range(6):
        assert count_paths(m, 0) == 1
        for n in range(6):
            assert count_paths(m, n) == count_paths(n, m)


def test_brute_force_examines_every_path():
    for s1, s2 in [("AC", "G"), ("ACG", "TT"), ("", "A")]:
        assert brute_force_max(s1, s2).path_count_examined == count_paths(len(s1), len(s2))


@pytest.mark.parametrize("s1, s2, distance", [
    ("ATGGTCAGC", "ACGGTC", 4),
    ("A", "A", 0),
    ("", "ACG", 3),
    ("GATTACA", "GCATGCT", 4),
])
def test_edit_distance(s1, s2, distance):
    assert edit_distance(s1, s2) == distance
