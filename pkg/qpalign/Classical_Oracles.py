"""
Classical Oracles
=================
Independent ground-truth solvers for the alignment profit: exhaustive
enumeration of every monotone lattice path, a dynamic-programming maximizer,
the Delannoy path count that sizes the search space, and the Levenshtein
edit distance reported next to alignments.

All paths here are canonical (no None steps, variable length). Padding to a
fixed step count happens only where a quantum register needs it.
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, List, Tuple

import numpy as np

from .Alignment_Core import (
    DEFAULT_PROFIT,
    ProfitParams,
    Transition,
    TransitionString,
    as_sequence,
)
from .utils import InstanceTooLargeError


logger = logging.getLogger(__name__)

BRUTE_FORCE_PATH_LIMIT = 10 ** 7


@dataclass(frozen=True)
class OracleResult:
    """Exact maximum and every canonical path reaching it"""
    max_profit: int
    optimal_paths: FrozenSet[TransitionString] = field(default_factory=frozenset)
    path_count_examined: int = 0


# ============================================================================
# Path Counting
# ============================================================================

def count_paths(m: int, n: int) -> int:
    """Delannoy number D(m, n): monotone {H, V, D} paths from (0,0) to (m,n)"""
    if m < 0 or n < 0:
        raise ValueError(f"sequence lengths must be non-negative, got ({m}, {n})")
    # Python ints: D(m, n) overflows int64 around m = n = 27
    row = [1] * (n + 1)
    for _ in range(m):
        new = [1] * (n + 1)
        for j in range(1, n + 1):
            new[j] = row[j] + new[j - 1] + row[j - 1]
        row = new
    return row[n]


# ============================================================================
# Exhaustive Enumeration
# ============================================================================

def brute_force_max(s1, s2, p: ProfitParams = DEFAULT_PROFIT) -> OracleResult:
    """Score every monotone path and keep all maximizers.

    Raises:
        InstanceTooLargeError: more than BRUTE_FORCE_PATH_LIMIT paths
    """
    s1, s2 = as_sequence(s1), as_sequence(s2)
    m, n = len(s1), len(s2)
    total = count_paths(m, n)
    if total > BRUTE_FORCE_PATH_LIMIT:
        raise InstanceTooLargeError(
            f"brute force would enumerate {total} paths (limit {BRUTE_FORCE_PATH_LIMIT})")

    best = -1
    winners: List[Tuple[Transition, ...]] = []
    examined = 0
    steps: List[Transition] = []

    def walk(i: int, j: int, profit: int):
        nonlocal best, winners, examined
        if i == m and j == n:
            examined += 1
            if profit > best:
                best = profit
                winners = [tuple(steps)]
            elif profit == best:
                winners.append(tuple(steps))
            return
        if i < m and j < n:
            gain = p.x + (p.z if s1[i] == s2[j] else p.y)
            steps.append(Transition.DIAGONAL)
            walk(i + 1, j + 1, profit + gain)
            steps.pop()
        if i < m:
            steps.append(Transition.HORIZONTAL)
            walk(i + 1, j, profit + p.x)
            steps.pop()
        if j < n:
            steps.append(Transition.VERTICAL)
            walk(i, j + 1, profit + p.x)
            steps.pop()

    walk(0, 0, 0)
    logger.debug("brute force examined %d paths on (%d, %d), max %d", examined, m, n, best)
    return OracleResult(best, frozenset(TransitionString(w) for w in winners), examined)


# ============================================================================
# Dynamic Programming
# ============================================================================

def _suffix_table(s1, s2, p: ProfitParams) -> np.ndarray:
    """best[i, j] = maximum profit of a walk from (i, j) to (m, n)"""
    m, n = len(s1), len(s2)
    best = np.zeros((m + 1, n + 1), dtype=np.int64)
    for i in range(m - 1, -1, -1):
        best[i, n] = best[i + 1, n] + p.x
    for j in range(n - 1, -1, -1):
        best[m, j] = best[m, j + 1] + p.x
    for i in range(m - 1, -1, -1):
        for j in range(n - 1, -1, -1):
            diag = p.x + (p.z if s1[i] == s2[j] else p.y)
            best[i, j] = max(best[i + 1, j + 1] + diag,
                             best[i + 1, j] + p.x,
                             best[i, j + 1] + p.x)
    return best


def dp_max(s1, s2, p: ProfitParams = DEFAULT_PROFIT) -> Tuple[int, TransitionString]:
    """Maximum profit and one optimal canonical path.

    Ties break toward Diagonal, then Horizontal, then Vertical, choosing
    each step forward from (0, 0).
    """
    s1, s2 = as_sequence(s1), as_sequence(s2)
    m, n = len(s1), len(s2)
    best = _suffix_table(s1, s2, p)

    steps: List[Transition] = []
    i = j = 0
    while (i, j) != (m, n):
        here = best[i, j]
        if i < m and j < n:
            diag = p.x + (p.z if s1[i] == s2[j] else p.y)
            if best[i + 1, j + 1] + diag == here:
                steps.append(Transition.DIAGONAL)
                i += 1
                j += 1
                continue
        if i < m and best[i + 1, j] + p.x == here:
            steps.append(Transition.HORIZONTAL)
            i += 1
            continue
        steps.append(Transition.VERTICAL)
        j += 1
    return int(best[0, 0]), TransitionString(tuple(steps))


# ============================================================================
# Edit Distance
# ============================================================================

def edit_distance(s1, s2) -> int:
    """Levenshtein distance with unit substitution, insertion and deletion"""
    a, b = str(as_sequence(s1)), str(as_sequence(s2))
    prev = np.arange(len(b) + 1, dtype=np.int64)
    for i, ca in enumerate(a, start=1):
        cur = np.empty_like(prev)
        cur[0] = i
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
        prev = cur
    return int(prev[-1])
