"""
Pipeline Reports
================
End-to-end alignment runs in each mode (quantum search, dynamic
programming, brute force) and the versioned JSON run report they produce.

Reports are deterministic for a given input and seed except for the
wall_time_ms field.
"""

import logging
import time
from enum import Enum
from typing import Optional

from pydantic import BaseModel

from .Alignment_Core import DEFAULT_PROFIT, ProfitParams, as_sequence, decode_alignment
from .Circuit_Builder import AdderKind, CharMode
from .Classical_Oracles import brute_force_max, dp_max, edit_distance
from .Grover_Search import SearchConfig, find_max
from .Resource_Estimator import ResourceEstimate, estimate_resources
from .utils import InstanceTooLargeError, format_duration_ms


logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1


class AlignMode(str, Enum):
    """Solver used by align"""
    QUANTUM = "quantum"
    DP = "dp"
    BRUTE = "brute"


# ============================================================================
# Report Models
# ============================================================================

class SequencePair(BaseModel):
    a: str
    b: str


class AlignmentRows(BaseModel):
    top: str
    bottom: str


class OracleCheck(BaseModel):
    """Cross-check of the reported profit against a classical referee"""
    referee: str
    referee_profit: int
    agrees: bool


class SearchSettings(BaseModel):
    budget_c: float
    growth: float
    char_mode: str
    adder: str
    backend: str


class RunReport(BaseModel):
    """Machine-readable result of one align run"""
    schema_version: int = REPORT_SCHEMA_VERSION
    mode: AlignMode
    sequences: SequencePair
    profit: int
    alignment: AlignmentRows
    path: str
    valid: bool
    edit_distance: int
    seed: int
    budget_used: int = 0
    budget_limit: float = 0.0
    rounds: int = 0
    search: Optional[SearchSettings] = None
    wall_time_ms: float = 0.0
    resources: Optional[ResourceEstimate] = None
    oracle_check: Optional[OracleCheck] = None

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + '\n'

    def stable_json(self) -> str:
        """JSON with wall time zeroed, for reproducibility comparisons"""
        return self.model_copy(update={"wall_time_ms": 0.0}).to_json()


# ============================================================================
# Runs
# ============================================================================

def _referee(mode: AlignMode, s1, s2, p: ProfitParams):
    """Name and profit of the classical solver that checks `mode`"""
    if mode is AlignMode.DP:
        try:
            return "brute", brute_force_max(s1, s2, p).max_profit
        except InstanceTooLargeError:
            logger.warning("Brute-force cross-check skipped: instance above the enumeration guard")
            return None
    return "dp", dp_max(s1, s2, p)[0]


def run_alignment(seq_a: str, seq_b: str, mode: AlignMode = AlignMode.DP,
                  config: SearchConfig = SearchConfig(), check: bool = False) -> RunReport:
    """Align two sequences and build the run report.

    Quantum mode runs the simulated Grover search under `config`; brute
    mode always carries a DP cross-check, other modes only with `check`.
    """
    mode = AlignMode(mode)
    p = config.p
    s1, s2 = as_sequence(seq_a), as_sequence(seq_b)
    started = time.perf_counter()

    extra = {}
    resources = None
    if mode is AlignMode.QUANTUM:
        result, trace = find_max(s1, s2, config)
        profit, path = result.profit, result.path
        extra = dict(budget_used=result.budget_used, budget_limit=result.budget_limit,
                     rounds=result.rounds)
        resources = estimate_resources(len(s1), len(s2), p, config.char_mode, config.adder,
                                       count_gates=True, s1=str(s1), s2=str(s2))
        extra["search"] = SearchSettings(budget_c=config.budget_c, growth=config.growth,
                                         char_mode=config.char_mode.value, adder=config.adder.value,
                                         backend=config.backend)
    elif mode is AlignMode.BRUTE:
        oracle = brute_force_max(s1, s2, p)
        profit = oracle.max_profit
        path = min(oracle.optimal_paths, key=lambda q: (len(q), [-s.value for s in q]))
    else:
        profit, path = dp_max(s1, s2, p)

    alignment = decode_alignment(path, s1, s2, p)
    oracle_check = None
    if check or mode is AlignMode.BRUTE:
        referee = _referee(mode, s1, s2, p)
        if referee is not None:
            name, ref_profit = referee
            oracle_check = OracleCheck(referee=name, referee_profit=ref_profit, agrees=ref_profit == profit)

    report = RunReport(
        mode=mode,
        sequences=SequencePair(a=str(s1), b=str(s2)),
        profit=profit,
        alignment=AlignmentRows(top=alignment.top, bottom=alignment.bottom),
        path=str(path),
        valid=True,
        edit_distance=edit_distance(s1, s2),
        seed=config.seed,
        resources=resources,
        oracle_check=oracle_check,
        wall_time_ms=format_duration_ms(time.perf_counter() - started),
        **extra,
    )
    logger.debug("align %s: profit %d in %.1f ms", mode.value, profit, report.wall_time_ms)
    return report


def search_config_from(settings: dict, **overrides) -> SearchConfig:
    """SearchConfig from ConfigManager values with CLI overrides on top"""
    merged = {**settings, **{k: v for k, v in overrides.items() if v is not None}}
    p = merged.get("p", DEFAULT_PROFIT)
    return SearchConfig(
        budget_c=float(merged.get("budget_c", 3.0)),
        growth=float(merged.get("growth", 8 / 7)),
        seed=int(merged.get("seed", 0)),
        p=p,
        char_mode=CharMode(merged.get("char_mode", "reuse")),
        adder=AdderKind(merged.get("adder", "draper")),
        backend=merged.get("backend", "sparse"),
        max_qubits=int(merged.get("max_qubits", 28)),
    )
