"""
Resource Estimator
==================
Qubit and gate accounting for the alignment circuit of an (m, n) instance.
Widths come from the sizing formulas; gate count and depth come from the
circuit actually built for a representative instance of those lengths.
"""

import logging
from typing import Optional, Tuple

from pydantic import BaseModel

from .Alignment_Core import (
    DEFAULT_PROFIT,
    GridModel,
    ProfitParams,
    Sequence,
    max_profit_bound,
    transition_bounds,
)
from .Circuit_Builder import (
    AdderKind,
    CharMode,
    ProfitPlan,
    bit_width,
    build_profit_accumulation,
)
from .utils import SequenceValidationError


logger = logging.getLogger(__name__)

ANCILLA_QUBITS = 3   # valid, flag, comparator borrow


class ResourceEstimate(BaseModel):
    """Register widths and circuit size of one instance"""
    m: int
    n: int
    t: int
    t_min: int
    node_count: int
    step_qubits: int
    counter_widths: Tuple[int, int]
    address_widths: Tuple[int, int]
    max_profit: int
    profit_width: int
    char_qubits: int
    ancilla_qubits: int
    total_qubits: int
    char_mode: str
    adder: str
    gate_count: Optional[int] = None
    depth: Optional[int] = None
    grover_iteration_gates: Optional[int] = None


def estimate_resources(m: int, n: int, p: ProfitParams = DEFAULT_PROFIT,
                       mode: CharMode = CharMode.REUSE,
                       adder: AdderKind = AdderKind.DRAPER,
                       count_gates: bool = True,
                       s1: Optional[str] = None, s2: Optional[str] = None) -> ResourceEstimate:
    """Fill a ResourceEstimate for sequences of lengths (m, n).

    Gate counts need concrete sequences; without them a poly-A pair of the
    right lengths stands in (qRAM gate counts depend on the bases).
    """
    if m < 0 or n < 0:
        raise SequenceValidationError(f"sequence lengths must be non-negative, got ({m}, {n})")
    mode, adder = CharMode(mode), AdderKind(adder)
    s1 = Sequence(s1 if s1 is not None else "A" * m)
    s2 = Sequence(s2 if s2 is not None else "A" * n)
    if (len(s1), len(s2)) != (m, n):
        raise SequenceValidationError("sequence lengths disagree with --m/--n")

    plan = ProfitPlan.create(s1, s2, None, p, mode, adder)
    t_min, t = transition_bounds(m, n)
    char_qubits = 4 if mode is CharMode.REUSE else 4 * t
    estimate = ResourceEstimate(
        m=m,
        n=n,
        t=t,
        t_min=t_min,
        node_count=GridModel(m, n).node_count,
        step_qubits=2 * t,
        counter_widths=(plan.counter_width, plan.counter_width),
        address_widths=(bit_width(m), bit_width(n)),
        max_profit=max_profit_bound(m, n, p),
        profit_width=plan.profit_width,
        char_qubits=char_qubits,
        ancilla_qubits=ANCILLA_QUBITS,
        total_qubits=plan.layout.total_qubits,
        char_mode=mode.value,
        adder=adder.value,
    )
    if count_gates:
        # Local import: the oracle builder lives downstream of this module
        from .Grover_Search import build_phase_oracle, diffusion

        accumulation = build_profit_accumulation(plan)
        oracle = build_phase_oracle(plan, estimate.max_profit - 1,
                                    build_profit_accumulation(plan, hadamards=False))
        estimate.gate_count = accumulation.gate_count
        estimate.depth = accumulation.depth
        estimate.grover_iteration_gates = oracle.gate_count + diffusion(plan.layout).gate_count
    logger.debug("resources (%d, %d): %d qubits", m, n, estimate.total_qubits)
    return estimate
