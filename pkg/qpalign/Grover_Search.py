"""
Grover Maximum Finding
======================
Phase oracle (profit above a threshold on a valid walk), inversion about
the mean over the step register, and the threshold-raising driver that
searches the 4^t step strings for the most profitable alignment.

The driver draws Grover iteration counts from a randomized schedule whose
bound grows geometrically after each failed round and resets after each
improvement, all inside a hard budget of c * sqrt(4^t) iterations.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .Alignment_Core import (
    DEFAULT_PROFIT,
    Alignment,
    ProfitParams,
    TransitionString,
    as_sequence,
    decode_alignment,
    max_profit_bound,
    path_profit,
)
from .Circuit_Builder import (
    AdderKind,
    CharMode,
    CircuitBuilder,
    CircuitSpec,
    ProfitPlan,
    build_profit_accumulation,
    comparator_compute_gates,
    hadamard_layer,
    inverse_gates,
    run_circuit,
)
from .QSim_Engine import Gate, QuantumState, RegisterLayout, make_rng
from .utils import InstanceTooLargeError, SimulationError


logger = logging.getLogger(__name__)

DEFAULT_MAX_QUBITS = 28


# ============================================================================
# Configuration and Results
# ============================================================================

@dataclass(frozen=True)
class SearchConfig:
    """Driver settings"""
    budget_c: float = 3.0
    growth: float = 8 / 7
    seed: int = 0
    max_rounds: Optional[int] = None
    p: ProfitParams = DEFAULT_PROFIT
    char_mode: CharMode = CharMode.REUSE
    adder: AdderKind = AdderKind.DRAPER
    backend: str = "sparse"
    max_qubits: int = DEFAULT_MAX_QUBITS

    def __post_init__(self):
        if not self.budget_c > 0:
            raise ValueError(f"budget multiplier must be positive, got {self.budget_c}")
        if not 1.0 < self.growth <= 4 / 3:
            raise ValueError(f"schedule growth must lie in (1, 4/3], got {self.growth}")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        object.__setattr__(self, 'char_mode', CharMode(self.char_mode))
        object.__setattr__(self, 'adder', AdderKind(self.adder))


@dataclass(frozen=True)
class RoundRecord:
    iterations: int
    measured: str
    profit: int
    valid: bool
    threshold: int
    accepted: bool


@dataclass
class SearchTrace:
    """Round-by-round log of one search"""
    initial_sample: str = ""
    initial_threshold: int = -1
    rounds: List[RoundRecord] = field(default_factory=list)

    @property
    def total_iterations(self) -> int:
        return sum(r.iterations for r in self.rounds)

    def accepted_thresholds(self) -> List[int]:
        return [r.threshold for r in self.rounds if r.accepted]


@dataclass(frozen=True)
class AlignmentResult:
    """Best alignment found by a search"""
    profit: int
    path: TransitionString
    alignment: Alignment
    valid: bool
    budget_used: int
    budget_limit: float
    rounds: int
    total_qubits: int


# ============================================================================
# Oracles and Diffusion
# ============================================================================

def build_phase_oracle(plan: ProfitPlan, threshold: int,
                       accumulation: Optional[CircuitSpec] = None) -> CircuitSpec:
    """Phase -1 on step branches whose walk is valid with profit > threshold.

    Runs the profit accumulation (no Hadamards), the comparator, marks the
    flag on (borrow AND valid), kicks a Z off the flag, then uncomputes all
    of it so every work register returns to |0>.
    """
    layout = plan.layout
    uf = accumulation if accumulation is not None else build_profit_accumulation(plan, hadamards=False)
    borrow = layout.qubits("borrow")[0]
    valid = layout.qubits("valid")[0]
    flag = layout.qubits("flag")[0]
    compare = comparator_compute_gates(layout.qubits("profit"), borrow, threshold, plan.adder)

    builder = CircuitBuilder(layout)
    if not compare:
        return builder.build()
    with builder.section("U_f"):
        builder.add(uf.gates)
    with builder.section("compare"):
        builder.add(compare)
    with builder.section("mark"):
        mark = Gate.mcx((borrow, valid), flag)
        builder.add([mark, Gate.cphase(math.pi, flag), mark])
    with builder.section("uncompare"):
        builder.add(inverse_gates(compare))
    with builder.section("U_f_dagger"):
        builder.add(inverse_gates(uf.gates))
    return builder.build()


def diffusion(layout: RegisterLayout, register: str = "step") -> CircuitSpec:
    """2|s><s| - I on one register: H, X, MCZ, X, H and a -1 global phase fix"""
    qubits = layout.qubits(register)
    builder = CircuitBuilder(layout)
    if not qubits:
        return builder.build()
    with builder.section("diffusion"):
        builder.add(Gate.h(q) for q in qubits)
        builder.add(Gate.x(q) for q in qubits)
        builder.add(Gate.cphase(math.pi, qubits[-1], qubits[:-1]))
        builder.add(Gate.x(q) for q in qubits)
        builder.add(Gate.h(q) for q in qubits)
        # XZXZ = -I
        q0 = qubits[0]
        builder.add([Gate.x(q0), Gate.cphase(math.pi, q0), Gate.x(q0), Gate.cphase(math.pi, q0)])
    return builder.build()


def build_marking_oracle(layout: RegisterLayout, register: str, marked: Iterable[int]) -> CircuitSpec:
    """Phase -1 on the listed values of one register"""
    qubits = layout.qubits(register)
    width = len(qubits)
    builder = CircuitBuilder(layout)
    with builder.section("marking"):
        for value in sorted(set(marked)):
            if not 0 <= value < (1 << width):
                raise ValueError(f"marked value {value} out of range for register {register!r}")
            target = qubits[-1]
            polarities = [bool((value >> b) & 1) for b in range(width - 1)]
            conjugate = [Gate.x(target)] if not (value >> (width - 1)) & 1 else []
            builder.add(conjugate)
            builder.add(Gate.cphase(math.pi, target, qubits[:-1], polarities))
            builder.add(conjugate)
    return builder.build()


def grover_iterate(state: QuantumState, oracle: CircuitSpec, r: int,
                   diffuser: Optional[CircuitSpec] = None) -> QuantumState:
    """Apply (diffusion . oracle) r times in place"""
    if r < 0:
        raise ValueError(f"iteration count must be non-negative, got {r}")
    if diffuser is None:
        diffuser = diffusion(oracle.layout)
    for _ in range(r):
        state.apply_gates(oracle.gates)
        state.apply_gates(diffuser.gates)
    return state


def marked_probability(k: int, N: int, r: int) -> float:
    """sin^2((2r+1) theta) with sin(theta) = sqrt(k/N)"""
    theta = math.asin(math.sqrt(k / N))
    return math.sin((2 * r + 1) * theta) ** 2


# ============================================================================
# Driver
# ============================================================================

def find_max(s1, s2, config: SearchConfig = SearchConfig()) -> Tuple[AlignmentResult, SearchTrace]:
    """Grover-driven search for the highest-profit valid walk.

    Every measured candidate is re-scored classically before the threshold
    moves, so the returned profit is always the true profit of a valid walk.

    Raises:
        InstanceTooLargeError: layout wider than config.max_qubits
        SimulationError: budget exhausted without sampling any valid walk
    """
    s1, s2 = as_sequence(s1), as_sequence(s2)
    p = config.p
    plan = ProfitPlan.create(s1, s2, None, p, config.char_mode, config.adder)
    total_qubits = plan.layout.total_qubits
    if total_qubits > config.max_qubits:
        raise InstanceTooLargeError(
            f"instance too large: ({plan.m}, {plan.n}) needs {total_qubits} qubits, limit {config.max_qubits}")

    t = plan.t
    rng = make_rng(config.seed)
    sqrt_n = 2.0 ** t
    budget_limit = config.budget_c * sqrt_n
    max_rounds = config.max_rounds or max(4 * math.ceil(budget_limit), 8)
    ceiling = max_profit_bound(plan.m, plan.n, p)
    step_qubits = plan.layout.qubits("step")

    trace = SearchTrace()
    first = TransitionString.from_index(int(rng.integers(0, 4 ** t)), t)
    profit, valid = path_profit(first, s1, s2, p)
    threshold = profit if valid else -1
    best: Optional[TransitionString] = first if valid else None
    trace.initial_sample = str(first)
    trace.initial_threshold = threshold
    logger.debug("initial sample %s -> threshold %d", first, threshold)

    prepared = run_circuit(hadamard_layer(plan), backend=config.backend)
    accumulation = build_profit_accumulation(plan, hadamards=False)
    diffuser = diffusion(plan.layout)
    oracles: Dict[int, CircuitSpec] = {}

    bound = 1.0
    used = 0
    while len(trace.rounds) < max_rounds and threshold < ceiling:
        remaining = int(math.floor(budget_limit - used))
        if remaining <= 0 and used > 0:
            break
        r = min(int(rng.integers(0, math.ceil(bound))), max(remaining, 0))

        if threshold not in oracles:
            oracles[threshold] = build_phase_oracle(plan, threshold, accumulation)
        state = grover_iterate(prepared.copy(), oracles[threshold], r, diffuser)
        outcome, bits = state.measure(step_qubits, rng)
        used += r

        candidate = TransitionString.from_index(outcome, t)
        profit, valid = path_profit(candidate, s1, s2, p)
        accepted = valid and profit > threshold
        if accepted:
            threshold = profit
            best = candidate
            bound = 1.0
        else:
            bound = min(config.growth * bound, sqrt_n)
        trace.rounds.append(RoundRecord(r, bits, profit, valid, threshold, accepted))
        logger.debug("round %d: r=%d measured %s profit=%d valid=%s threshold=%d",
                     len(trace.rounds), r, candidate, profit, valid, threshold)

    if best is None:
        raise SimulationError("search budget exhausted without sampling a valid walk")

    path = best.canonical()
    alignment = decode_alignment(path, s1, s2, p)
    result = AlignmentResult(
        profit=threshold,
        path=path,
        alignment=alignment,
        valid=True,
        budget_used=used,
        budget_limit=budget_limit,
        rounds=len(trace.rounds),
        total_qubits=total_qubits,
    )
    logger.info("quantum search on (%d, %d): profit %d after %d rounds, %d Grover iterations",
                plan.m, plan.n, result.profit, result.rounds, used)
    return result, trace
