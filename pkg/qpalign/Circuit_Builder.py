"""
Circuit Builder
===============
Reversible sub-circuits of the alignment pipeline and the full path-profit
circuit that composes them:

- QFT / inverse QFT
- Draper constant adder and incrementer (plus a ripple MCX variant)
- Multiplexed-MCX qRAM loader
- Character matcher (XOR into the vertical character register)
- One path step: transition superposition, counters, profit, character match
- Validity check and the strict greater-than comparator

Each ``build_*`` function returns an immutable CircuitSpec on its own layout.
The ``*_gates`` emitters return bare gate lists over caller-chosen qubits so
the profit program and the Grover oracle can compose them on one layout.
"""

import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .Alignment_Core import (
    DEFAULT_PROFIT,
    ProfitParams,
    Sequence as NucleotideSequence,
    TransitionString,
    as_sequence,
    max_profit_bound,
)
from .QSim_Engine import Gate, GateKind, QuantumState, RegisterLayout, new_state
from .utils import RegisterOverflowError


logger = logging.getLogger(__name__)


class CharMode(Enum):
    """Character register strategy"""
    REUSE = "reuse"          # one char_h/char_v pair, unloaded after every step
    PER_STEP = "per-step"    # a fresh pair per step, never unloaded inside the step


class AdderKind(Enum):
    """Constant-addition network"""
    DRAPER = "draper"
    RIPPLE = "ripple"


# ============================================================================
# Circuit Specification
# ============================================================================

@dataclass(frozen=True)
class Section:
    """Named half-open gate range [start, stop)"""
    name: str
    start: int
    stop: int


@dataclass(frozen=True)
class CircuitSpec:
    """Ordered gate list over a register layout, with named sections"""
    layout: RegisterLayout
    gates: Tuple[Gate, ...] = field(default_factory=tuple)
    metadata: Tuple[Section, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'gates', tuple(self.gates))
        object.__setattr__(self, 'metadata', tuple(self.metadata))
        total = self.layout.total_qubits
        for index, gate in enumerate(self.gates):
            for q in gate.qubits:
                if q >= total:
                    raise ValueError(f"gate {index} ({gate}) touches qubit {q} outside the {total}-qubit layout")
        for section in self.metadata:
            if not 0 <= section.start <= section.stop <= len(self.gates):
                raise ValueError(f"section {section.name!r} out of range")

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    @cached_property
    def depth(self) -> int:
        """Greedy layering: a gate sits one layer above the latest gate sharing a qubit"""
        level: Dict[int, int] = {}
        depth = 0
        for gate in self.gates:
            layer = 1 + max((level.get(q, 0) for q in gate.qubits), default=0)
            for q in gate.qubits:
                level[q] = layer
            depth = max(depth, layer)
        return depth

    def section(self, name: str) -> Section:
        for section in self.metadata:
            if section.name == name:
                return section
        raise KeyError(name)

    def section_gates(self, name: str) -> Tuple[Gate, ...]:
        section = self.section(name)
        return self.gates[section.start:section.stop]

    def inverse(self) -> 'CircuitSpec':
        """Formal inverse: reversed order, each gate inverted"""
        total = len(self.gates)
        gates = tuple(g.inverse() for g in reversed(self.gates))
        sections = tuple(Section(f"{s.name}_inv", total - s.stop, total - s.start)
                         for s in reversed(self.metadata))
        return CircuitSpec(self.layout, gates, sections)


class CircuitBuilder:
    """Mutable accumulator that freezes into a CircuitSpec"""

    def __init__(self, layout: RegisterLayout):
        self.layout = layout
        self.gates: List[Gate] = []
        self.sections: List[Section] = []

    def add(self, gates: Union[Gate, Iterable[Gate]]) -> 'CircuitBuilder':
        if isinstance(gates, Gate):
            self.gates.append(gates)
        else:
            self.gates.extend(gates)
        return self

    @contextmanager
    def section(self, name: str):
        start = len(self.gates)
        yield self
        self.sections.append(Section(name, start, len(self.gates)))

    def build(self) -> CircuitSpec:
        return CircuitSpec(self.layout, tuple(self.gates), tuple(self.sections))


def run_circuit(spec: CircuitSpec, state: Optional[QuantumState] = None,
                backend: str = "sparse", basis: int = 0) -> QuantumState:
    """Apply a circuit to `state` (or to a fresh |basis> on `backend`)"""
    if state is None:
        state = new_state(spec.layout.total_qubits, backend, basis)
    return state.apply_gates(spec.gates)


def inverse_gates(gates: Sequence[Gate]) -> List[Gate]:
    return [g.inverse() for g in reversed(gates)]


def bit_width(value: int) -> int:
    """ceil(log2(value + 1)): qubits needed to hold 0..value"""
    return max(int(value), 0).bit_length()


def _polarities(controls: Sequence[int], polarities: Optional[Sequence[bool]]) -> Tuple[bool, ...]:
    if polarities is None:
        return (True,) * len(controls)
    if len(polarities) != len(controls):
        raise ValueError("one polarity per control is required")
    return tuple(polarities)


# ============================================================================
# Fourier Transform
# ============================================================================

def qft_gates(qubits: Sequence[int]) -> List[Gate]:
    """QFT on a little-endian register: MSB first, CPhase(pi/2^k) ladder, then reversal swaps"""
    qubits = tuple(qubits)
    width = len(qubits)
    gates: List[Gate] = []
    for j in range(width - 1, -1, -1):
        gates.append(Gate.h(qubits[j]))
        for l in range(j - 1, -1, -1):
            gates.append(Gate.cphase(math.pi / 2 ** (j - l), qubits[j], (qubits[l],)))
    for i in range(width // 2):
        gates.append(Gate.swap(qubits[i], qubits[width - 1 - i]))
    return gates


def iqft_gates(qubits: Sequence[int]) -> List[Gate]:
    return inverse_gates(qft_gates(qubits))


def build_qft(width: int) -> CircuitSpec:
    if width < 1:
        raise ValueError("QFT width must be at least 1")
    builder = CircuitBuilder(RegisterLayout.build([("q", width)]))
    with builder.section("qft"):
        builder.add(qft_gates(range(width)))
    return builder.build()


def build_iqft(width: int) -> CircuitSpec:
    if width < 1:
        raise ValueError("IQFT width must be at least 1")
    builder = CircuitBuilder(RegisterLayout.build([("q", width)]))
    with builder.section("iqft"):
        builder.add(iqft_gates(range(width)))
    return builder.build()


# ============================================================================
# Constant Addition
# ============================================================================

def draper_phase_gates(qubits: Sequence[int], c: int, controls: Sequence[int] = (),
                       polarities: Optional[Sequence[bool]] = None) -> List[Gate]:
    """Fourier-basis phases adding c; qubit j turns by 2*pi*c*2^j / 2^w"""
    width = len(qubits)
    modulus = 1 << width
    pol = _polarities(controls, polarities)
    gates = []
    for j, q in enumerate(qubits):
        turn = (c * (1 << j)) % modulus
        if turn:
            gates.append(Gate.cphase(2 * math.pi * turn / modulus, q, tuple(controls), pol))
    return gates


def ripple_increment_gates(qubits: Sequence[int], controls: Sequence[int] = (),
                           polarities: Optional[Sequence[bool]] = None) -> List[Gate]:
    """+1 mod 2^w: flip bit i when every lower bit is set, highest bit first"""
    qubits = tuple(qubits)
    controls = tuple(controls)
    pol = _polarities(controls, polarities)
    gates = []
    for i in range(len(qubits) - 1, -1, -1):
        gates.append(Gate.mcx(qubits[:i] + controls, qubits[i], (True,) * i + pol))
    return gates


def add_const_gates(qubits: Sequence[int], c: int, controls: Sequence[int] = (),
                    polarities: Optional[Sequence[bool]] = None,
                    adder: AdderKind = AdderKind.DRAPER) -> List[Gate]:
    """|a> -> |(a + c) mod 2^w>, optionally controlled.

    Draper: QFT, controlled phases, IQFT (controls sit on the phases only).
    Ripple: one incrementer on qubits[k:] per set bit k of c.
    """
    qubits = tuple(qubits)
    width = len(qubits)
    if width == 0:
        return []
    c %= 1 << width
    if c == 0:
        return []
    adder = AdderKind(adder)
    if adder is AdderKind.RIPPLE:
        gates = []
        for k in range(width):
            if (c >> k) & 1:
                gates.extend(ripple_increment_gates(qubits[k:], controls, polarities))
        return gates
    return (qft_gates(qubits)
            + draper_phase_gates(qubits, c, controls, polarities)
            + iqft_gates(qubits))


def _adder_sections(builder: CircuitBuilder, qubits: Sequence[int], c: int,
                    controls: Sequence[int], adder: AdderKind):
    adder = AdderKind(adder)
    if adder is AdderKind.RIPPLE:
        with builder.section("ripple"):
            builder.add(add_const_gates(qubits, c, controls, adder=adder))
        return
    with builder.section("qft"):
        builder.add(qft_gates(qubits))
    with builder.section("phase"):
        builder.add(draper_phase_gates(qubits, c, controls))
    with builder.section("iqft"):
        builder.add(iqft_gates(qubits))


def build_add_const(width: int, c: int, controls: int = 0,
                    adder: Union[AdderKind, str] = AdderKind.DRAPER) -> CircuitSpec:
    """Constant adder on register 'target' with `controls` positive control qubits in 'ctrl'"""
    if width < 1:
        raise ValueError("adder width must be at least 1")
    if not 0 <= c < (1 << width):
        raise ValueError(f"constant {c} out of range for width {width}")
    layout = RegisterLayout.build([("target", width), ("ctrl", controls)])
    builder = CircuitBuilder(layout)
    _adder_sections(builder, layout.qubits("target"), c, layout.qubits("ctrl"), adder)
    return builder.build()


def build_incrementer(width: int, control: bool = True,
                      adder: Union[AdderKind, str] = AdderKind.DRAPER) -> CircuitSpec:
    """Controlled +1 mod 2^width"""
    return build_add_const(width, 1 % (1 << width), 1 if control else 0, adder)


# ============================================================================
# qRAM and Character Matching
# ============================================================================

def qram_loader_gates(table: Sequence[int], addr_qubits: Sequence[int],
                      data_qubits: Sequence[int]) -> List[Gate]:
    """XOR table[j] into the data register when the address reads j.

    One MCX per set data bit, controls on the address under j's bit pattern.
    Addresses outside the table leave the data register alone.
    """
    addr_qubits = tuple(addr_qubits)
    width = len(addr_qubits)
    if len(table) > (1 << width):
        raise RegisterOverflowError(
            f"address register of width {width} cannot index a table of {len(table)} entries")
    gates = []
    for j, word in enumerate(table):
        if word < 0 or word >= (1 << len(data_qubits)):
            raise ValueError(f"table entry {word} does not fit {len(data_qubits)} data qubits")
        pattern = tuple(bool((j >> b) & 1) for b in range(width))
        for bit, target in enumerate(data_qubits):
            if (word >> bit) & 1:
                gates.append(Gate.mcx(addr_qubits, target, pattern))
    return gates


def sequence_table(seq) -> List[int]:
    """Lookup table for a counter read after its increment: address a holds s[a-1]"""
    return [0] + as_sequence(seq).encoded()


def build_qram_loader(table: Union[Sequence[int], str, NucleotideSequence],
                      addr_width: Optional[int] = None) -> CircuitSpec:
    """Standalone loader on registers 'addr' and 'data' (2 qubits).

    A nucleotide string is loaded directly (address j holds its j-th base).
    """
    if isinstance(table, (str, NucleotideSequence)):
        table = as_sequence(table).encoded()
    table = list(table)
    needed = bit_width(len(table) - 1) if table else 0
    width = needed if addr_width is None else addr_width
    if width < needed:
        raise RegisterOverflowError(
            f"address width {width} too small for {len(table)} entries (need {needed})")
    layout = RegisterLayout.build([("addr", width), ("data", 2)])
    builder = CircuitBuilder(layout)
    with builder.section("qram"):
        builder.add(qram_loader_gates(table, layout.qubits("addr"), layout.qubits("data")))
    return builder.build()


def char_xor_gates(char_h: Sequence[int], char_v: Sequence[int]) -> List[Gate]:
    """char_v ^= char_h; both bits zero afterwards means the characters match"""
    return [Gate.cx(a, b) for a, b in zip(char_h, char_v)]


def build_char_match() -> CircuitSpec:
    """Match detector on 'char_h', 'char_v' writing into a 'match' qubit, then restoring char_v"""
    layout = RegisterLayout.build([("char_h", 2), ("char_v", 2), ("match", 1)])
    char_h, char_v = layout.qubits("char_h"), layout.qubits("char_v")
    builder = CircuitBuilder(layout)
    with builder.section("xor"):
        builder.add(char_xor_gates(char_h, char_v))
    with builder.section("match"):
        builder.add(Gate.mcx(char_v, layout.qubits("match")[0], (False, False)))
    with builder.section("unxor"):
        builder.add(char_xor_gates(char_h, char_v))
    return builder.build()


# ============================================================================
# Comparator
# ============================================================================

def comparator_offset(width: int, v: int) -> int:
    """Constant that lifts profit > v into the borrow bit: 2^w - v - 1 (0 when no value exceeds v)"""
    v = max(v, -1)
    return max((1 << width) - v - 1, 0)


def comparator_compute_gates(profit: Sequence[int], borrow: int, v: int,
                             adder: AdderKind = AdderKind.DRAPER) -> List[Gate]:
    """Add 2^w - v - 1 to (profit, borrow); borrow ends at 1 iff profit > v"""
    c = comparator_offset(len(profit), v)
    return add_const_gates(tuple(profit) + (borrow,), c, adder=adder)


def build_comparator_gt(width: int, v: int,
                        adder: Union[AdderKind, str] = AdderKind.DRAPER) -> CircuitSpec:
    """flag ^= (profit > v), profit and borrow restored.

    Thresholds below zero accept every value; thresholds at or above 2^w - 1
    accept none and produce an empty circuit.
    """
    layout = RegisterLayout.build([("profit", width), ("borrow", 1), ("flag", 1)])
    borrow = layout.qubits("borrow")[0]
    flag = layout.qubits("flag")[0]
    compute = comparator_compute_gates(layout.qubits("profit"), borrow, v, AdderKind(adder))
    builder = CircuitBuilder(layout)
    if compute:
        with builder.section("compare"):
            builder.add(compute)
        with builder.section("copy"):
            builder.add(Gate.cx(borrow, flag))
        with builder.section("uncompare"):
            builder.add(inverse_gates(compute))
    return builder.build()


# ============================================================================
# Profit Program
# ============================================================================

@dataclass(frozen=True)
class ProfitPlan:
    """Everything that fixes the profit circuit's shape for one instance"""
    s1: NucleotideSequence
    s2: NucleotideSequence
    t: int
    p: ProfitParams = DEFAULT_PROFIT
    char_mode: CharMode = CharMode.REUSE
    adder: AdderKind = AdderKind.DRAPER
    counter_width: int = 0
    profit_width: int = 0

    @classmethod
    def create(cls, s1, s2, t: Optional[int] = None, p: ProfitParams = DEFAULT_PROFIT,
               char_mode: Union[CharMode, str] = CharMode.REUSE,
               adder: Union[AdderKind, str] = AdderKind.DRAPER,
               profit_width: Optional[int] = None) -> 'ProfitPlan':
        s1, s2 = as_sequence(s1), as_sequence(s2)
        m, n = len(s1), len(s2)
        t = m + n if t is None else t
        if t < 0:
            raise ValueError(f"step count must be non-negative, got {t}")
        # Smallest width where count = m (mod 2^w) forces count = m for every count <= t
        counter_width = bit_width(max(m, n, t - m, t - n))
        needed = bit_width(max_profit_bound(m, n, p))
        if profit_width is None:
            profit_width = needed
        elif profit_width < needed:
            raise RegisterOverflowError(
                f"profit register of width {profit_width} cannot hold profit {max_profit_bound(m, n, p)}"
                f" (need {needed} qubits)")
        return cls(s1, s2, t, p, CharMode(char_mode), AdderKind(adder), counter_width, profit_width)

    @property
    def m(self) -> int:
        return len(self.s1)

    @property
    def n(self) -> int:
        return len(self.s2)

    @cached_property
    def layout(self) -> RegisterLayout:
        regs = [
            ("step", 2 * self.t),
            ("counter_h", self.counter_width),
            ("counter_v", self.counter_width),
            ("profit", self.profit_width),
            ("borrow", 1),
        ]
        if self.char_mode is CharMode.REUSE:
            regs += [("char_h", 2), ("char_v", 2)]
        else:
            for i in range(self.t):
                regs += [(f"char_h_{i}", 2), (f"char_v_{i}", 2)]
        regs += [("valid", 1), ("flag", 1)]
        return RegisterLayout.build(regs)

    def char_registers(self, step_index: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        if self.char_mode is CharMode.REUSE:
            return self.layout.qubits("char_h"), self.layout.qubits("char_v")
        return (self.layout.qubits(f"char_h_{step_index}"),
                self.layout.qubits(f"char_v_{step_index}"))

    def step_qubits(self, step_index: int) -> Tuple[int, int]:
        """(vertical bit, horizontal bit) of one step"""
        step = self.layout.qubits("step")
        return step[2 * step_index], step[2 * step_index + 1]


def step_gates(plan: ProfitPlan, step_index: int, hadamards: bool = True) -> List[Gate]:
    """Gate list of one path step on the plan's layout"""
    if not 0 <= step_index < plan.t:
        raise ValueError(f"step index {step_index} out of range for t={plan.t}")
    layout = plan.layout
    p = plan.p
    modulus = 1 << plan.profit_width
    v_bit, h_bit = plan.step_qubits(step_index)
    counter_h, counter_v = layout.qubits("counter_h"), layout.qubits("counter_v")
    profit = layout.qubits("profit")
    char_h, char_v = plan.char_registers(step_index)
    table_h, table_v = sequence_table(plan.s1), sequence_table(plan.s2)

    gates: List[Gate] = []
    if hadamards:
        gates += [Gate.h(v_bit), Gate.h(h_bit)]
    gates += add_const_gates(counter_h, 1, (h_bit,), adder=plan.adder)
    gates += add_const_gates(counter_v, 1, (v_bit,), adder=plan.adder)
    gates += add_const_gates(profit, p.x, (h_bit,), adder=plan.adder)
    gates += add_const_gates(profit, p.x, (v_bit,), adder=plan.adder)
    gates += add_const_gates(profit, (p.y - p.x) % modulus, (h_bit, v_bit), adder=plan.adder)

    load = (qram_loader_gates(table_h, counter_h, char_h)
            + qram_loader_gates(table_v, counter_v, char_v))
    gates += load
    gates += char_xor_gates(char_h, char_v)
    gates += add_const_gates(profit, p.z - p.y, (h_bit, v_bit) + tuple(char_v),
                             (True, True, False, False), adder=plan.adder)
    gates += char_xor_gates(char_h, char_v)
    if plan.char_mode is CharMode.REUSE:
        gates += load
    return gates


def validity_gates(plan: ProfitPlan) -> List[Gate]:
    """valid ^= (counter_h == m and counter_v == n)"""
    layout = plan.layout
    flips = []
    for name, target in (("counter_h", plan.m), ("counter_v", plan.n)):
        for b, q in enumerate(layout.qubits(name)):
            if (target >> b) & 1:
                flips.append(Gate.x(q))
    controls = layout.qubits("counter_h") + layout.qubits("counter_v")
    check = Gate.mcx(controls, layout.qubits("valid")[0], (False,) * len(controls))
    return flips + [check] + flips


def build_step_circuit(step_index: int, plan: ProfitPlan) -> CircuitSpec:
    """One step of the profit program as a fragment on the plan's layout"""
    builder = CircuitBuilder(plan.layout)
    with builder.section(f"step_{step_index}"):
        builder.add(step_gates(plan, step_index))
    return builder.build()


def build_profit_accumulation(plan: ProfitPlan, hadamards: bool = True) -> CircuitSpec:
    """All steps plus the validity check; without hadamards this is the oracle's U_f"""
    builder = CircuitBuilder(plan.layout)
    for i in range(plan.t):
        with builder.section(f"step_{i}"):
            builder.add(step_gates(plan, i, hadamards))
    with builder.section("validity"):
        builder.add(validity_gates(plan))
    spec = builder.build()
    logger.debug("profit circuit (%d, %d) t=%d: %d qubits, %d gates",
                 plan.m, plan.n, plan.t, plan.layout.total_qubits, spec.gate_count)
    return spec


def build_full_profit_circuit(s1, s2, t: Optional[int] = None,
                              mode: Union[CharMode, str] = CharMode.REUSE,
                              p: ProfitParams = DEFAULT_PROFIT,
                              adder: Union[AdderKind, str] = AdderKind.DRAPER,
                              profit_width: Optional[int] = None) -> CircuitSpec:
    """Superposed walks with per-branch counters, profit and validity"""
    plan = ProfitPlan.create(s1, s2, t, p, mode, adder, profit_width)
    return build_profit_accumulation(plan)


def hadamard_layer(plan: ProfitPlan) -> CircuitSpec:
    """Uniform superposition over the step register"""
    builder = CircuitBuilder(plan.layout)
    with builder.section("paths"):
        builder.add(Gate.h(q) for q in plan.layout.qubits("step"))
    return builder.build()


# ============================================================================
# Classical Register Mirror
# ============================================================================

@dataclass(frozen=True)
class RegisterTrace:
    """Register values one step-basis branch carries at the end of the profit circuit"""
    counter_h: int
    counter_v: int
    profit: int
    valid: bool
    chars: Tuple[Tuple[int, int], ...] = ()


def trace_registers(plan: ProfitPlan, path: Union[int, TransitionString]) -> RegisterTrace:
    """Exact classical values of the circuit's registers for one step string.

    Counters and profit are modular at their register widths and lookups
    past the table read 00, so the mirror holds on invalid walks too.
    """
    value = path.padded(plan.t).to_index() if isinstance(path, TransitionString) else int(path)
    p = plan.p
    counter_mod = 1 << plan.counter_width
    profit_mod = 1 << plan.profit_width
    table_h, table_v = sequence_table(plan.s1), sequence_table(plan.s2)

    h = v = profit = 0
    chars = []
    for i in range(plan.t):
        v_bit = (value >> (2 * i)) & 1
        h_bit = (value >> (2 * i + 1)) & 1
        h = (h + h_bit) % counter_mod
        v = (v + v_bit) % counter_mod
        profit += p.x * h_bit + p.x * v_bit + (p.y - p.x) * h_bit * v_bit
        ch = table_h[h] if h < len(table_h) else 0
        cv = table_v[v] if v < len(table_v) else 0
        if h_bit and v_bit and ch == cv:
            profit += p.z - p.y
        profit %= profit_mod
        chars.append((ch, cv))
    valid = h == plan.m and v == plan.n
    if plan.char_mode is CharMode.REUSE:
        chars = []
    return RegisterTrace(h, v, profit, valid, tuple(chars))
