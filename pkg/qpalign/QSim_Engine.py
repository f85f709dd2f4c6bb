"""
Quantum Simulation Engine
=========================
Gate-level simulator with two interchangeable backends behind one
interface:

- DenseState: the full 2^q amplitude vector (correctness referee)
- SparseState: only the nonzero amplitudes, as parallel key/amplitude arrays

Bit convention: qubit 0 is the least-significant bit of the basis index and
of the first register; printed bitstrings are MSB-left.

Randomness comes from numpy's PCG64 generator seeded with a 64-bit integer,
so a seed fixes the whole measurement transcript on either backend.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .utils import InstanceTooLargeError, SimulationError, format_bitstring


logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
PRUNE_THRESHOLD = 1e-14
DENSE_MAX_QUBITS = 26
SPARSE_MAX_QUBITS = 62
_SQRT2_INV = 1.0 / math.sqrt(2.0)


# ============================================================================
# Register Layout
# ============================================================================

@dataclass(frozen=True)
class Register:
    """Named run of contiguous qubits"""
    name: str
    width: int
    offset: int

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(range(self.offset, self.offset + self.width))


@dataclass(frozen=True)
class RegisterLayout:
    """Disjoint contiguous registers; offsets ascend in declaration order"""
    registers: Tuple[Register, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'registers', tuple(self.registers))
        names = set()
        expected_offset = 0
        for reg in self.registers:
            if reg.name in names:
                raise ValueError(f"duplicate register name {reg.name!r}")
            if reg.width < 0:
                raise ValueError(f"register {reg.name!r} has negative width")
            if reg.offset != expected_offset:
                raise ValueError(f"register {reg.name!r} is not contiguous (offset {reg.offset}, expected {expected_offset})")
            names.add(reg.name)
            expected_offset += reg.width

    @classmethod
    def build(cls, widths: Iterable[Tuple[str, int]]) -> 'RegisterLayout':
        """Lay registers out back to back in the given order"""
        registers = []
        offset = 0
        for name, width in widths:
            registers.append(Register(name, width, offset))
            offset += width
        return cls(tuple(registers))

    @property
    def total_qubits(self) -> int:
        return sum(reg.width for reg in self.registers)

    @property
    def names(self) -> List[str]:
        return [reg.name for reg in self.registers]

    def __contains__(self, name: str) -> bool:
        return any(reg.name == name for reg in self.registers)

    def register(self, name: str) -> Register:
        for reg in self.registers:
            if reg.name == name:
                return reg
        raise ValueError(f"no register named {name!r} in layout {self.names}")

    def qubits(self, name: str) -> Tuple[int, ...]:
        return self.register(name).qubits

    def value_of(self, basis: int, name: str) -> int:
        """Extract a register's value from a basis index"""
        reg = self.register(name)
        return (basis >> reg.offset) & ((1 << reg.width) - 1)

    def compose(self, values: Dict[str, int]) -> int:
        """Build a basis index from per-register values"""
        basis = 0
        for name, value in values.items():
            reg = self.register(name)
            if value < 0 or value >= (1 << reg.width):
                raise ValueError(f"value {value} does not fit register {name!r} of width {reg.width}")
            basis |= value << reg.offset
        return basis


# ============================================================================
# Gates
# ============================================================================

class GateKind(Enum):
    """Supported gate kinds"""
    H = "h"
    X = "x"
    CX = "cx"
    MCX = "mcx"
    CPHASE = "cphase"
    SWAP = "swap"


@dataclass(frozen=True)
class Gate:
    """One gate record.

    Controls fire on |1> when their polarity is True and on |0> when False.
    CPHASE multiplies by e^{i*angle} when its target is |1> and every control
    is satisfied; with no controls it is a plain phase gate.
    """
    kind: GateKind
    targets: Tuple[int, ...]
    controls: Tuple[int, ...] = ()
    polarities: Tuple[bool, ...] = ()
    angle: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'targets', tuple(int(q) for q in self.targets))
        object.__setattr__(self, 'controls', tuple(int(q) for q in self.controls))
        polarities = tuple(bool(p) for p in self.polarities) if self.polarities else (True,) * len(self.controls)
        object.__setattr__(self, 'polarities', polarities)

        if len(self.polarities) != len(self.controls):
            raise ValueError("one polarity per control is required")
        expected_targets = 2 if self.kind is GateKind.SWAP else 1
        if len(self.targets) != expected_targets:
            raise ValueError(f"{self.kind.name} takes {expected_targets} target(s), got {len(self.targets)}")
        qubits = self.targets + self.controls
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {self.kind.name}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{self.kind.name}: targets and controls must be distinct qubits")
        if self.kind is GateKind.CX and len(self.controls) != 1:
            raise ValueError("CX takes exactly one control")
        if self.kind is GateKind.CPHASE:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError("CPHASE needs a finite angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind.name} takes no angle")

    # ------------------------------------------------------------------
    # Factories
    # ------------------------------------------------------------------

    @classmethod
    def h(cls, target: int) -> 'Gate':
        return cls(GateKind.H, (target,))

    @classmethod
    def x(cls, target: int) -> 'Gate':
        return cls(GateKind.X, (target,))

    @classmethod
    def cx(cls, control: int, target: int, polarity: bool = True) -> 'Gate':
        return cls(GateKind.CX, (target,), (control,), (polarity,))

    @classmethod
    def mcx(cls, controls: Sequence[int], target: int,
            polarities: Optional[Sequence[bool]] = None) -> 'Gate':
        controls = tuple(controls)
        if not controls:
            return cls.x(target)
        return cls(GateKind.MCX, (target,), controls, tuple(polarities) if polarities is not None else ())

    @classmethod
    def cphase(cls, angle: float, target: int, controls: Sequence[int] = (),
               polarities: Optional[Sequence[bool]] = None) -> 'Gate':
        return cls(GateKind.CPHASE, (target,), tuple(controls),
                   tuple(polarities) if polarities is not None else (), float(angle))

    @classmethod
    def swap(cls, a: int, b: int) -> 'Gate':
        return cls(GateKind.SWAP, (a, b))

    # ------------------------------------------------------------------

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.targets + self.controls

    def inverse(self) -> 'Gate':
        if self.kind is GateKind.CPHASE:
            return Gate(self.kind, self.targets, self.controls, self.polarities, -self.angle)
        return self

    def __str__(self) -> str:
        ctrl = ''.join(f" {'' if p else '!'}c{q}" for q, p in zip(self.controls, self.polarities))
        angle = f"({self.angle:.6g})" if self.angle is not None else ""
        return f"{self.kind.value}{angle} {' '.join(f'q{t}' for t in self.targets)}{ctrl}"


# ============================================================================
# Random Number Generator
# ============================================================================

def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator from a 64-bit seed (the single randomness source)"""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


# ============================================================================
# Quantum State Interface
# ============================================================================

def _register_values(keys: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    values = np.zeros(keys.shape, dtype=np.int64)
    for i, q in enumerate(qubits):
        values |= ((keys >> q) & 1) << i
    return values


class QuantumState(ABC):
    """Abstract base class for simulator backends"""

    backend: str = ""

    def __init__(self, num_qubits: int):
        if num_qubits < 0:
            raise ValueError("qubit count must be non-negative")
        self.num_qubits = num_qubits

    # ------------------------------------------------------------------
    # Backend hooks
    # ------------------------------------------------------------------

    @abstractmethod
    def _apply(self, gate: Gate):
        """Apply a range-checked gate in place"""

    @abstractmethod
    def _entries(self) -> Tuple[np.ndarray, np.ndarray]:
        """(basis indices, amplitudes) covering every nonzero amplitude"""

    @abstractmethod
    def _project(self, keep: np.ndarray, scale: float):
        """Keep entries selected by `keep` (aligned with _entries) and rescale"""

    @abstractmethod
    def copy(self) -> 'QuantumState':
        """Independent copy"""

    # ------------------------------------------------------------------
    # Shared operations
    # ------------------------------------------------------------------

    def apply_gate(self, gate: Gate) -> 'QuantumState':
        for q in gate.qubits:
            if q >= self.num_qubits:
                raise SimulationError(
                    f"qubit index {q} out of range for {self.num_qubits}-qubit state in {gate.kind.name}")
        self._apply(gate)
        return self

    def apply_gates(self, gates: Iterable[Gate]) -> 'QuantumState':
        for gate in gates:
            self.apply_gate(gate)
        return self

    def norm_squared(self) -> float:
        _, amps = self._entries()
        return float(np.sum(np.abs(amps) ** 2))

    def amplitudes(self) -> Dict[int, complex]:
        """Nonzero amplitudes keyed by basis index"""
        keys, amps = self._entries()
        keep = np.abs(amps) > PRUNE_THRESHOLD
        return {int(k): complex(a) for k, a in zip(keys[keep], amps[keep])}

    def amplitude(self, basis: int) -> complex:
        return self.amplitudes().get(basis, 0j)

    def support_size(self) -> int:
        _, amps = self._entries()
        return int(np.count_nonzero(np.abs(amps) > PRUNE_THRESHOLD))

    def register_distribution(self, qubits: Sequence[int]) -> np.ndarray:
        """Marginal probability of every value of the given qubits"""
        keys, amps = self._entries()
        values = _register_values(keys, qubits)
        return np.bincount(values, weights=np.abs(amps) ** 2, minlength=1 << len(qubits))

    def expect_basis(self, predicate: Callable[[int], bool]) -> float:
        """Total probability of basis states satisfying predicate(basis_index)"""
        keys, amps = self._entries()
        probs = np.abs(amps) ** 2
        nonzero = np.flatnonzero(probs > 0.0)
        return float(sum(probs[i] for i in nonzero if predicate(int(keys[i]))))

    def measure(self, qubits: Sequence[int], rng: np.random.Generator) -> Tuple[int, str]:
        """Sample the given qubits and collapse the state in place.

        Returns:
            (outcome value, outcome bitstring MSB-left)
        """
        qubits = tuple(qubits)
        for q in qubits:
            if q >= self.num_qubits:
                raise SimulationError(f"qubit index {q} out of range for measurement")
        probs = self.register_distribution(qubits)
        total = float(probs.sum())
        cumulative = np.cumsum(probs)
        draw = rng.random() * total
        outcome = int(min(np.searchsorted(cumulative, draw, side='right'), len(probs) - 1))
        while probs[outcome] <= 0.0 and outcome > 0:
            outcome -= 1
        p_outcome = float(probs[outcome])
        if p_outcome <= 0.0:
            raise SimulationError("measurement projected onto a zero-norm subspace")

        keys, _ = self._entries()
        keep = _register_values(keys, qubits) == outcome
        self._project(keep, 1.0 / math.sqrt(p_outcome))
        return outcome, format_bitstring(outcome, len(qubits))

    def fidelity(self, other: 'QuantumState') -> float:
        """|<self|other>|^2 over the union of supports"""
        mine = self.amplitudes()
        theirs = other.amplitudes()
        overlap = sum(mine[k].conjugate() * theirs[k] for k in mine.keys() & theirs.keys())
        return abs(overlap) ** 2

    def max_amplitude_difference(self, other: 'QuantumState') -> float:
        mine = self.amplitudes()
        theirs = other.amplitudes()
        keys = mine.keys() | theirs.keys()
        return max((abs(mine.get(k, 0j) - theirs.get(k, 0j)) for k in keys), default=0.0)


# ============================================================================
# Dense Backend
# ============================================================================

class DenseState(QuantumState):
    """Full amplitude vector; axis n-1-q of the reshaped tensor is qubit q"""

    backend = "dense"

    def __init__(self, num_qubits: int, basis: int = 0):
        super().__init__(num_qubits)
        if num_qubits > DENSE_MAX_QUBITS:
            raise InstanceTooLargeError(
                f"dense backend limited to {DENSE_MAX_QUBITS} qubits, requested {num_qubits}")
        self._amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        self._amps[basis] = 1.0

    def copy(self) -> 'DenseState':
        other = DenseState.__new__(DenseState)
        other.num_qubits = self.num_qubits
        other._amps = self._amps.copy()
        return other

    @property
    def vector(self) -> np.ndarray:
        return self._amps

    def _selector(self, fixed: Dict[int, int]) -> tuple:
        sel: List[Union[slice, int]] = [slice(None)] * self.num_qubits
        for q, bit in fixed.items():
            sel[self.num_qubits - 1 - q] = bit
        return tuple(sel)

    def _apply(self, gate: Gate):
        view = self._amps.reshape((2,) * self.num_qubits)
        fixed = {c: int(p) for c, p in zip(gate.controls, gate.polarities)}
        kind = gate.kind

        if kind is GateKind.SWAP:
            a, b = gate.targets
            s01 = self._selector({**fixed, a: 0, b: 1})
            s10 = self._selector({**fixed, a: 1, b: 0})
            tmp = view[s01].copy()
            view[s01] = view[s10]
            view[s10] = tmp
            return

        t = gate.targets[0]
        s1 = self._selector({**fixed, t: 1})
        if kind is GateKind.CPHASE:
            view[s1] *= np.exp(1j * gate.angle)
            return

        s0 = self._selector({**fixed, t: 0})
        if kind is GateKind.H:
            a = view[s0].copy()
            b = view[s1].copy()
            view[s0] = (a + b) * _SQRT2_INV
            view[s1] = (a - b) * _SQRT2_INV
        else:
            tmp = view[s0].copy()
            view[s0] = view[s1]
            view[s1] = tmp

    def _entries(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.arange(self._amps.size, dtype=np.int64), self._amps

    def _project(self, keep: np.ndarray, scale: float):
        self._amps = np.where(keep, self._amps * scale, 0.0).astype(np.complex128)


# ============================================================================
# Sparse Backend
# ============================================================================

class SparseState(QuantumState):
    """Nonzero amplitudes only (magnitude above PRUNE_THRESHOLD)"""

    backend = "sparse"

    def __init__(self, num_qubits: int, basis: int = 0):
        super().__init__(num_qubits)
        if num_qubits > SPARSE_MAX_QUBITS:
            raise InstanceTooLargeError(
                f"sparse backend limited to {SPARSE_MAX_QUBITS} qubits, requested {num_qubits}")
        self._keys = np.array([basis], dtype=np.int64)
        self._amps = np.array([1.0 + 0j], dtype=np.complex128)

    def copy(self) -> 'SparseState':
        other = SparseState.__new__(SparseState)
        other.num_qubits = self.num_qubits
        other._keys = self._keys.copy()
        other._amps = self._amps.copy()
        return other

    def _control_mask(self, gate: Gate) -> np.ndarray:
        on = 0
        off = 0
        for q, polarity in zip(gate.controls, gate.polarities):
            if polarity:
                on |= 1 << q
            else:
                off |= 1 << q
        keys = self._keys
        return ((keys & on) == on) & ((keys & off) == 0)

    def _apply(self, gate: Gate):
        mask = self._control_mask(gate)
        kind = gate.kind

        if kind is GateKind.SWAP:
            a, b = gate.targets
            differ = ((self._keys >> a) & 1) != ((self._keys >> b) & 1)
            flip = np.int64((1 << a) | (1 << b))
            self._keys = np.where(mask & differ, self._keys ^ flip, self._keys)
            return

        bit = np.int64(1 << gate.targets[0])
        if kind is GateKind.CPHASE:
            hit = mask & ((self._keys & bit) != 0)
            self._amps = np.where(hit, self._amps * np.exp(1j * gate.angle), self._amps)
            return
        if kind is not GateKind.H:
            self._keys = np.where(mask, self._keys ^ bit, self._keys)
            return

        keys, amps = self._keys[mask], self._amps[mask]
        high = (keys & bit) != 0
        low_keys = keys & ~bit
        scaled = amps * _SQRT2_INV
        all_keys = np.concatenate([self._keys[~mask], low_keys, low_keys | bit])
        all_amps = np.concatenate([self._amps[~mask], scaled, np.where(high, -scaled, scaled)])

        unique, inverse = np.unique(all_keys, return_inverse=True)
        real = np.bincount(inverse, weights=all_amps.real, minlength=unique.size)
        imag = np.bincount(inverse, weights=all_amps.imag, minlength=unique.size)
        merged = real + 1j * imag
        keep = np.abs(merged) > PRUNE_THRESHOLD
        self._keys = unique[keep]
        self._amps = merged[keep]

    def _entries(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._keys, self._amps

    def _project(self, keep: np.ndarray, scale: float):
        self._keys = self._keys[keep]
        self._amps = self._amps[keep] * scale


# ============================================================================
# Module-level API
# ============================================================================

BACKENDS = {
    "dense": DenseState,
    "sparse": SparseState,
}


def new_state(num_qubits: int, backend: str = "sparse", basis: int = 0) -> QuantumState:
    """Fresh basis state |basis> on the chosen backend"""
    try:
        cls = BACKENDS[backend]
    except KeyError:
        raise ValueError(f"unknown backend {backend!r}; choose from {sorted(BACKENDS)}") from None
    if basis < 0 or (num_qubits < 63 and basis >= (1 << num_qubits)):
        raise ValueError(f"basis index {basis} out of range for {num_qubits} qubits")
    return cls(num_qubits, basis)


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    return state.apply_gate(gate)


def measure(state: QuantumState, qubits: Sequence[int],
            rng: np.random.Generator) -> Tuple[str, QuantumState]:
    """Sample a register; returns (bitstring, collapsed state)"""
    _, bits = state.measure(qubits, rng)
    return bits, state


def expect_basis(state: QuantumState, predicate: Callable[[int], bool]) -> float:
    return state.expect_basis(predicate)


def sample_counts(state: QuantumState, qubits: Sequence[int], shots: int,
                  rng: np.random.Generator) -> Dict[int, int]:
    """Repeated seeded measurements of fresh copies of the state"""
    counts: Dict[int, int] = {}
    for _ in range(shots):
        outcome, _ = state.copy().measure(qubits, rng)
        counts[outcome] = counts.get(outcome, 0) + 1
    return counts
