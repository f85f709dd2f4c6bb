"""
Alignment Core
==============
Domain model for pairwise DNA alignment on the edit graph: nucleotide and
transition encodings, the additive profit function, path scoring and
decoding of a transition string into a gapped alignment.

The horizontal sequence (length m) labels the columns of the grid and the
vertical sequence (length n) labels the rows. A walk starts at (0, 0) and
must end at (m, n).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Tuple

from .utils import InvalidPathError, SequenceValidationError


# ============================================================================
# Encodings
# ============================================================================

NUCLEOTIDE_CODES = {'A': 0b00, 'C': 0b01, 'G': 0b10, 'T': 0b11}
CODE_NUCLEOTIDES = {code: base for base, code in NUCLEOTIDE_CODES.items()}
GAP = '_'


def encode_base(symbol: str, position: Optional[int] = None) -> int:
    """Map a nucleotide to its 2-bit code.

    Args:
        symbol: one of A, C, G, T (case-insensitive)
        position: 1-based position used in the error message

    Returns:
        The 2-bit code (A=00, C=01, G=10, T=11)
    """
    code = NUCLEOTIDE_CODES.get(symbol.upper()) if isinstance(symbol, str) and len(symbol) == 1 else None
    if code is None:
        where = f" at position {position}" if position is not None else ""
        raise SequenceValidationError(f"invalid nucleotide {symbol!r}{where}")
    return code


def decode_base(code: int) -> str:
    """Inverse of encode_base"""
    try:
        return CODE_NUCLEOTIDES[code]
    except KeyError:
        raise SequenceValidationError(f"invalid nucleotide code {code!r}") from None


class Transition(Enum):
    """One step of a walk; the value is its 2-bit code (horizontal bit high)"""
    NONE = 0b00
    VERTICAL = 0b01
    HORIZONTAL = 0b10
    DIAGONAL = 0b11

    @property
    def letter(self) -> str:
        return _TRANSITION_LETTERS[self]

    @property
    def moves_horizontal(self) -> bool:
        return bool(self.value & 0b10)

    @property
    def moves_vertical(self) -> bool:
        return bool(self.value & 0b01)

    @classmethod
    def from_letter(cls, letter: str) -> 'Transition':
        try:
            return _LETTER_TRANSITIONS[letter.upper()]
        except KeyError:
            raise InvalidPathError(f"unknown transition letter {letter!r}") from None


_TRANSITION_LETTERS = {
    Transition.NONE: 'N',
    Transition.VERTICAL: 'V',
    Transition.HORIZONTAL: 'H',
    Transition.DIAGONAL: 'D',
}
_LETTER_TRANSITIONS = {letter: tr for tr, letter in _TRANSITION_LETTERS.items()}


# ============================================================================
# Domain Types
# ============================================================================

@dataclass(frozen=True)
class Sequence:
    """Validated nucleotide string, stored uppercase"""
    bases: str

    def __post_init__(self):
        text = self.bases.upper() if isinstance(self.bases, str) else self.bases
        if not isinstance(text, str):
            raise SequenceValidationError(f"sequence must be a string, got {type(self.bases).__name__}")
        for position, symbol in enumerate(text, start=1):
            encode_base(symbol, position)
        object.__setattr__(self, 'bases', text)

    @property
    def length(self) -> int:
        return len(self.bases)

    def __len__(self) -> int:
        return len(self.bases)

    def __getitem__(self, index: int) -> str:
        return self.bases[index]

    def __str__(self) -> str:
        return self.bases

    def encoded(self) -> List[int]:
        """2-bit code per base"""
        return [NUCLEOTIDE_CODES[b] for b in self.bases]


def as_sequence(value) -> Sequence:
    return value if isinstance(value, Sequence) else Sequence(value)


@dataclass(frozen=True)
class ProfitParams:
    """Per-step profits: x for an indel, x+y for a mismatch, x+z for a match"""
    x: int = 1
    y: int = 1
    z: int = 2

    def __post_init__(self):
        for name in ('x', 'y', 'z'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValueError(f"profit parameter {name} must be an integer, got {value!r}")
        if self.x <= 0 or self.y <= 0:
            raise ValueError(f"profit parameters need x > 0 and y > 0, got x={self.x}, y={self.y}")
        if self.z <= self.y:
            raise ValueError(f"profit parameters need z > y, got y={self.y}, z={self.z}")


DEFAULT_PROFIT = ProfitParams()


@dataclass(frozen=True)
class GridModel:
    """The (m+1) x (n+1) edit graph"""
    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError(f"grid dimensions must be non-negative, got ({self.m}, {self.n})")

    @property
    def node_count(self) -> int:
        return (self.m + 1) * (self.n + 1)


@dataclass(frozen=True)
class TransitionString:
    """Ordered walk through the edit graph"""
    steps: Tuple[Transition, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'steps', tuple(self.steps))

    @classmethod
    def parse(cls, letters: str) -> 'TransitionString':
        """Build from letters N, V, H, D (separators ',' and ' ' ignored)"""
        return cls(tuple(Transition.from_letter(ch) for ch in letters if ch not in ', '))

    @classmethod
    def from_index(cls, value: int, t: int) -> 'TransitionString':
        """Decode a step-register value; step i occupies bits 2i (vertical) and 2i+1 (horizontal)"""
        return cls(tuple(Transition((value >> (2 * i)) & 0b11) for i in range(t)))

    def to_index(self) -> int:
        """Encode as a step-register value"""
        return sum(step.value << (2 * i) for i, step in enumerate(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __str__(self) -> str:
        return ''.join(step.letter for step in self.steps)

    def canonical(self) -> 'TransitionString':
        """Drop None steps"""
        return TransitionString(tuple(s for s in self.steps if s is not Transition.NONE))

    def padded(self, t: int) -> 'TransitionString':
        """Append None steps up to length t"""
        if len(self.steps) > t:
            raise InvalidPathError(f"path of length {len(self.steps)} does not fit in t={t} steps")
        return TransitionString(self.steps + (Transition.NONE,) * (t - len(self.steps)))

    def displacement(self) -> Tuple[int, int]:
        """Total (horizontal, vertical) moves"""
        h = sum(1 for s in self.steps if s.moves_horizontal)
        v = sum(1 for s in self.steps if s.moves_vertical)
        return h, v


@dataclass(frozen=True)
class Alignment:
    """Gapped two-row alignment"""
    top: str
    bottom: str
    profit: int = 0

    def __post_init__(self):
        if len(self.top) != len(self.bottom):
            raise InvalidPathError("alignment rows differ in length")
        for a, b in zip(self.top, self.bottom):
            if a == GAP and b == GAP:
                raise InvalidPathError("alignment column has a gap in both rows")

    def ungapped(self) -> Tuple[str, str]:
        return self.top.replace(GAP, ''), self.bottom.replace(GAP, '')


# ============================================================================
# Profit
# ============================================================================

def step_profit(tr: Transition, ch: Optional[str], cv: Optional[str],
                p: ProfitParams = DEFAULT_PROFIT) -> int:
    """Profit of one step given the characters it consumes"""
    if tr is Transition.NONE:
        return 0
    if tr is Transition.HORIZONTAL or tr is Transition.VERTICAL:
        return p.x
    if ch is None or cv is None:
        raise ValueError("diagonal step needs both characters")
    return p.x + p.z if ch.upper() == cv.upper() else p.x + p.y


def is_valid_path(path: TransitionString, m: int, n: int) -> bool:
    """True iff the walk ends at (m, n); monotone moves mean no prefix can overrun then"""
    return path.displacement() == (m, n)


def path_profit(path: TransitionString, s1, s2,
                p: ProfitParams = DEFAULT_PROFIT) -> Tuple[int, bool]:
    """Score a walk and report whether it is a valid alignment path.

    A step that overruns m or n is still scored (x for an indel, x+y for a
    diagonal since no character pair exists) and scoring stops there.
    """
    s1, s2 = as_sequence(s1), as_sequence(s2)
    m, n = len(s1), len(s2)
    h = v = 0
    profit = 0
    for step in path:
        if step is Transition.NONE:
            continue
        nh = h + (1 if step.moves_horizontal else 0)
        nv = v + (1 if step.moves_vertical else 0)
        if nh > m or nv > n:
            profit += p.x + p.y if step is Transition.DIAGONAL else p.x
            return profit, False
        ch = s1[h] if step.moves_horizontal else None
        cv = s2[v] if step.moves_vertical else None
        profit += step_profit(step, ch, cv, p)
        h, v = nh, nv
    return profit, (h, v) == (m, n)


# ============================================================================
# Decoding
# ============================================================================

def decode_alignment(path: TransitionString, s1, s2,
                     p: ProfitParams = DEFAULT_PROFIT) -> Alignment:
    """Render a valid walk as a gapped alignment (None steps skipped)"""
    s1, s2 = as_sequence(s1), as_sequence(s2)
    if not is_valid_path(path, len(s1), len(s2)):
        raise InvalidPathError("path does not terminate at (m,n)")
    top: List[str] = []
    bottom: List[str] = []
    h = v = 0
    for step in path:
        if step is Transition.HORIZONTAL:
            top.append(s1[h]); bottom.append(GAP); h += 1
        elif step is Transition.VERTICAL:
            top.append(GAP); bottom.append(s2[v]); v += 1
        elif step is Transition.DIAGONAL:
            top.append(s1[h]); bottom.append(s2[v]); h += 1; v += 1
    profit, _ = path_profit(path, s1, s2, p)
    return Alignment(''.join(top), ''.join(bottom), profit)


def alignment_to_path(alignment: Alignment) -> TransitionString:
    """Inverse of decode_alignment (canonical, None-free)"""
    steps = []
    for a, b in zip(alignment.top, alignment.bottom):
        if a == GAP:
            steps.append(Transition.VERTICAL)
        elif b == GAP:
            steps.append(Transition.HORIZONTAL)
        else:
            steps.append(Transition.DIAGONAL)
    return TransitionString(tuple(steps))


# ============================================================================
# Sizing
# ============================================================================

def transition_bounds(m: int, n: int) -> Tuple[int, int]:
    """(fewest, most) steps a valid walk can take"""
    if m < 0 or n < 0:
        raise ValueError(f"sequence lengths must be non-negative, got ({m}, {n})")
    return max(m, n), m + n


def max_profit_bound(m: int, n: int, p: ProfitParams = DEFAULT_PROFIT) -> int:
    """Upper bound on the profit of any valid walk: min(m,n)(x+z) + |m-n|x.

    A walk with d diagonals scores at most (m+n)x + d(z-x), so when z < x
    the all-indel walk is the bound instead.
    """
    if m < 0 or n < 0:
        raise ValueError(f"sequence lengths must be non-negative, got ({m}, {n})")
    if p.z < p.x:
        return (m + n) * p.x
    return min(m, n) * (p.x + p.z) + abs(m - n) * p.x


def iter_step_strings(t: int) -> Iterable[TransitionString]:
    """Every one of the 4^t step strings, in step-register order"""
    for value in range(4 ** t):
        yield TransitionString.from_index(value, t)
