"""
QPAlign
=======
Simulated quantum pairwise DNA alignment: edit-graph walks in superposition,
reversible profit accumulation and Grover maximum finding, checked against
classical brute-force and dynamic-programming oracles.
"""

from .Alignment_Core import (
    Alignment,
    DEFAULT_PROFIT,
    GridModel,
    ProfitParams,
    Sequence,
    Transition,
    TransitionString,
    decode_alignment,
    encode_base,
    max_profit_bound,
    path_profit,
    step_profit,
    transition_bounds,
)
from .Classical_Oracles import OracleResult, brute_force_max, count_paths, dp_max, edit_distance
from .Grover_Search import AlignmentResult, SearchConfig, SearchTrace, find_max
from .utils import (
    InstanceTooLargeError,
    InvalidPathError,
    QPAlignError,
    SequenceValidationError,
    VerificationError,
)

__version__ = "1.0.0"
