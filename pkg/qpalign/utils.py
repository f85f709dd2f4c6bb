"""
Shared Utilities
================
Error types, configuration loading, FASTA ingestion and the small formatting
helpers used by the engine modules and the command-line application.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple


logger = logging.getLogger(__name__)


# ============================================================================
# Errors
# ============================================================================

class QPAlignError(Exception):
    """Root of every error raised by the alignment engine."""

    exit_code = 1


class SequenceValidationError(QPAlignError, ValueError):
    """Input sequence or FASTA file is malformed."""

    exit_code = 2


class InvalidPathError(QPAlignError, ValueError):
    """A transition string does not describe a walk ending at (m, n)."""

    exit_code = 2


class InstanceTooLargeError(QPAlignError):
    """Instance exceeds the enumeration guard or the simulable width."""

    exit_code = 3


class VerificationError(QPAlignError):
    """A verification check disagreed with its oracle."""

    exit_code = 4


class RegisterOverflowError(QPAlignError):
    """A register is too narrow for the values the circuit must hold."""

    exit_code = 1


class SimulationError(QPAlignError, RuntimeError):
    """Internal simulator failure (bad gate index, zero-norm projection)."""

    exit_code = 1


# ============================================================================
# Configuration
# ============================================================================

MAX_QUBITS_ENV = "QPALIGN_MAX_QUBITS"
CONFIG_PATH_ENV = "QPALIGN_CONFIG"
DEFAULT_CONFIG_FILE = Path.home() / ".qpalign_config.json"


class ConfigManager:
    """Configuration manager for pipeline settings.

    Values resolve as: explicit overrides > environment > config file >
    defaults. The file is only read; it is written only by ``save()``.
    """

    def __init__(self, config_file: Optional[str] = None):
        env_path = os.environ.get(CONFIG_PATH_ENV)
        self.config_file = Path(config_file or env_path or DEFAULT_CONFIG_FILE)
        self.config: Dict[str, Any] = {}
        self.load()

    def load(self):
        """Load configuration from file, falling back to defaults"""
        self.config = self.get_default_config()
        try:
            with open(self.config_file, 'r') as f:
                stored = json.load(f)
        except FileNotFoundError:
            stored = {}
        except (OSError, json.JSONDecodeError) as e:
            logger.warning("Ignoring unreadable config %s: %s", self.config_file, e)
            stored = {}
        if not isinstance(stored, dict):
            logger.warning("Ignoring config %s: top level is not an object", self.config_file)
            stored = {}
        unknown = set(stored) - set(self.config)
        if unknown:
            logger.warning("Ignoring unknown config keys: %s", ", ".join(sorted(unknown)))
        self.config.update({k: v for k, v in stored.items() if k in self.config})

        raw = os.environ.get(MAX_QUBITS_ENV)
        if raw is not None:
            try:
                self.config["max_qubits"] = int(raw)
            except ValueError:
                logger.warning("Ignoring %s=%r: not an integer", MAX_QUBITS_ENV, raw)

    def save(self):
        """Save configuration to file"""
        with open(self.config_file, 'w') as f:
            json.dump(self.config, f, indent=2)

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value"""
        return self.config.get(key, default)

    def set(self, key: str, value: Any):
        """Set configuration value (in memory)"""
        self.config[key] = value

    @staticmethod
    def get_default_config() -> Dict[str, Any]:
        """Get default configuration"""
        return {
            "mode": "dp",
            "seed": 0,
            "budget_c": 3.0,
            "growth": 8 / 7,
            "char_mode": "reuse",
            "adder": "draper",
            "backend": "sparse",
            "max_qubits": 28,
        }


# ============================================================================
# FASTA
# ============================================================================

def parse_fasta(text: str) -> List[Tuple[str, str]]:
    """Parse a minimal FASTA document into (header, sequence) records.

    '>' starts a record; following non-empty lines are concatenated.
    Sequence text before the first header is rejected.
    """
    records: List[Tuple[str, str]] = []
    header: Optional[str] = None
    chunks: List[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith('>'):
            if header is not None:
                records.append((header, ''.join(chunks)))
            header = line[1:].strip()
            chunks = []
        else:
            if header is None:
                raise SequenceValidationError(
                    f"FASTA line {lineno}: sequence data before the first '>' header")
            chunks.append(line)
    if header is not None:
        records.append((header, ''.join(chunks)))
    return records


def read_fasta_pair(path: str) -> Tuple[str, str]:
    """Read exactly two sequences from a FASTA file"""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise SequenceValidationError(f"Cannot read FASTA file {path}: {e}") from e
    records = parse_fasta(text)
    if len(records) != 2:
        raise SequenceValidationError(
            f"FASTA file {path} must hold exactly 2 records, found {len(records)}")
    return records[0][1], records[1][1]


# ============================================================================
# Formatting
# ============================================================================

def format_bitstring(value: int, width: int) -> str:
    """Render a register value MSB-left"""
    if width == 0:
        return ""
    return format(value, f'0{width}b')


def format_alignment(top: str, bottom: str, separator: str = ' ') -> str:
    """Two-row alignment display with a match row between"""
    marks = ''.join('|' if a == b else ('.' if '_' not in (a, b) else ' ')
                    for a, b in zip(top, bottom))
    return '\n'.join([separator.join(top), separator.join(marks), separator.join(bottom)])


def format_duration_ms(seconds: float) -> float:
    """Wall-time in milliseconds rounded for reports"""
    return round(seconds * 1000.0, 3)
