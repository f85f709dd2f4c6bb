"""
Circuit Export
==============
Serialization of CircuitSpec to a JSON document or to portable
OpenQASM 3 text, and the matching importers.

JSON document:
    {"schema_version": 1,
     "layout": [{"name", "width"}],
     "gates": [{"kind", "targets", "controls", "polarities", "angle"?}],
     "metadata": {"sections": [{"name", "start", "stop"}], "gate_count", "depth", "extra"}}

QASM text declares one ``qubit[w] name;`` per non-empty register, writes one
gate per line, and carries the layout and section boundaries in ``// @``
comment lines so an import reproduces the exact gate list.
"""

import json
import logging
import re
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError

from .Circuit_Builder import CircuitSpec, Section
from .QSim_Engine import Gate, GateKind, RegisterLayout
from .utils import QPAlignError


logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class ExportFormat(str, Enum):
    """Supported circuit formats"""
    JSON = "json"
    QASM = "portable-qasm"


class CircuitFormatError(QPAlignError, ValueError):
    """Circuit text cannot be parsed"""

    exit_code = 2


# ============================================================================
# JSON Models
# ============================================================================

class RegisterModel(BaseModel):
    name: str
    width: int = Field(ge=0)


class GateModel(BaseModel):
    kind: GateKind
    targets: List[int]
    controls: List[int] = []
    polarities: List[bool] = []
    angle: Optional[float] = None


class SectionModel(BaseModel):
    name: str
    start: int
    stop: int


class CircuitMetadata(BaseModel):
    sections: List[SectionModel] = []
    gate_count: int = 0
    depth: int = 0
    extra: Dict[str, str] = {}


class CircuitDocument(BaseModel):
    """JSON mirror of a CircuitSpec"""
    schema_version: int = SCHEMA_VERSION
    layout: List[RegisterModel]
    gates: List[GateModel]
    metadata: CircuitMetadata = CircuitMetadata()

    @classmethod
    def from_spec(cls, spec: CircuitSpec, extra: Optional[Dict[str, str]] = None) -> 'CircuitDocument':
        return cls(
            layout=[RegisterModel(name=r.name, width=r.width) for r in spec.layout.registers],
            gates=[GateModel(kind=g.kind, targets=list(g.targets), controls=list(g.controls),
                             polarities=list(g.polarities), angle=g.angle) for g in spec.gates],
            metadata=CircuitMetadata(
                sections=[SectionModel(name=s.name, start=s.start, stop=s.stop) for s in spec.metadata],
                gate_count=spec.gate_count,
                depth=spec.depth,
                extra=dict(extra or {}),
            ),
        )

    def to_spec(self) -> CircuitSpec:
        layout = RegisterLayout.build((r.name, r.width) for r in self.layout)
        gates = tuple(Gate(g.kind, tuple(g.targets), tuple(g.controls), tuple(g.polarities), g.angle)
                      for g in self.gates)
        sections = tuple(Section(s.name, s.start, s.stop) for s in self.metadata.sections)
        return CircuitSpec(layout, gates, sections)


# ============================================================================
# QASM
# ============================================================================

_GATE_LINE = re.compile(
    r'^(?P<mods>(?:(?:ctrl|negctrl)\s*@\s*)*)'
    r'(?P<name>h|x|cx|swap|p)'
    r'(?:\((?P<angle>[^)]*)\))?\s+'
    r'(?P<args>[^;]+);'
    r'(?:\s*//\s*@kind\s+(?P<kind>cx))?$')
_ARG = re.compile(r'^(?P<reg>[A-Za-z_][A-Za-z0-9_]*)\[(?P<idx>\d+)\]$')


def _qubit_names(layout: RegisterLayout) -> Dict[int, str]:
    return {q: f"{reg.name}[{i}]" for reg in layout.registers for i, q in enumerate(reg.qubits)}


def _qasm_line(gate: Gate, names: Dict[int, str]) -> str:
    kind = gate.kind
    if kind is GateKind.SWAP:
        return f"swap {names[gate.targets[0]]}, {names[gate.targets[1]]};"
    if kind is GateKind.CX:
        control, target = names[gate.controls[0]], names[gate.targets[0]]
        if gate.polarities[0]:
            return f"cx {control}, {target};"
        # stdgates has no negated cx; the annotation separates it from a one-control MCX
        return f"negctrl @ x {control}, {target}; // @kind cx"
    modifiers = ''.join('ctrl @ ' if p else 'negctrl @ ' for p in gate.polarities)
    if kind is GateKind.H:
        base = "h"
    elif kind is GateKind.CPHASE:
        base = f"p({gate.angle!r})"
    else:
        base = "x"
    args = ', '.join(names[q] for q in gate.controls + gate.targets)
    return f"{modifiers}{base} {args};"


def _to_qasm(spec: CircuitSpec, extra: Optional[Dict[str, str]] = None) -> str:
    names = _qubit_names(spec.layout)
    lines = ["OPENQASM 3.0;", 'include "stdgates.inc";']
    for key, value in sorted((extra or {}).items()):
        lines.append(f"// @meta {key} {value}")
    for reg in spec.layout.registers:
        lines.append(f"// @register {reg.name} {reg.width}")
    for section in spec.metadata:
        lines.append(f"// @section {section.name} {section.start} {section.stop}")
    for reg in spec.layout.registers:
        if reg.width:
            lines.append(f"qubit[{reg.width}] {reg.name};")
    lines.extend(_qasm_line(gate, names) for gate in spec.gates)
    return '\n'.join(lines) + '\n'


def _from_qasm(text: str) -> CircuitSpec:
    registers: List[Tuple[str, int]] = []
    declared: List[Tuple[str, int]] = []
    sections: List[Section] = []
    gate_lines: List[Tuple[int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("// @register"):
            _, _, name, width = line.split()
            registers.append((name, int(width)))
        elif line.startswith("// @section"):
            _, _, name, start, stop = line.split()
            sections.append(Section(name, int(start), int(stop)))
        elif line.startswith("//") or line.startswith("OPENQASM") or line.startswith("include"):
            continue
        elif line.startswith("qubit["):
            match = re.match(r'^qubit\[(\d+)\]\s+([A-Za-z_][A-Za-z0-9_]*);$', line)
            if not match:
                raise CircuitFormatError(f"line {lineno}: bad register declaration {line!r}")
            declared.append((match.group(2), int(match.group(1))))
        else:
            gate_lines.append((lineno, line))

    layout = RegisterLayout.build(registers or declared)
    offsets = {reg.name: reg for reg in layout.registers}

    def qubit(token: str, lineno: int) -> int:
        match = _ARG.match(token.strip())
        if not match or match.group('reg') not in offsets:
            raise CircuitFormatError(f"line {lineno}: unknown qubit {token.strip()!r}")
        reg = offsets[match.group('reg')]
        index = int(match.group('idx'))
        if index >= reg.width:
            raise CircuitFormatError(f"line {lineno}: {token.strip()} out of range")
        return reg.offset + index

    gates: List[Gate] = []
    for lineno, line in gate_lines:
        match = _GATE_LINE.match(line)
        if not match:
            raise CircuitFormatError(f"line {lineno}: unsupported statement {line!r}")
        polarities = tuple(m == 'ctrl' for m in re.findall(r'negctrl|ctrl', match.group('mods')))
        args = [qubit(tok, lineno) for tok in match.group('args').split(',')]
        name = match.group('name')
        try:
            if name == 'swap':
                gates.append(Gate.swap(args[0], args[1]))
            elif name == 'cx':
                if len(args) != 2 or polarities:
                    raise CircuitFormatError(f"line {lineno}: cx takes one control and one target")
                gates.append(Gate.cx(args[0], args[1]))
            else:
                controls, target = tuple(args[:len(polarities)]), args[-1]
                if len(args) != len(polarities) + 1:
                    raise CircuitFormatError(f"line {lineno}: control count does not match arguments")
                if name == 'p':
                    gates.append(Gate.cphase(float(match.group('angle')), target, controls, polarities))
                elif name == 'h':
                    gates.append(Gate(GateKind.H, (target,), controls, polarities))
                elif match.group('kind') == 'cx' and len(controls) == 1:
                    gates.append(Gate.cx(controls[0], target, polarity=polarities[0]))
                elif controls:
                    gates.append(Gate(GateKind.MCX, (target,), controls, polarities))
                else:
                    gates.append(Gate.x(target))
        except (ValueError, IndexError) as e:
            if isinstance(e, CircuitFormatError):
                raise
            raise CircuitFormatError(f"line {lineno}: {e}") from e
    return CircuitSpec(layout, tuple(gates), tuple(sections))


# ============================================================================
# Public API
# ============================================================================

def export_circuit(spec: CircuitSpec, fmt: Union[ExportFormat, str] = ExportFormat.JSON,
                   extra: Optional[Dict[str, str]] = None) -> str:
    """Render a circuit as JSON or portable QASM text"""
    fmt = ExportFormat(fmt)
    if fmt is ExportFormat.JSON:
        document = CircuitDocument.from_spec(spec, extra)
        return document.model_dump_json(indent=2, exclude_none=True) + '\n'
    return _to_qasm(spec, extra)


def import_circuit(text: str, fmt: Optional[Union[ExportFormat, str]] = None) -> CircuitSpec:
    """Parse text written by export_circuit; the format is sniffed when not given"""
    if fmt is None:
        fmt = ExportFormat.JSON if text.lstrip().startswith('{') else ExportFormat.QASM
    fmt = ExportFormat(fmt)
    if fmt is ExportFormat.QASM:
        return _from_qasm(text)
    try:
        document = CircuitDocument.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as e:
        raise CircuitFormatError(f"invalid circuit JSON: {e}") from e
    if document.schema_version != SCHEMA_VERSION:
        raise CircuitFormatError(f"unsupported circuit schema version {document.schema_version}")
    try:
        return document.to_spec()
    except ValueError as e:
        raise CircuitFormatError(f"inconsistent circuit JSON: {e}") from e
