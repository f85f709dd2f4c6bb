"""
Circuit Export Tests
====================
JSON and portable QASM writers and their importers.
"""

import json

import pytest

from qpalign.Circuit_Builder import (
    CircuitSpec,
    ProfitPlan,
    build_full_profit_circuit,
    build_incrementer,
    build_qft,
)
from qpalign.Circuit_Export import (
    CircuitFormatError,
    ExportFormat,
    export_circuit,
    import_circuit,
)
from qpalign.Grover_Search import build_phase_oracle
from qpalign.QSim_Engine import Gate, RegisterLayout


def sample_circuits():
    plan = ProfitPlan.create("A", "C")
    yield build_qft(3)
    yield build_incrementer(2)
    yield build_full_profit_circuit("AC", "G")
    yield build_full_profit_circuit("A", "T", mode="per-step")
    yield build_phase_oracle(plan, 1)
    yield CircuitSpec(RegisterLayout.build([("q", 3)]),
                      (Gate.cx(0, 1, polarity=False), Gate.cx(1, 2), Gate.mcx((1,), 2), Gate.mcx((0,), 2, (False,))))


@pytest.mark.parametrize("fmt", list(ExportFormat))
def test_round_trip_preserves_gates_and_sections(fmt):
    for spec in sample_circuits():
        restored = import_circuit(export_circuit(spec, fmt), fmt)
        assert restored.layout == spec.layout
        assert restored.gates == spec.gates
        assert restored.metadata == spec.metadata


def test_format_is_sniffed():
    spec = build_incrementer(3)
    assert import_circuit(export_circuit(spec, "json")) == spec
    assert import_circuit(export_circuit(spec, "portable-qasm")) == spec


def test_json_document_shape():
    spec = build_incrementer(2)
    doc = json.loads(export_circuit(spec, extra={"s1": "A"}))
    assert doc["schema_version"] == 1
    assert doc["layout"] == [{"name": "target", "width": 2}, {"name": "ctrl", "width": 1}]
    assert [s["name"] for s in doc["metadata"]["sections"]] == ["qft", "phase", "iqft"]
    assert doc["metadata"]["gate_count"] == spec.gate_count
    assert doc["metadata"]["extra"] == {"s1": "A"}
    assert "angle" not in doc["gates"][0]


def test_single_hadamard():
    spec = CircuitSpec(RegisterLayout.build([("q", 1)]), (Gate.h(0),))
    doc = json.loads(export_circuit(spec))
    assert doc["gates"] == [{"kind": "h", "targets": [0], "controls": [], "polarities": []}]


def test_qasm_declares_registers():
    text = export_circuit(build_full_profit_circuit("A", "C"), "portable-qasm")
    lines = text.splitlines()
    assert lines[0] == "OPENQASM 3.0;"
    for declaration in ("qubit[4] step;", "qubit[1] counter_h;", "qubit[2] profit;",
                        "qubit[2] char_h;", "qubit[1] valid;"):
        assert declaration in lines
    assert any(line.startswith("negctrl @") for line in lines)


def test_qasm_negated_cx_stays_cx():
    spec = CircuitSpec(RegisterLayout.build([("q", 2)]), (Gate.cx(0, 1, polarity=False), Gate.mcx((0,), 1, (False,))))
    text = export_circuit(spec, "portable-qasm")
    assert "negctrl @ x q[0], q[1]; // @kind cx" in text.splitlines()
    assert "negctrl @ x q[0], q[1];" in text.splitlines()
    assert [g.kind.name for g in import_circuit(text).gates] == ["CX", "MCX"]


def test_qasm_keeps_empty_registers_in_comments():
    text = export_circuit(build_full_profit_circuit("", ""), "portable-qasm")
    assert "// @register step 0" in text
    assert "qubit[0] step;" not in text
    restored = import_circuit(text)
    assert restored.layout.total_qubits == 7


@pytest.mark.parametrize("text", [
    "{not json",
    '{"schema_version": 2, "layout": [], "gates": []}',
    '{"schema_version": 1, "layout": [{"name": "q", "width": 1}], "gates": [{"kind": "h", "targets": [3]}]}',
    '{"schema_version": 1, "layout": [], "gates": [{"kind": "teleport", "targets": [0]}]}',
])
def test_bad_json_rejected(text):
    with pytest.raises(CircuitFormatError):
        import_circuit(text, "json")


@pytest.mark.parametrize("body", [
    "rz(0.5) q[0];",
    "h r[0];",
    "h q[4];",
    "ctrl @ x q[0];",
])
def test_bad_qasm_rejected(body):
    text = f"OPENQASM 3.0;\nqubit[2] q;\n{body}\n"
    with pytest.raises(CircuitFormatError):
        import_circuit(text, "portable-qasm")


def test_format_error_is_value_error():
    with pytest.raises(ValueError):
        import_circuit("garbage", "portable-qasm")
