import math

import numpy as np
import pytest

from qfleet.circuit import Circuit, GateKind, Sym
from qfleet.qasm import QasmError, emit_qasm, parse_qasm

from oracle import random_circuit
from test_circuit import bell_circuit, listing_circuit

LISTING_SOURCE = '''\
__qpu__ void QBCIRCUIT(qreg q) {
    OPENQASM 2.0;
    include "qelib1.inc";
    creg c[2];
    x q[1];
    ry(QBTHETA_0) q[0];
    cx q[1], q[0];
    measure q[0] -> c[0];
    measure q[1] -> c[1];
}'''


def test_parse_listing_source():
    c = parse_qasm(LISTING_SOURCE)
    assert c == listing_circuit()
    assert c.num_qubits == 2
    assert c.parameter_count() == 1


def test_parse_minimal_measure_only():
    c = parse_qasm("OPENQASM 2.0; qreg q[1]; creg c[1]; measure q[0]->c[0];")
    assert c.num_qubits == 1
    assert c.gates == ()
    assert c.measurements == ((0, 0),)


def test_parse_pi_expressions():
    c = parse_qasm("OPENQASM 2.0; qreg q[1]; ry(pi/2) q[0];")
    assert c.gates[0].angle == pytest.approx(math.pi / 2, abs=1e-15)
    cases = {
        "2*pi": 2 * math.pi,
        "-pi/4": -math.pi / 4,
        "(pi+1)/2": (math.pi + 1) / 2,
        "0.25": 0.25,
        "1e-3": 1e-3,
        "pi-pi": 0.0,
    }
    for text, expected in cases.items():
        c = parse_qasm(f"OPENQASM 2.0; qreg q[1]; rz({text}) q[0];")
        assert c.gates[0].angle == pytest.approx(expected, abs=1e-15)


def test_declared_size_wins():
    c = parse_qasm("OPENQASM 2.0; qreg q[4]; h q[0];")
    assert c.num_qubits == 4


def test_reject_symbol_inside_expression():
    with pytest.raises(QasmError, match="placeholder"):
        parse_qasm("OPENQASM 2.0; qreg q[1]; ry(2*QBTHETA_0) q[0];")
    with pytest.raises(QasmError, match="placeholder"):
        parse_qasm("OPENQASM 2.0; qreg q[1]; ry(QBTHETA_0/2) q[0];")


def test_reject_u_gates_with_diagnostic():
    with pytest.raises(QasmError, match="u3.*not supported"):
        parse_qasm("OPENQASM 2.0; qreg q[1]; u3(0.1,0.2,0.3) q[0];")


def test_reject_unknown_gate():
    with pytest.raises(QasmError, match="unknown gate"):
        parse_qasm("OPENQASM 2.0; qreg q[2]; swap q[0], q[1];")


def test_reject_out_of_bounds_index():
    with pytest.raises(QasmError, match="out of bounds"):
        parse_qasm("OPENQASM 2.0; qreg q[2]; h q[2];")


def test_reject_duplicate_register():
    with pytest.raises(QasmError, match="duplicate"):
        parse_qasm("OPENQASM 2.0; qreg q[2]; qreg r[2];")
    with pytest.raises(QasmError, match="duplicate"):
        parse_qasm("OPENQASM 2.0; creg c[1]; creg d[1];")


def test_reject_classical_bit_reuse():
    with pytest.raises(QasmError, match="classical bit"):
        parse_qasm("OPENQASM 2.0; qreg q[2]; creg c[2]; "
                   "measure q[0]->c[0]; measure q[1]->c[0];")


def test_reject_other_includes():
    with pytest.raises(QasmError, match="include"):
        parse_qasm('OPENQASM 2.0; include "other.inc"; qreg q[1];')


def test_lexical_error_is_positioned():
    with pytest.raises(QasmError) as info:
        parse_qasm("OPENQASM 2.0;\nqreg q[2];\nh q[0]; @")
    assert info.value.line == 3
    assert info.value.column == 9


def test_header_required():
    with pytest.raises(QasmError, match="OPENQASM"):
        parse_qasm("qreg q[1]; h q[0];")
    with pytest.raises(QasmError, match="version"):
        parse_qasm("OPENQASM 3.0; qreg q[1];")


def test_comments_and_whitespace_tolerated():
    c = parse_qasm("// header comment\nOPENQASM 2.0;\n// circuit\nqreg q[1];\nh q[0];\n")
    assert c.gates[0].kind is GateKind.H


def test_emit_bell():
    text = emit_qasm(bell_circuit())
    assert "h q[0];" in text
    assert "cx q[0], q[1];" in text
    assert "measure q[0] -> c[0];" in text


def test_emit_symbol():
    text = emit_qasm(Circuit(1).ry(0, Sym(3)))
    assert "ry(QBTHETA_3) q[0];" in text


def test_round_trip_fixed_circuits():
    for c in (bell_circuit(), listing_circuit()):
        assert parse_qasm(emit_qasm(c)) == c


def test_round_trip_random_circuits():
    rng = np.random.default_rng(23)
    for _ in range(40):
        n = int(rng.integers(1, 6))
        c = random_circuit(rng, n, int(rng.integers(1, 20)),
                           symbolic=True, measured=bool(rng.random() < 0.5))
        assert parse_qasm(emit_qasm(c)) == c


def test_parse_determinism():
    assert parse_qasm(LISTING_SOURCE) == parse_qasm(LISTING_SOURCE)


def test_statement_order_preserved():
    src = "OPENQASM 2.0; qreg q[2]; x q[0]; h q[1]; z q[0]; cx q[0], q[1];"
    kinds = [g.kind for g in parse_qasm(src).gates]
    assert kinds == [GateKind.X, GateKind.H, GateKind.Z, GateKind.CNOT]


def test_wrapper_trailing_garbage_rejected():
    with pytest.raises(QasmError, match="after kernel"):
        parse_qasm(LISTING_SOURCE + " extra")
