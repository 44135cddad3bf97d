import math

import numpy as np
import pytest

from qfleet.circuit import Circuit, GateKind
from qfleet.observable import (PauliFormatError, PauliOperator, PauliTerm,
                               TermEvaluationError, expectation,
                               measurement_circuits, parse_pauli_string,
                               term_measurement_circuit)
from qfleet.simulator import expectation_z, simulate

from oracle import energy_dense, pauli_sum_dense, random_circuit, random_pauli_terms


def as_oracle_terms(op: PauliOperator):
    return [(t.coefficient, dict(t.paulis)) for t in op.terms]


def test_parse_single_term():
    op = parse_pauli_string("(1.0) Z0")
    assert len(op.terms) == 1
    assert op.terms[0] == PauliTerm(1.0, {0: "Z"})
    assert op.num_qubits == 1


def test_parse_merges_duplicates():
    op = parse_pauli_string("(0.5) Z0 + (0.5) Z0")
    assert len(op.terms) == 1
    assert op.terms[0].coefficient == pytest.approx(1.0)


def test_parse_three_qubit_term_matches_dense_form():
    op = parse_pauli_string("(0.25) X0 Y1 Z2")
    assert op.num_qubits == 3
    # round-trip through the string emitter, then check the dense 8x8 operator
    again = parse_pauli_string(op.to_string())
    assert again == op
    h = pauli_sum_dense(as_oracle_terms(op), 3)
    np.testing.assert_allclose(h, h.conj().T, atol=1e-12)
    assert h.shape == (8, 8)
    # frozen spot checks of the Kronecker structure: <000|H|110> = 0.25 * (i)
    # X0 flips bit0, Y1 flips bit1 with phase i on |0>->|1>, Z2 diagonal
    assert h[3, 0] == pytest.approx(0.25 * 1j)


def test_parse_line_form_with_comments():
    text = "# two-qubit test\n0.5 Z0\n-0.25 X0 Y1\n\n# done\n"
    op = parse_pauli_string(text)
    assert len(op.terms) == 2
    assert op.terms[1].coefficient == pytest.approx(-0.25)
    assert op.terms[1].paulis == {0: "X", 1: "Y"}


def test_parse_identity_term():
    op = parse_pauli_string("(2.5) + (1.0) Z0")
    assert op.terms[0].is_identity
    assert op.num_circuits == 1


def test_parse_explicit_identity_letter():
    op = parse_pauli_string("(1.0) I0 Z1")
    assert op.terms[0].paulis == {1: "Z"}


def test_parse_errors():
    with pytest.raises(PauliFormatError, match="coefficient"):
        parse_pauli_string("(abc) Z0")
    with pytest.raises(PauliFormatError, match="coefficient"):
        parse_pauli_string("(1+2j) Z0")
    with pytest.raises(PauliFormatError, match="letter"):
        parse_pauli_string("(1.0) W0")
    with pytest.raises(PauliFormatError, match="repeated"):
        parse_pauli_string("(1.0) X0 Y0")
    with pytest.raises(PauliFormatError, match="num_qubits"):
        parse_pauli_string("(1.0) Z5", num_qubits=3)


def test_term_circuit_z_appends_no_rotations():
    ansatz = Circuit(2).h(0).cnot(0, 1)
    c = term_measurement_circuit(ansatz, PauliTerm(1.0, {0: "Z"}))
    assert c.gates == ansatz.gates  # no basis change for Z
    assert c.measurements == ((0, 0),)


def test_term_circuit_x_on_zero_state():
    c = term_measurement_circuit(Circuit(1), PauliTerm(1.0, {0: "X"}))
    assert [g.kind for g in c.gates] == [GateKind.H]
    # <0|X|0> = 0
    assert expectation_z(simulate(c), [0]) == pytest.approx(0.0, abs=1e-12)


def test_term_circuit_y_then_z():
    c = term_measurement_circuit(Circuit(2), PauliTerm(1.0, {0: "Y", 1: "Z"}))
    assert [g.kind for g in c.gates] == [GateKind.SDG, GateKind.H]
    assert [g.qubits[0] for g in c.gates] == [0, 0]
    assert c.measurements == ((0, 0), (1, 1))


def test_term_circuit_rejects_measured_or_symbolic():
    with pytest.raises(ValueError, match="measurements"):
        term_measurement_circuit(Circuit(1).measure_all(), PauliTerm(1.0, {0: "Z"}))
    from qfleet.circuit import Sym
    with pytest.raises(ValueError, match="literal"):
        term_measurement_circuit(Circuit(1).ry(0, Sym(0)), PauliTerm(1.0, {0: "Z"}))


def test_post_rotation_matches_dense_oracle_on_random_states():
    rng = np.random.default_rng(31)
    for _ in range(20):
        ansatz = random_circuit(rng, 2, 8)
        term = PauliTerm(1.0, {0: "Y", 1: "Z"})
        circ = term_measurement_circuit(ansatz, term)
        got = expectation_z(simulate(circ), [0, 1])
        want = energy_dense(ansatz, [(1.0, {0: "Y", 1: "Z"})])
        assert got == pytest.approx(want, abs=1e-10)


def test_expectation_trivial_eigenstate():
    op = parse_pauli_string("(0.5) Z0 + (0.5) Z1")
    energy, per_term = expectation(Circuit(2), op)
    assert energy == pytest.approx(1.0)
    assert per_term == [pytest.approx(1.0), pytest.approx(1.0)]


def test_expectation_plus_state():
    op = parse_pauli_string("(1.0) X0")
    energy, _ = expectation(Circuit(1).h(0), op)
    assert energy == pytest.approx(1.0, abs=1e-12)


def test_expectation_matches_dense_oracle():
    rng = np.random.default_rng(5)
    for _ in range(15):
        n = 3
        ansatz = random_circuit(rng, n, 12)
        terms = random_pauli_terms(rng, n, 10)
        op = PauliOperator(tuple(PauliTerm(c, p) for c, p in terms), n)
        energy, _ = expectation(ansatz, op)
        assert energy == pytest.approx(energy_dense(ansatz, terms), abs=1e-9)


def test_expectation_linearity():
    rng = np.random.default_rng(17)
    ansatz = random_circuit(rng, 3, 10)
    t1 = random_pauli_terms(rng, 3, 4)
    t2 = random_pauli_terms(rng, 3, 4)
    alpha, beta = 0.7, -1.3

    def op_of(terms):
        return PauliOperator(tuple(PauliTerm(c, p) for c, p in terms), 3)

    e1, _ = expectation(ansatz, op_of(t1))
    e2, _ = expectation(ansatz, op_of(t2))
    combined = [(alpha * c, p) for c, p in t1] + [(beta * c, p) for c, p in t2]
    e12, _ = expectation(ansatz, op_of(
        [(c, p) for c, p in _merge_for_test(combined)]))
    assert e12 == pytest.approx(alpha * e1 + beta * e2, abs=1e-9)


def _merge_for_test(terms):
    merged = {}
    order = []
    for c, p in terms:
        k = tuple(sorted(p.items()))
        if k not in merged:
            merged[k] = [0.0, p]
            order.append(k)
        merged[k][0] += c
    return [(merged[k][0], merged[k][1]) for k in order]


def test_expectation_shots_converges():
    rng = np.random.default_rng(41)
    ansatz = random_circuit(rng, 3, 10)
    terms = random_pauli_terms(rng, 3, 6)
    op = PauliOperator(tuple(PauliTerm(c, p) for c, p in terms), 3)
    exact, _ = expectation(ansatz, op)
    shots = 100_000
    sampled, _ = expectation(ansatz, op, shots=shots, seed=8)
    bound = 5 * op.coefficient_norm() / math.sqrt(shots)
    assert abs(sampled - exact) <= bound


def test_circuit_count_equals_non_identity_terms():
    op = parse_pauli_string("(1.0) + (0.5) Z0 + (0.25) X0 Y1")
    circuits = measurement_circuits(Circuit(2), op)
    assert len(circuits) == op.num_circuits == 2
    assert [i for i, _ in circuits] == [1, 2]


def test_backend_failure_carries_term_index():
    op = parse_pauli_string("(0.5) Z0 + (0.5) Z30", num_qubits=31)
    ansatz = Circuit(31)
    with pytest.raises(TermEvaluationError) as info:
        expectation(ansatz, op, max_qubits=24)
    assert info.value.term_index == 0
