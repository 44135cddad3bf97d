import math

import pytest

from qfleet.circuit import Circuit, Gate, GateKind, Sym


def bell_circuit() -> Circuit:
    return Circuit.empty().h(0).cnot(0, 1).measure_all()


def listing_circuit() -> Circuit:
    """2-qubit scan circuit: X(1), RY(theta_0) on 0, CNOT 1->0, measure both."""
    return (Circuit.empty().x(1).ry(0, Sym(0)).cnot(1, 0)
            .measure(0, 0).measure(1, 1))


def test_bell_builder_sequence():
    c = bell_circuit()
    assert c.num_qubits == 2
    assert [g.kind for g in c.gates] == [GateKind.H, GateKind.CNOT]
    assert c.gates[0].qubits == (0,)
    assert c.gates[1].qubits == (0, 1)
    assert c.measurements == ((0, 0), (1, 1))


def test_identity_append():
    c = Circuit.empty().i(0)
    assert c.num_qubits == 1
    assert c.gates[0].kind is GateKind.I


def test_cnot_same_qubit_rejected():
    with pytest.raises(ValueError, match="distinct"):
        Circuit(2).cnot(0, 0)


def test_arity_and_angle_validation():
    with pytest.raises(ValueError, match="2 qubit"):
        Circuit(2).append(GateKind.CNOT, (0,))
    with pytest.raises(ValueError, match="requires an angle"):
        Circuit(1).append(GateKind.RY, (0,))
    with pytest.raises(ValueError, match="takes no angle"):
        Circuit(1).append(GateKind.H, (0,), 0.5)


def test_fixed_size_bounds():
    with pytest.raises(ValueError, match="out of range"):
        Circuit(2).h(2)
    # auto-grow widens instead
    assert Circuit.empty().h(2).num_qubits == 3


def test_append_is_functional():
    base = Circuit(1)
    grown = base.h(0)
    assert base.gates == ()
    assert len(grown.gates) == 1


def test_no_gate_after_measure():
    c = Circuit(2).measure(0, 0)
    with pytest.raises(ValueError, match="already measured"):
        c.h(0)
    # other qubits stay usable
    assert len(c.h(1).gates) == 1


def test_measure_all():
    c = Circuit(2).h(0).measure_all()
    assert c.measurements == ((0, 0), (1, 1))
    assert Circuit(3).measure_all().measurements == ((0, 0), (1, 1), (2, 2))
    with pytest.raises(ValueError, match="already contains measurements"):
        c.measure_all()


def test_duplicate_clbit_rejected():
    with pytest.raises(ValueError, match="classical bit"):
        Circuit(2).measure(0, 0).measure(1, 0)


def test_parameter_count():
    assert listing_circuit().parameter_count() == 1
    assert bell_circuit().parameter_count() == 0
    c = Circuit(2).ry(0, Sym(0)).rz(1, Sym(1))
    assert c.parameter_count() == 2
    # the same symbol twice still counts once
    assert Circuit(2).ry(0, Sym(0)).ry(1, Sym(0)).parameter_count() == 1


def test_bind_parameters():
    c = listing_circuit()
    bound = c.bind_parameters([0.0])
    assert bound.gates[1].angle == 0.0
    assert bound.parameter_count() == 0
    # original untouched
    assert isinstance(c.gates[1].angle, Sym)


def test_bind_no_symbols():
    c = bell_circuit()
    assert c.bind_parameters([]) == c


def test_bind_gap_error():
    c = Circuit(1).ry(0, Sym(0)).rz(0, Sym(2))
    with pytest.raises(ValueError, match="gap"):
        c.bind_parameters([0.1, 0.2])


def test_bind_length_mismatch():
    with pytest.raises(ValueError, match="parameter"):
        listing_circuit().bind_parameters([0.1, 0.2])


def test_bind_is_pure():
    c = Circuit(2).ry(0, Sym(0)).rx(1, Sym(1)).measure_all()
    theta = [0.3, -1.2]
    assert c.bind_parameters(theta) == c.bind_parameters(theta)


def test_inverse_pairs():
    c = Circuit(1).s(0).t(0).ry(0, 0.7)
    inv = c.inverse()
    assert [g.kind for g in inv.gates] == [GateKind.RY, GateKind.TDG, GateKind.SDG]
    assert inv.gates[0].angle == -0.7


def test_json_round_trip():
    for c in (bell_circuit(), listing_circuit(), Circuit(3).rx(2, math.pi / 3)):
        assert Circuit.from_json_dict(c.to_json_dict()) == c


def test_json_field_shapes():
    d = listing_circuit().to_json_dict()
    assert d["num_qubits"] == 2
    assert d["gates"][0] == {"kind": "X", "qubits": [1]}
    assert d["gates"][1] == {"kind": "RY", "qubits": [0], "angle": {"sym": 0}}
    assert d["measurements"] == [[0, 0], [1, 1]]
    bound = listing_circuit().bind_parameters([0.5]).to_json_dict()
    assert bound["gates"][1]["angle"] == {"lit": 0.5}


def test_measure_via_append():
    c = Circuit(2).append(GateKind.MEASURE, (0,))
    assert c.measurements == ((0, 0),)
