import math

import numpy as np
import pytest

from qfleet.circuit import Circuit, Sym
from qfleet.simulator import (QubitCapError, expectation_z, run_counts,
                              run_expectation, sample, simulate)

from oracle import circuit_state, random_circuit
from test_circuit import bell_circuit, listing_circuit


def test_hadamard_single_qubit():
    state = simulate(Circuit(1).h(0))
    np.testing.assert_allclose(state.amplitudes, [2 ** -0.5, 2 ** -0.5], atol=1e-12)


def test_listing_circuit_theta_zero():
    # frozen from the 4x4 dense oracle: X(1), RY(0), CNOT(1->0) on |00>
    c = listing_circuit().bind_parameters([0.0])
    state = simulate(c)
    np.testing.assert_allclose(state.amplitudes, [0, 0, 0, 1], atol=1e-12)
    np.testing.assert_allclose(circuit_state(c), state.amplitudes, atol=1e-12)


def test_bell_amplitudes():
    state = simulate(bell_circuit())
    expected = [2 ** -0.5, 0, 0, 2 ** -0.5]
    np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)
    np.testing.assert_allclose(circuit_state(bell_circuit()), expected, atol=1e-12)


def test_symbolic_circuit_rejected():
    with pytest.raises(ValueError, match="symbolic"):
        simulate(Circuit(1).ry(0, Sym(0)))


def test_qubit_cap():
    with pytest.raises(QubitCapError):
        simulate(Circuit(7), max_qubits=6)


def test_random_circuits_match_dense_oracle():
    rng = np.random.default_rng(7)
    for _ in range(60):
        n = int(rng.integers(1, 6))
        c = random_circuit(rng, n, int(rng.integers(1, 25)))
        got = simulate(c).amplitudes
        np.testing.assert_allclose(got, circuit_state(c), atol=1e-9)
        assert abs(np.linalg.norm(got) - 1.0) < 1e-10


def test_norm_preserved_after_every_gate():
    from qfleet.simulator import apply_gate
    rng = np.random.default_rng(13)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        c = random_circuit(rng, n, 20)
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1.0
        for g in c.gates:
            apply_gate(amps, g)
            assert abs(np.linalg.norm(amps) - 1.0) < 1e-10


def test_inverse_returns_to_zero():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(1, 6))
        c = random_circuit(rng, n, int(rng.integers(1, 20)))
        round_trip = Circuit(n, c.gates + c.inverse().gates)
        amps = simulate(round_trip).amplitudes
        expected = np.zeros_like(amps)
        expected[0] = 1.0
        # global phase cannot appear: each inverse cancels exactly
        np.testing.assert_allclose(amps, expected, atol=1e-8)


def test_sample_bell_support():
    state = simulate(bell_circuit())
    result = sample(state, bell_circuit(), shots=1000, seed=42)
    assert set(result.counts) <= {"00", "11"}
    assert sum(result.counts.values()) == 1000


def test_sample_zero_state():
    c = Circuit(3).measure_all()
    result = sample(simulate(c), c, shots=64, seed=0)
    assert result.counts == {"000": 64}


def test_sample_deterministic():
    state = simulate(bell_circuit())
    a = sample(state, bell_circuit(), shots=500, seed=9)
    b = sample(state, bell_circuit(), shots=500, seed=9)
    assert a.counts == b.counts


def test_sample_requires_measurements():
    c = Circuit(1).h(0)
    with pytest.raises(ValueError, match="measurement"):
        sample(simulate(c), c, shots=10, seed=0)


def test_sample_frequencies_follow_born_rule():
    c = Circuit(2).h(0).ry(1, 0.9).measure_all()
    state = simulate(c)
    shots = 100_000
    result = sample(state, c, shots=shots, seed=3)
    probs = np.abs(state.amplitudes) ** 2
    for index, p in enumerate(probs):
        key = format(index, "02b")[::-1]  # char j = clbit j = qubit j here
        observed = result.counts.get(key, 0)
        sigma = math.sqrt(shots * p * (1 - p))
        assert abs(observed - shots * p) <= 5 * sigma + 1


def test_counts_keys_follow_clbit_order():
    # measure qubit 0 into clbit 1 and qubit 1 into clbit 0
    c = Circuit(2).x(0).measure(0, 1).measure(1, 0)
    result = sample(simulate(c), c, shots=10, seed=1)
    assert result.counts == {"01": 10}


def test_expectation_z_eigenstates():
    assert expectation_z(simulate(Circuit(1)), [0]) == pytest.approx(1.0)
    bell = simulate(bell_circuit())
    assert expectation_z(bell, [0, 1]) == pytest.approx(1.0, abs=1e-12)
    assert expectation_z(bell, [0]) == pytest.approx(0.0, abs=1e-12)


def test_expectation_z_matches_shot_estimate():
    c = Circuit(2).ry(0, 1.1).h(1).cnot(0, 1).measure_all()
    state = simulate(c)
    exact = expectation_z(state, [0, 1])
    shots = 100_000
    counts = sample(state, c, shots=shots, seed=5).counts
    estimate = sum(cnt * (-1) ** key.count("1") for key, cnt in counts.items()) / shots
    assert abs(exact - estimate) <= 5 / math.sqrt(shots)


def test_run_counts_times_execution():
    result = run_counts(bell_circuit(), shots=100, seed=2)
    assert sum(result.counts.values()) == 100
    assert result.execution_time > 0


def test_run_expectation():
    value, elapsed = run_expectation(Circuit(1).x(0).measure_all())
    assert value == pytest.approx(-1.0)
    assert elapsed > 0
