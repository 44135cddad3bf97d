"""Noise-free statevector simulator backing every virtual QPU.

Qubit 0 is the least significant bit of the basis-state index. Gates are
applied as strided passes over the amplitude array; no full-circuit matrix
is ever built.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import cos, sin

import numpy as np

from .circuit import Circuit, Gate, GateKind, Sym

DEFAULT_MAX_QUBITS = 24

_SQRT2_INV = 2 ** -0.5
_FIXED_1Q = {
    GateKind.I: np.eye(2, dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
}
_ROTATIONS = {
    GateKind.RX: lambda t: np.array([[cos(t / 2), -1j * sin(t / 2)],
                                     [-1j * sin(t / 2), cos(t / 2)]], dtype=complex),
    GateKind.RY: lambda t: np.array([[cos(t / 2), -sin(t / 2)],
                                     [sin(t / 2), cos(t / 2)]], dtype=complex),
    GateKind.RZ: lambda t: np.array([[np.exp(-1j * t / 2), 0],
                                     [0, np.exp(1j * t / 2)]], dtype=complex),
}


class QubitCapError(ValueError):
    """Circuit is wider than the simulator is allowed to allocate."""


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray


@dataclass
class CountsResult:
    """Measurement histogram. Character j of each key is classical bit j."""
    counts: dict[str, int]
    shots: int
    execution_time: float = field(default=0.0, compare=False)


def gate_matrix(gate: Gate) -> np.ndarray:
    if gate.kind in _FIXED_1Q:
        return _FIXED_1Q[gate.kind]
    return _ROTATIONS[gate.kind](gate.angle)


def _apply_1q(amps: np.ndarray, u: np.ndarray, q: int,
              scratch: tuple[np.ndarray, np.ndarray] | None = None) -> None:
    view = amps.reshape(-1, 2, 1 << q)
    a0 = view[:, 0, :]
    a1 = view[:, 1, :]
    if u[0, 1] == 0 and u[1, 0] == 0:  # diagonal (Z, S, T, RZ, ...)
        if u[0, 0] != 1:
            a0 *= u[0, 0]
        if u[1, 1] != 1:
            a1 *= u[1, 1]
        return
    # scratch avoids fresh large temporaries on every gate (allocator churn)
    half = amps.size >> 1
    if scratch is None:
        scratch = (np.empty(half, dtype=complex), np.empty(half, dtype=complex))
    t0 = scratch[0][:half].reshape(a0.shape)
    t1 = scratch[1][:half].reshape(a1.shape)
    if u[0, 0] == 0 and u[1, 1] == 0:  # antidiagonal (X, Y)
        np.multiply(a1, u[0, 1], out=t0)
        np.multiply(a0, u[1, 0], out=t1)
        a0[...] = t0
        a1[...] = t1
        return
    np.multiply(a0, u[0, 0], out=t0)
    np.multiply(a1, u[0, 1], out=t1)
    t0 += t1
    np.multiply(a0, u[1, 0], out=t1)
    a1 *= u[1, 1]
    a1 += t1
    a0[...] = t0


def _paired_view(amps: np.ndarray, qa: int, qb: int) -> np.ndarray:
    # Axes: (rest, bit of qa, mid, bit of qb, low) with qa > qb.
    return amps.reshape(-1, 2, 1 << (qa - qb - 1), 2, 1 << qb)


def _apply_cnot(amps: np.ndarray, control: int, target: int) -> None:
    hi, lo = max(control, target), min(control, target)
    view = _paired_view(amps, hi, lo)
    if control > target:
        a, b = view[:, 1, :, 0, :], view[:, 1, :, 1, :]
    else:
        a, b = view[:, 0, :, 1, :], view[:, 1, :, 1, :]
    tmp = a.copy()
    a[...] = b
    b[...] = tmp


def _apply_cz(amps: np.ndarray, qa: int, qb: int) -> None:
    view = _paired_view(amps, max(qa, qb), min(qa, qb))
    view[:, 1, :, 1, :] *= -1


def apply_gate(amps: np.ndarray, gate: Gate,
               scratch: tuple[np.ndarray, np.ndarray] | None = None) -> None:
    if gate.kind is GateKind.CNOT:
        _apply_cnot(amps, gate.qubits[0], gate.qubits[1])
    elif gate.kind is GateKind.CZ:
        _apply_cz(amps, gate.qubits[0], gate.qubits[1])
    elif gate.kind is GateKind.I:
        pass
    else:
        _apply_1q(amps, gate_matrix(gate), gate.qubits[0], scratch)


def simulate(circuit: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Apply the circuit's gates in order to |0...0>; measurements are ignored."""
    if circuit.num_qubits < 1:
        raise ValueError("cannot simulate an empty (0-qubit) circuit")
    if circuit.num_qubits > max_qubits:
        raise QubitCapError(
            f"{circuit.num_qubits} qubits exceeds the cap of {max_qubits} "
            f"(2^{circuit.num_qubits} amplitudes)")
    for g in circuit.gates:
        if isinstance(g.angle, Sym):
            raise ValueError(f"cannot simulate symbolic angle theta_{g.angle.index}; "
                             "bind parameters first")
    amps = np.zeros(1 << circuit.num_qubits, dtype=complex)
    amps[0] = 1.0
    half = max(amps.size >> 1, 1)
    scratch = (np.empty(half, dtype=complex), np.empty(half, dtype=complex))
    for g in circuit.gates:
        apply_gate(amps, g, scratch)
    return StateVector(circuit.num_qubits, amps)


def _marginal_probabilities(state: StateVector, qubits: list[int]) -> np.ndarray:
    """Probabilities over the given qubits; axis order is descending qubit index."""
    n = state.num_qubits
    probs = np.abs(state.amplitudes.reshape([2] * n)) ** 2
    drop = tuple(n - 1 - q for q in range(n) if q not in set(qubits))
    if drop:
        probs = probs.sum(axis=drop)
    return probs.reshape(-1)


def sample(state: StateVector, circuit: Circuit, shots: int, seed: int) -> CountsResult:
    """Draw `shots` samples from the measured-qubit marginal; deterministic per seed."""
    if not circuit.measurements:
        raise ValueError("circuit has no measurements to sample")
    if shots < 1:
        raise ValueError("shots must be positive")
    start = time.perf_counter()
    qubit_to_clbit = dict(circuit.measurements)
    measured = sorted(qubit_to_clbit, reverse=True)  # marginal axis order
    p = _marginal_probabilities(state, measured)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p)
    m = len(measured)
    width = circuit.num_clbits
    counts: dict[str, int] = {}
    for pattern in np.nonzero(draws)[0]:
        bits = ["0"] * width
        for i, q in enumerate(measured):
            bits[qubit_to_clbit[q]] = str((int(pattern) >> (m - 1 - i)) & 1)
        counts["".join(bits)] = int(draws[pattern])
    return CountsResult(counts, shots, time.perf_counter() - start)


_INDEX_CACHE: dict[int, np.ndarray] = {}


def _basis_indices(size: int) -> np.ndarray:
    if size <= (1 << 20):
        cached = _INDEX_CACHE.get(size)
        if cached is None:
            cached = _INDEX_CACHE[size] = np.arange(size, dtype=np.uint64)
        return cached
    return np.arange(size, dtype=np.uint64)


def expectation_z(state: StateVector, qubits: list[int] | tuple[int, ...]) -> float:
    """Exact <Z x ... x Z> over the listed qubits."""
    n = state.num_qubits
    for q in qubits:
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for {n}-qubit state")
    mask = 0
    for q in qubits:
        mask |= 1 << q
    idx = _basis_indices(state.amplitudes.size)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(mask)) & 1)
    probs = np.real(state.amplitudes) ** 2 + np.imag(state.amplitudes) ** 2
    return float(np.dot(probs, signs))


def run_counts(circuit: Circuit, shots: int, seed: int,
               max_qubits: int = DEFAULT_MAX_QUBITS) -> CountsResult:
    """Simulate and sample in one timed pass (the per-job execution time)."""
    start = time.perf_counter()
    state = simulate(circuit, max_qubits=max_qubits)
    result = sample(state, circuit, shots, seed)
    return CountsResult(result.counts, result.shots, time.perf_counter() - start)


def run_expectation(circuit: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> tuple[float, float]:
    """Exact-mode execution: <Z...Z> over the measured qubits, plus elapsed time."""
    if not circuit.measurements:
        raise ValueError("exact mode needs measurements to define the Z group")
    start = time.perf_counter()
    state = simulate(circuit, max_qubits=max_qubits)
    value = expectation_z(state, [q for q, _ in circuit.measurements])
    return value, time.perf_counter() - start
