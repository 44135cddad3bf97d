"""Brute-force dense-matrix reference implementations used only by tests.

Everything here is built from explicit 2x2 matrices and index arithmetic,
independent of the strided gate kernels in qfleet.simulator.
"""
from __future__ import annotations

import numpy as np

from qfleet.circuit import Circuit, Gate, GateKind, Sym

_S2 = 2 ** -0.5
DENSE_1Q = {
    GateKind.I: np.eye(2, dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.diag([1, -1]).astype(complex),
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDG: np.diag([1, -1j]).astype(complex),
    GateKind.T: np.diag([1, np.exp(1j * np.pi / 4)]),
    GateKind.TDG: np.diag([1, np.exp(-1j * np.pi / 4)]),
}

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": DENSE_1Q[GateKind.X],
    "Y": DENSE_1Q[GateKind.Y],
    "Z": DENSE_1Q[GateKind.Z],
}


def _rotation(kind: GateKind, theta: float) -> np.ndarray:
    axis = {GateKind.RX: PAULI["X"], GateKind.RY: PAULI["Y"], GateKind.RZ: PAULI["Z"]}[kind]
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * axis


def gate_dense(gate: Gate, n: int) -> np.ndarray:
    """Full 2^n x 2^n unitary of a single gate (qubit 0 = LSB of the index)."""
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=complex)
    if gate.kind is GateKind.CNOT:
        c, t = gate.qubits
        for b in range(dim):
            u[b ^ (1 << t) if (b >> c) & 1 else b, b] = 1
        return u
    if gate.kind is GateKind.CZ:
        a, b_ = gate.qubits
        for b in range(dim):
            u[b, b] = -1 if ((b >> a) & 1 and (b >> b_) & 1) else 1
        return u
    q = gate.qubits[0]
    m = _rotation(gate.kind, gate.angle) if gate.kind.takes_angle else DENSE_1Q[gate.kind]
    for b in range(dim):
        bit = (b >> q) & 1
        for newbit in (0, 1):
            u[(b & ~(1 << q)) | (newbit << q), b] += m[newbit, bit]
    return u


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    u = np.eye(1 << circuit.num_qubits, dtype=complex)
    for g in circuit.gates:
        u = gate_dense(g, circuit.num_qubits) @ u
    return u


def circuit_state(circuit: Circuit) -> np.ndarray:
    e0 = np.zeros(1 << circuit.num_qubits, dtype=complex)
    e0[0] = 1.0
    return circuit_unitary(circuit) @ e0


def pauli_term_dense(paulis: dict[int, str], n: int) -> np.ndarray:
    """Tensor product with identity on unlisted qubits."""
    m = np.array([[1]], dtype=complex)
    for q in range(n - 1, -1, -1):
        m = np.kron(m, PAULI[paulis.get(q, "I")])
    return m


def pauli_sum_dense(terms: list[tuple[float, dict[int, str]]], n: int) -> np.ndarray:
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for coeff, paulis in terms:
        h += coeff * pauli_term_dense(paulis, n)
    return h


def energy_dense(circuit: Circuit, terms: list[tuple[float, dict[int, str]]]) -> float:
    psi = circuit_state(circuit)
    h = pauli_sum_dense(terms, circuit.num_qubits)
    return float(np.real(psi.conj() @ h @ psi))


GATE_POOL_1Q = [GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H,
                GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG]
GATE_POOL_ROT = [GateKind.RX, GateKind.RY, GateKind.RZ]
GATE_POOL_2Q = [GateKind.CNOT, GateKind.CZ]


def random_circuit(rng: np.random.Generator, num_qubits: int, num_gates: int,
                   symbolic: bool = False, measured: bool = False) -> Circuit:
    c = Circuit(num_qubits)
    next_sym = 0
    for _ in range(num_gates):
        r = rng.random()
        if r < 0.4:
            c = c.append(GATE_POOL_1Q[rng.integers(len(GATE_POOL_1Q))],
                         (int(rng.integers(num_qubits)),))
        elif r < 0.75 or num_qubits < 2:
            kind = GATE_POOL_ROT[rng.integers(len(GATE_POOL_ROT))]
            if symbolic and rng.random() < 0.3:
                angle: float | Sym = Sym(next_sym)
                next_sym += 1
            else:
                angle = float(rng.uniform(-2 * np.pi, 2 * np.pi))
            c = c.append(kind, (int(rng.integers(num_qubits)),), angle)
        else:
            a, b = rng.choice(num_qubits, size=2, replace=False)
            c = c.append(GATE_POOL_2Q[rng.integers(len(GATE_POOL_2Q))], (int(a), int(b)))
    if measured:
        c = c.measure_all()
    return c


def distinct_term_count(num_qubits: int, max_weight: int = 3) -> int:
    from math import comb
    return sum(comb(num_qubits, w) * 3 ** w
               for w in range(1, min(max_weight, num_qubits) + 1))


def random_pauli_terms(rng: np.random.Generator, num_qubits: int, num_terms: int,
                       max_weight: int = 3) -> list[tuple[float, dict[int, str]]]:
    """Distinct non-identity terms with coefficients uniform in [-1, 1]."""
    available = distinct_term_count(num_qubits, max_weight)
    if num_terms > available:
        raise ValueError(f"only {available} distinct terms exist on "
                         f"{num_qubits} qubits at weight <= {max_weight}")
    seen: set[tuple] = set()
    terms: list[tuple[float, dict[int, str]]] = []
    while len(terms) < num_terms:
        weight = int(rng.integers(1, min(max_weight, num_qubits) + 1))
        qubits = sorted(rng.choice(num_qubits, size=weight, replace=False))
        paulis = {int(q): "XYZ"[rng.integers(3)] for q in qubits}
        key = tuple(sorted(paulis.items()))
        if key in seen:
            continue
        seen.add(key)
        terms.append((float(rng.uniform(-1, 1)), paulis))
    return terms
