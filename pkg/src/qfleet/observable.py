"""Pauli-string Hamiltonians and term-wise expectation values.

Each non-Z Pauli letter gets a basis-change appended to the ansatz (X: H;
Y: Sdg then H) so every term is read out as a plain Z-parity measurement;
the energy is the coefficient-weighted sum over terms, evaluated one
measurement circuit per non-identity term.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .circuit import Circuit, GateKind
from . import simulator


class PauliFormatError(ValueError):
    pass


class TermEvaluationError(RuntimeError):
    """A backend failure while evaluating one Hamiltonian term."""

    def __init__(self, term_index: int, cause: Exception):
        self.term_index = term_index
        super().__init__(f"term {term_index} failed: {cause}")


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    paulis: dict[int, str] = field(default_factory=dict)  # qubit -> X|Y|Z

    def __post_init__(self):
        for q, p in self.paulis.items():
            if q < 0:
                raise PauliFormatError(f"negative qubit index {q}")
            if p not in ("X", "Y", "Z"):
                raise PauliFormatError(f"unknown Pauli letter {p!r}")

    @property
    def is_identity(self) -> bool:
        return not self.paulis

    def key(self) -> tuple:
        return tuple(sorted(self.paulis.items()))


@dataclass(frozen=True)
class PauliOperator:
    terms: tuple[PauliTerm, ...]
    num_qubits: int

    def __post_init__(self):
        for t in self.terms:
            for q in t.paulis:
                if q >= self.num_qubits:
                    raise PauliFormatError(
                        f"qubit {q} out of range for {self.num_qubits}-qubit operator")
        keys = [t.key() for t in self.terms]
        if len(set(keys)) != len(keys):
            raise PauliFormatError("duplicate terms must be merged")

    @property
    def num_circuits(self) -> int:
        return sum(1 for t in self.terms if not t.is_identity)

    def coefficient_norm(self) -> float:
        return sum(abs(t.coefficient) for t in self.terms)

    def to_string(self) -> str:
        parts = []
        for t in self.terms:
            letters = " ".join(f"{p}{q}" for q, p in sorted(t.paulis.items()))
            parts.append(f"({t.coefficient!r}){' ' + letters if letters else ''}")
        return " + ".join(parts)


def _merge(terms: list[PauliTerm], num_qubits: int | None) -> PauliOperator:
    order: list[tuple] = []
    merged: dict[tuple, float] = {}
    maps: dict[tuple, dict[int, str]] = {}
    for t in terms:
        k = t.key()
        if k not in merged:
            order.append(k)
            merged[k] = 0.0
            maps[k] = t.paulis
        merged[k] += t.coefficient
    max_index = max((q for t in terms for q in t.paulis), default=-1)
    if num_qubits is None:
        num_qubits = max_index + 1
    elif num_qubits <= max_index:
        raise PauliFormatError(
            f"num_qubits={num_qubits} too small for qubit index {max_index}")
    return PauliOperator(tuple(PauliTerm(merged[k], maps[k]) for k in order),
                         max(num_qubits, 1))


def _parse_coefficient(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise PauliFormatError(f"malformed coefficient {text.strip()!r} "
                               "(real numbers only)") from None


def _parse_letters(tokens: list[str]) -> dict[int, str]:
    paulis: dict[int, str] = {}
    for tok in tokens:
        m = re.fullmatch(r"([A-Za-z])(\d+)", tok)
        if not m:
            raise PauliFormatError(f"expected <letter><qubit>, found {tok!r}")
        letter, qubit = m.group(1).upper(), int(m.group(2))
        if letter == "I":
            continue
        if letter not in ("X", "Y", "Z"):
            raise PauliFormatError(f"unknown Pauli letter {letter!r} in {tok!r}")
        if qubit in paulis:
            raise PauliFormatError(f"qubit {qubit} repeated within one term")
        paulis[qubit] = letter
    return paulis


def _parse_inline(text: str) -> list[PauliTerm]:
    terms = []
    pos = 0
    while pos < len(text):
        m = re.match(r"\s*\(\s*([^()]*?)\s*\)", text[pos:])
        if not m:
            raise PauliFormatError(
                f"expected '(coefficient)' at ...{text[pos:pos + 20]!r}")
        coeff = _parse_coefficient(m.group(1))
        pos += m.end()
        letters = []
        while True:
            m2 = re.match(r"\s*([A-Za-z]\d+)", text[pos:])
            if not m2:
                break
            letters.append(m2.group(1))
            pos += m2.end()
        terms.append(PauliTerm(coeff, _parse_letters(letters)))
        m3 = re.match(r"\s*(\+\s*|$)", text[pos:])
        if not m3:
            raise PauliFormatError(f"expected '+' between terms at ...{text[pos:pos + 20]!r}")
        pos += m3.end()
        if m3.group(1) == "" and pos < len(text):
            break
    return terms


def parse_pauli_string(text: str, num_qubits: int | None = None) -> PauliOperator:
    """Parse `(c) P0 P1 + ...` or the line-per-term `c P0 P1 ...` file form."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise PauliFormatError("empty operator")
    if "(" in text:
        terms = _parse_inline(" ".join(lines))
    else:
        terms = []
        for ln in lines:
            tokens = ln.split()
            terms.append(PauliTerm(_parse_coefficient(tokens[0]),
                                   _parse_letters(tokens[1:])))
    return _merge(terms, num_qubits)


def load_hamiltonian(path: str, num_qubits: int | None = None) -> PauliOperator:
    with open(path, encoding="utf-8") as fh:
        return parse_pauli_string(fh.read(), num_qubits)


_BASIS_CHANGE = {"X": (GateKind.H,), "Y": (GateKind.SDG, GateKind.H), "Z": ()}


def term_measurement_circuit(ansatz: Circuit, term: PauliTerm) -> Circuit:
    """Ansatz plus basis changes and measurements on the term's support."""
    if ansatz.measurements:
        raise ValueError("ansatz already contains measurements")
    if ansatz.is_symbolic:
        raise ValueError("ansatz must be fully literal; bind parameters first")
    c = ansatz
    support = sorted(term.paulis)
    for q in support:
        for kind in _BASIS_CHANGE[term.paulis[q]]:
            c = c.append(kind, (q,))
    for i, q in enumerate(support):
        c = c.measure(q, i)
    return c


def measurement_circuits(ansatz: Circuit, op: PauliOperator) -> list[tuple[int, Circuit]]:
    """(term index, measurement circuit) for every non-identity term, in order."""
    return [(i, term_measurement_circuit(ansatz, t))
            for i, t in enumerate(op.terms) if not t.is_identity]


def assemble_energy(op: PauliOperator,
                    term_values: dict[int, float]) -> tuple[float, list[float]]:
    """Weighted sum of per-term expectations; identity terms contribute 1."""
    per_term = []
    for i, t in enumerate(op.terms):
        per_term.append(1.0 if t.is_identity else term_values[i])
    energy = sum(t.coefficient * v for t, v in zip(op.terms, per_term))
    return energy, per_term


def parity_average(counts: dict[str, int], shots: int) -> float:
    """Shot estimate of <Z...Z>: mean of (-1)^(number of 1 bits)."""
    return sum(cnt * (-1) ** key.count("1") for key, cnt in counts.items()) / shots


def expectation(ansatz: Circuit, op: PauliOperator, shots: int | None = None,
                seed: int = 0,
                max_qubits: int = simulator.DEFAULT_MAX_QUBITS) -> tuple[float, list[float]]:
    """Local <psi|H|psi>: exact when shots is None, sampled otherwise.

    In shots mode circuit i (among the non-identity terms, in term order)
    samples with seed + i, matching the seed scheme of distributed runs.
    """
    if op.num_qubits > ansatz.num_qubits:
        raise ValueError(f"operator acts on {op.num_qubits} qubits but the "
                         f"ansatz has {ansatz.num_qubits}")
    term_values: dict[int, float] = {}
    for position, (i, circ) in enumerate(measurement_circuits(ansatz, op)):
        try:
            if shots is None:
                value, _ = simulator.run_expectation(circ, max_qubits=max_qubits)
            else:
                result = simulator.run_counts(circ, shots, seed + position,
                                              max_qubits=max_qubits)
                value = parity_average(result.counts, result.shots)
        except Exception as exc:
            raise TermEvaluationError(i, exc) from exc
        term_values[i] = value
    return assemble_energy(op, term_values)
