"""Circuit intermediate representation.

A Circuit is an immutable value: every builder call returns a new Circuit
with the gate appended, so circuits can be shared freely between threads.
Angles are radians (float) or symbolic placeholders (Sym) resolved by
bind_parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class GateKind(Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    S = "S"
    SDG = "Sdg"
    T = "T"
    TDG = "Tdg"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"
    CZ = "CZ"
    MEASURE = "MEASURE"

    @property
    def n_qubits(self) -> int:
        return 2 if self in (GateKind.CNOT, GateKind.CZ) else 1

    @property
    def takes_angle(self) -> bool:
        return self in (GateKind.RX, GateKind.RY, GateKind.RZ)


# Gates whose inverse is themselves; S/T invert to their daggers, rotations negate.
_SELF_INVERSE = frozenset({GateKind.I, GateKind.X, GateKind.Y, GateKind.Z,
                           GateKind.H, GateKind.CNOT, GateKind.CZ})
_DAGGER = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S,
           GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T}


@dataclass(frozen=True)
class Sym:
    """Symbolic angle placeholder theta_<index>."""
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"symbol index must be non-negative, got {self.index}")


Angle = float | Sym


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: Angle | None = None


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over num_qubits qubits plus terminal measurements.

    measurements maps qubit -> classical bit, in append order. `grow` marks
    builder circuits that widen to max referenced index + 1 on append; it is
    ignored for equality so round-tripped circuits compare equal.
    """
    num_qubits: int = 0
    gates: tuple[Gate, ...] = ()
    measurements: tuple[tuple[int, int], ...] = ()
    grow: bool = field(default=False, compare=False, repr=False)

    @staticmethod
    def empty() -> "Circuit":
        """Auto-growing builder circuit, as used when no size is pre-declared."""
        return Circuit(num_qubits=0, grow=True)

    # -- builder ---------------------------------------------------------

    def append(self, kind: GateKind, qubits: list[int] | tuple[int, ...],
               angle: Angle | None = None) -> "Circuit":
        qubits = tuple(qubits)
        if kind is GateKind.MEASURE:
            if angle is not None:
                raise ValueError("measurement takes no angle")
            if len(qubits) != 1:
                raise ValueError(f"MEASURE acts on one qubit, got {len(qubits)}")
            return self.measure(qubits[0])
        if len(qubits) != kind.n_qubits:
            raise ValueError(f"{kind.value} expects {kind.n_qubits} qubit(s), got {len(qubits)}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{kind.value} qubits must be distinct, got {qubits}")
        if kind.takes_angle and angle is None:
            raise ValueError(f"{kind.value} requires an angle")
        if not kind.takes_angle and angle is not None:
            raise ValueError(f"{kind.value} takes no angle")
        num_qubits = self._check_qubits(qubits)
        if angle is not None and not isinstance(angle, Sym):
            angle = float(angle)
        gate = Gate(kind, qubits, angle)
        return Circuit(num_qubits, self.gates + (gate,), self.measurements, self.grow)

    def _check_qubits(self, qubits: tuple[int, ...]) -> int:
        measured = {q for q, _ in self.measurements}
        for q in qubits:
            if q < 0:
                raise ValueError(f"negative qubit index {q}")
            if q in measured:
                raise ValueError(f"qubit {q} is already measured")
            if not self.grow and q >= self.num_qubits:
                raise ValueError(f"qubit {q} out of range for {self.num_qubits}-qubit circuit")
        if self.grow:
            return max(self.num_qubits, max(qubits) + 1)
        return self.num_qubits

    def i(self, q: int) -> "Circuit": return self.append(GateKind.I, (q,))
    def x(self, q: int) -> "Circuit": return self.append(GateKind.X, (q,))
    def y(self, q: int) -> "Circuit": return self.append(GateKind.Y, (q,))
    def z(self, q: int) -> "Circuit": return self.append(GateKind.Z, (q,))
    def h(self, q: int) -> "Circuit": return self.append(GateKind.H, (q,))
    def s(self, q: int) -> "Circuit": return self.append(GateKind.S, (q,))
    def sdg(self, q: int) -> "Circuit": return self.append(GateKind.SDG, (q,))
    def t(self, q: int) -> "Circuit": return self.append(GateKind.T, (q,))
    def tdg(self, q: int) -> "Circuit": return self.append(GateKind.TDG, (q,))
    def rx(self, q: int, angle: Angle) -> "Circuit": return self.append(GateKind.RX, (q,), angle)
    def ry(self, q: int, angle: Angle) -> "Circuit": return self.append(GateKind.RY, (q,), angle)
    def rz(self, q: int, angle: Angle) -> "Circuit": return self.append(GateKind.RZ, (q,), angle)
    def cnot(self, control: int, target: int) -> "Circuit":
        return self.append(GateKind.CNOT, (control, target))
    def cz(self, a: int, b: int) -> "Circuit": return self.append(GateKind.CZ, (a, b))

    def measure(self, qubit: int, clbit: int | None = None) -> "Circuit":
        if clbit is None:
            clbit = len(self.measurements)
        measured = {q for q, _ in self.measurements}
        if qubit in measured:
            raise ValueError(f"qubit {qubit} is already measured")
        if clbit in {c for _, c in self.measurements}:
            raise ValueError(f"classical bit {clbit} is already used")
        if qubit < 0 or clbit < 0:
            raise ValueError("qubit and classical bit indices must be non-negative")
        num_qubits = self.num_qubits
        if qubit >= num_qubits:
            if not self.grow:
                raise ValueError(f"qubit {qubit} out of range for {num_qubits}-qubit circuit")
            num_qubits = qubit + 1
        return Circuit(num_qubits, self.gates,
                       self.measurements + ((qubit, clbit),), self.grow)

    def measure_all(self) -> "Circuit":
        """Measure every qubit i into classical bit i."""
        if self.measurements:
            raise ValueError("circuit already contains measurements")
        c = self
        for q in range(self.num_qubits):
            c = c.measure(q, q)
        return c

    # -- parameters ------------------------------------------------------

    def symbol_indices(self) -> set[int]:
        return {g.angle.index for g in self.gates if isinstance(g.angle, Sym)}

    def parameter_count(self) -> int:
        """Number of distinct symbolic angle indices."""
        return len(self.symbol_indices())

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(g.angle, Sym) for g in self.gates)

    def bind_parameters(self, theta) -> "Circuit":
        """Substitute theta[i] for every Sym(i); returns a fully literal circuit."""
        indices = self.symbol_indices()
        k = len(indices)
        if indices != set(range(k)):
            missing = sorted(set(range(max(indices) + 1)) - indices)
            raise ValueError(f"symbol indices have gaps (missing {missing})")
        theta = [float(v) for v in theta]
        if len(theta) != k:
            raise ValueError(f"circuit has {k} parameter(s), got {len(theta)} value(s)")
        gates = tuple(
            Gate(g.kind, g.qubits, theta[g.angle.index]) if isinstance(g.angle, Sym) else g
            for g in self.gates)
        return Circuit(self.num_qubits, gates, self.measurements, self.grow)

    # -- misc ------------------------------------------------------------

    @property
    def num_clbits(self) -> int:
        return max((c for _, c in self.measurements), default=-1) + 1

    def inverse(self) -> "Circuit":
        """Adjoint of the unitary part; measurements are not invertible."""
        if self.measurements:
            raise ValueError("cannot invert a measured circuit")
        gates = []
        for g in reversed(self.gates):
            if g.kind in _SELF_INVERSE:
                gates.append(g)
            elif g.kind in _DAGGER:
                gates.append(Gate(_DAGGER[g.kind], g.qubits))
            else:  # rotation
                if isinstance(g.angle, Sym):
                    raise ValueError("cannot invert a symbolic circuit")
                gates.append(Gate(g.kind, g.qubits, -g.angle))
        return Circuit(self.num_qubits, tuple(gates), (), self.grow)

    # -- canonical JSON form (wire payload) ------------------------------

    def to_json_dict(self) -> dict:
        gates = []
        for g in self.gates:
            entry: dict = {"kind": g.kind.value, "qubits": list(g.qubits)}
            if g.angle is not None:
                if isinstance(g.angle, Sym):
                    entry["angle"] = {"sym": g.angle.index}
                else:
                    entry["angle"] = {"lit": g.angle}
            gates.append(entry)
        return {"num_qubits": self.num_qubits,
                "gates": gates,
                "measurements": [[q, c] for q, c in self.measurements]}

    @staticmethod
    def from_json_dict(data: dict) -> "Circuit":
        c = Circuit(num_qubits=int(data["num_qubits"]))
        for entry in data["gates"]:
            kind = GateKind(entry["kind"])
            angle = None
            if "angle" in entry and entry["angle"] is not None:
                a = entry["angle"]
                angle = Sym(int(a["sym"])) if "sym" in a else float(a["lit"])
            c = c.append(kind, tuple(int(q) for q in entry["qubits"]), angle)
        for q, cl in data["measurements"]:
            c = c.measure(int(q), int(cl))
        return c
