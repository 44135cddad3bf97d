"""OpenQASM 2.0 frontend for the supported gate subset.

Accepts bare OpenQASM 2.0 and the `__qpu__ void QBCIRCUIT(qreg q) { ... }`
kernel-wrapped form. `QBTHETA_<n>` in an angle position becomes the symbolic
parameter n; it may not appear inside arithmetic expressions.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .circuit import Angle, Circuit, GateKind, Sym


class QasmError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}" if line else message)


_GATE_NAMES = {
    "id": GateKind.I, "x": GateKind.X, "y": GateKind.Y, "z": GateKind.Z,
    "h": GateKind.H, "s": GateKind.S, "sdg": GateKind.SDG,
    "t": GateKind.T, "tdg": GateKind.TDG,
    "rx": GateKind.RX, "ry": GateKind.RY, "rz": GateKind.RZ,
    "cx": GateKind.CNOT, "cz": GateKind.CZ,
}
_EMIT_NAMES = {kind: name for name, kind in _GATE_NAMES.items()}

_WRAPPER_RE = re.compile(
    r"^\s*__qpu__\s+void\s+QBCIRCUIT\s*\(\s*qreg\s+([A-Za-z_]\w*)\s*\)\s*\{", re.S)

_SYMBOLS = ("->", "+", "-", "*", "/", "(", ")", "[", "]", ";", ",")


@dataclass
class Token:
    kind: str  # ident | number | symbol | string | eof
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise QasmError("unterminated string", line, col)
            tokens.append(Token("string", text[i + 1:j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        m = re.match(r"\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?", text[i:])
        if m:
            tokens.append(Token("number", m.group(), line, col))
            i += m.end()
            col += m.end()
            continue
        m = re.match(r"[A-Za-z_]\w*", text[i:])
        if m:
            tokens.append(Token("ident", m.group(), line, col))
            i += m.end()
            col += m.end()
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("symbol", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise QasmError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.qreg: tuple[str, int | None] | None = None  # (name, size or auto)
        self.creg: tuple[str, int] | None = None
        self.circuit = Circuit.empty()

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise QasmError(f"expected {want!r}, found {tok.text or tok.kind!r}",
                            tok.line, tok.column)
        return self.advance()

    def error(self, message: str, tok: Token | None = None) -> QasmError:
        tok = tok or self.peek()
        return QasmError(message, tok.line, tok.column)

    # -- grammar -----------------------------------------------------------

    def parse_program(self) -> Circuit:
        self.expect("ident", "OPENQASM")
        version = self.expect("number")
        if version.text != "2.0":
            raise self.error(f"unsupported OpenQASM version {version.text}", version)
        self.expect("symbol", ";")
        while self.peek().kind != "eof":
            self.parse_statement()
        if self.qreg is not None and self.qreg[1] is not None:
            # declared size wins over the max index the gates happened to touch
            c = self.circuit
            if self.qreg[1] < c.num_qubits:
                raise self.error("internal: index exceeded declared register")
            self.circuit = Circuit(self.qreg[1], c.gates, c.measurements)
        return self.circuit

    def parse_statement(self) -> None:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error(f"expected a statement, found {tok.text!r}")
        if tok.text == "include":
            self.advance()
            name = self.expect("string")
            if name.text != "qelib1.inc":
                raise self.error(f"unsupported include {name.text!r}", name)
            self.expect("symbol", ";")
        elif tok.text in ("qreg", "creg"):
            self.parse_register()
        elif tok.text == "measure":
            self.parse_measure()
        elif tok.text in ("u1", "u2", "u3", "U"):
            raise self.error(
                f"gate {tok.text!r} is not supported; decompose into rx/ry/rz", tok)
        elif tok.text in _GATE_NAMES:
            self.parse_gate()
        else:
            raise self.error(f"unknown gate or statement {tok.text!r}", tok)

    def parse_register(self) -> None:
        kw = self.advance()
        name = self.expect("ident")
        self.expect("symbol", "[")
        size_tok = self.expect("number")
        try:
            size = int(size_tok.text)
        except ValueError:
            raise self.error("register size must be an integer", size_tok)
        self.expect("symbol", "]")
        self.expect("symbol", ";")
        if size < 1:
            raise self.error("register size must be positive", size_tok)
        if kw.text == "qreg":
            if self.qreg is not None and self.qreg[1] is not None:
                raise self.error(f"duplicate qreg declaration {name.text!r}", name)
            if self.qreg is not None and self.qreg[0] != name.text:
                raise self.error(
                    f"qreg {name.text!r} conflicts with kernel register {self.qreg[0]!r}", name)
            self.qreg = (name.text, size)
        else:
            if self.creg is not None:
                raise self.error(f"duplicate creg declaration {name.text!r}", name)
            self.creg = (name.text, size)

    def parse_indexed(self, expected: str) -> int:
        name = self.expect("ident")
        reg = self.qreg if expected == "qreg" else self.creg
        if reg is None or reg[0] != name.text:
            raise self.error(f"unknown {expected} {name.text!r}", name)
        self.expect("symbol", "[")
        idx_tok = self.expect("number")
        try:
            index = int(idx_tok.text)
        except ValueError:
            raise self.error("index must be an integer", idx_tok)
        self.expect("symbol", "]")
        size = reg[1]
        if size is not None and index >= size:
            raise self.error(f"index {index} out of bounds for {name.text}[{size}]", idx_tok)
        return index

    def parse_gate(self) -> None:
        name_tok = self.advance()
        kind = _GATE_NAMES[name_tok.text]
        angle: Angle | None = None
        if self.peek().kind == "symbol" and self.peek().text == "(":
            self.advance()
            angle = self.parse_angle()
            self.expect("symbol", ")")
        if kind.takes_angle and angle is None:
            raise self.error(f"gate {name_tok.text!r} requires an angle", name_tok)
        if not kind.takes_angle and angle is not None:
            raise self.error(f"gate {name_tok.text!r} takes no angle", name_tok)
        qubits = [self.parse_indexed("qreg")]
        while self.peek().kind == "symbol" and self.peek().text == ",":
            self.advance()
            qubits.append(self.parse_indexed("qreg"))
        self.expect("symbol", ";")
        try:
            self.circuit = self.circuit.append(kind, qubits, angle)
        except ValueError as exc:
            raise QasmError(str(exc), name_tok.line, name_tok.column) from exc

    def parse_measure(self) -> None:
        kw = self.advance()
        qubit = self.parse_indexed("qreg")
        self.expect("symbol", "->")
        clbit = self.parse_indexed("creg")
        self.expect("symbol", ";")
        try:
            self.circuit = self.circuit.measure(qubit, clbit)
        except ValueError as exc:
            raise QasmError(str(exc), kw.line, kw.column) from exc

    # Angle grammar: expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
    # factor := '-' factor | '(' expr ')' | number | pi. QBTHETA_n must be the whole angle.

    def parse_angle(self) -> Angle:
        tok = self.peek()
        m = re.fullmatch(r"QBTHETA_(\d+)", tok.text) if tok.kind == "ident" else None
        if m:
            self.advance()
            closing = self.peek()
            if not (closing.kind == "symbol" and closing.text == ")"):
                raise self.error("parameter placeholder must be the entire angle", closing)
            return Sym(int(m.group(1)))
        return self.parse_expr()

    def parse_expr(self) -> float:
        value = self.parse_term()
        while self.peek().kind == "symbol" and self.peek().text in ("+", "-"):
            op = self.advance().text
            rhs = self.parse_term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def parse_term(self) -> float:
        value = self.parse_factor()
        while self.peek().kind == "symbol" and self.peek().text in ("*", "/"):
            op = self.advance()
            rhs = self.parse_factor()
            if op.text == "/":
                if rhs == 0:
                    raise self.error("division by zero in angle expression", op)
                value /= rhs
            else:
                value *= rhs
        return value

    def parse_factor(self) -> float:
        tok = self.peek()
        if tok.kind == "symbol" and tok.text == "-":
            self.advance()
            return -self.parse_factor()
        if tok.kind == "symbol" and tok.text == "(":
            self.advance()
            value = self.parse_expr()
            self.expect("symbol", ")")
            return value
        if tok.kind == "number":
            self.advance()
            return float(tok.text)
        if tok.kind == "ident" and tok.text == "pi":
            self.advance()
            return math.pi
        if tok.kind == "ident" and tok.text.startswith("QBTHETA_"):
            raise self.error("parameter placeholder cannot appear inside an expression", tok)
        raise self.error(f"expected a number, 'pi', or '(' in angle, found {tok.text!r}", tok)


def evaluate_angle(text: str) -> float:
    """Evaluate a constant angle expression ('pi/2', '2*pi', '0.25', ...)."""
    parser = _Parser(_tokenize(text))
    value = parser.parse_expr()
    parser.expect("eof")
    return value


def strip_kernel_wrapper(text: str) -> tuple[str, str | None]:
    """Remove the `__qpu__ void QBCIRCUIT(qreg q) {...}` shell, if present.

    Returns (body, kernel qreg name or None).
    """
    m = _WRAPPER_RE.match(text)
    if not m:
        return text, None
    close = text.rfind("}")
    if close < m.end():
        raise QasmError("kernel wrapper is missing its closing brace")
    if text[close + 1:].strip():
        raise QasmError("unexpected text after kernel wrapper")
    return text[m.end():close], m.group(1)


def parse_qasm(text: str) -> Circuit:
    """Parse the supported OpenQASM 2.0 subset into a Circuit."""
    body, kernel_reg = strip_kernel_wrapper(text)
    parser = _Parser(_tokenize(body))
    if kernel_reg is not None:
        parser.qreg = (kernel_reg, None)  # size inferred from the largest index used
    return parser.parse_program()


def emit_qasm(circuit: Circuit) -> str:
    """Render a Circuit as OpenQASM 2.0; parse_qasm inverts this exactly."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    if circuit.measurements:
        lines.append(f"creg c[{circuit.num_clbits}];")
    for g in circuit.gates:
        args = ", ".join(f"q[{q}]" for q in g.qubits)
        if g.angle is None:
            lines.append(f"{_EMIT_NAMES[g.kind]} {args};")
        elif isinstance(g.angle, Sym):
            lines.append(f"{_EMIT_NAMES[g.kind]}(QBTHETA_{g.angle.index}) {args};")
        else:
            lines.append(f"{_EMIT_NAMES[g.kind]}({g.angle!r}) {args};")
    for q, c in circuit.measurements:
        lines.append(f"measure q[{q}] -> c[{c}];")
    return "\n".join(lines) + "\n"
