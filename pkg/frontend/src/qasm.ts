/**
 * Parser for the OpenQASM 2.0 subset the workers accept, including the
 * `__qpu__ void QBCIRCUIT(qreg q) { ... }` kernel wrapper and `QBTHETA_<n>`
 * parameter placeholders. Angle arithmetic is evaluated here with the same
 * IEEE operations the coordinator uses, so bound circuits match bit-for-bit.
 */

import { Angle, CircuitData, GateOp } from "./circuit.js";

export class QasmError extends Error {
  constructor(message: string, public readonly line = 0, public readonly column = 0) {
    super(line ? `line ${line}, column ${column}: ${message}` : message);
  }
}

const GATE_NAMES: Record<string, string> = {
  id: "I", x: "X", y: "Y", z: "Z", h: "H", s: "S", sdg: "Sdg",
  t: "T", tdg: "Tdg", rx: "RX", ry: "RY", rz: "RZ", cx: "CNOT", cz: "CZ",
};
const ROTATIONS = new Set(["RX", "RY", "RZ"]);
const TWO_QUBIT = new Set(["CNOT", "CZ"]);

interface Token {
  kind: "ident" | "number" | "symbol" | "string" | "eof";
  text: string;
  line: number;
  column: number;
}

const SYMBOLS = ["->", "+", "-", "*", "/", "(", ")", "[", "]", ";", ","];

function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  let i = 0, line = 1, col = 1;
  outer:
  while (i < text.length) {
    const ch = text[i];
    if (ch === "\n") { i++; line++; col = 1; continue; }
    if (ch === " " || ch === "\t" || ch === "\r") { i++; col++; continue; }
    if (text.startsWith("//", i)) {
      while (i < text.length && text[i] !== "\n") i++;
      continue;
    }
    if (ch === '"') {
      const j = text.indexOf('"', i + 1);
      if (j < 0) throw new QasmError("unterminated string", line, col);
      tokens.push({ kind: "string", text: text.slice(i + 1, j), line, column: col });
      col += j + 1 - i;
      i = j + 1;
      continue;
    }
    let m = /^(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)/.exec(text.slice(i));
    if (m) {
      tokens.push({ kind: "number", text: m[0], line, column: col });
      i += m[0].length; col += m[0].length;
      continue;
    }
    m = /^[A-Za-z_]\w*/.exec(text.slice(i));
    if (m) {
      tokens.push({ kind: "ident", text: m[0], line, column: col });
      i += m[0].length; col += m[0].length;
      continue;
    }
    for (const sym of SYMBOLS) {
      if (text.startsWith(sym, i)) {
        tokens.push({ kind: "symbol", text: sym, line, column: col });
        i += sym.length; col += sym.length;
        continue outer;
      }
    }
    throw new QasmError(`unexpected character ${JSON.stringify(ch)}`, line, col);
  }
  tokens.push({ kind: "eof", text: "", line, column: col });
  return tokens;
}

const WRAPPER = /^\s*__qpu__\s+void\s+QBCIRCUIT\s*\(\s*qreg\s+([A-Za-z_]\w*)\s*\)\s*\{/;

export function stripKernelWrapper(text: string): { body: string; kernelReg: string | null } {
  const m = WRAPPER.exec(text);
  if (!m) return { body: text, kernelReg: null };
  const close = text.lastIndexOf("}");
  if (close < m[0].length) throw new QasmError("kernel wrapper is missing its closing brace");
  if (text.slice(close + 1).trim()) throw new QasmError("unexpected text after kernel wrapper");
  return { body: text.slice(m[0].length, close), kernelReg: m[1] };
}

class Parser {
  pos = 0;
  qreg: { name: string; size: number | null } | null = null;
  creg: { name: string; size: number } | null = null;
  numQubits = 0;
  gates: GateOp[] = [];
  measurements: Array<[number, number]> = [];
  measured = new Set<number>();
  usedClbits = new Set<number>();

  constructor(private tokens: Token[]) {}

  peek(): Token { return this.tokens[this.pos]; }
  advance(): Token { return this.tokens[this.pos++]; }

  expect(kind: Token["kind"], text?: string): Token {
    const tok = this.peek();
    if (tok.kind !== kind || (text !== undefined && tok.text !== text)) {
      throw this.error(`expected ${JSON.stringify(text ?? kind)}, found ` +
                       `${JSON.stringify(tok.text || tok.kind)}`, tok);
    }
    return this.advance();
  }

  error(message: string, tok?: Token): QasmError {
    const at = tok ?? this.peek();
    return new QasmError(message, at.line, at.column);
  }

  parseProgram(): CircuitData {
    this.expect("ident", "OPENQASM");
    const version = this.expect("number");
    if (version.text !== "2.0") throw this.error(`unsupported OpenQASM version ${version.text}`, version);
    this.expect("symbol", ";");
    while (this.peek().kind !== "eof") this.parseStatement();
    const declared = this.qreg?.size ?? null;
    return {
      num_qubits: declared ?? this.numQubits,
      gates: this.gates,
      measurements: this.measurements,
    };
  }

  parseStatement(): void {
    const tok = this.peek();
    if (tok.kind !== "ident") throw this.error(`expected a statement, found ${JSON.stringify(tok.text)}`);
    if (tok.text === "include") {
      this.advance();
      const name = this.expect("string");
      if (name.text !== "qelib1.inc") throw this.error(`unsupported include ${JSON.stringify(name.text)}`, name);
      this.expect("symbol", ";");
    } else if (tok.text === "qreg" || tok.text === "creg") {
      this.parseRegister();
    } else if (tok.text === "measure") {
      this.parseMeasure();
    } else if (["u1", "u2", "u3", "U"].includes(tok.text)) {
      throw this.error(`gate ${JSON.stringify(tok.text)} is not supported; decompose into rx/ry/rz`, tok);
    } else if (tok.text in GATE_NAMES) {
      this.parseGate();
    } else {
      throw this.error(`unknown gate or statement ${JSON.stringify(tok.text)}`, tok);
    }
  }

  parseRegister(): void {
    const kw = this.advance();
    const name = this.expect("ident");
    this.expect("symbol", "[");
    const sizeTok = this.expect("number");
    const size = Number(sizeTok.text);
    this.expect("symbol", "]");
    this.expect("symbol", ";");
    if (!Number.isInteger(size) || size < 1) throw this.error("register size must be a positive integer", sizeTok);
    if (kw.text === "qreg") {
      if (this.qreg !== null && this.qreg.size !== null) {
        throw this.error(`duplicate qreg declaration ${JSON.stringify(name.text)}`, name);
      }
      if (this.qreg !== null && this.qreg.name !== name.text) {
        throw this.error(`qreg ${JSON.stringify(name.text)} conflicts with kernel register`, name);
      }
      this.qreg = { name: name.text, size };
    } else {
      if (this.creg !== null) throw this.error(`duplicate creg declaration ${JSON.stringify(name.text)}`, name);
      this.creg = { name: name.text, size };
    }
  }

  parseIndexed(expected: "qreg" | "creg"): number {
    const name = this.expect("ident");
    const reg = expected === "qreg" ? this.qreg : this.creg;
    if (!reg || reg.name !== name.text) {
      throw this.error(`unknown ${expected} ${JSON.stringify(name.text)}`, name);
    }
    this.expect("symbol", "[");
    const idxTok = this.expect("number");
    const index = Number(idxTok.text);
    this.expect("symbol", "]");
    if (!Number.isInteger(index) || index < 0) throw this.error("index must be a non-negative integer", idxTok);
    if (reg.size !== null && index >= reg.size) {
      throw this.error(`index ${index} out of bounds for ${name.text}[${reg.size}]`, idxTok);
    }
    return index;
  }

  parseGate(): void {
    const nameTok = this.advance();
    const kind = GATE_NAMES[nameTok.text];
    let angle: Angle | undefined;
    if (this.peek().kind === "symbol" && this.peek().text === "(") {
      this.advance();
      angle = this.parseAngle();
      this.expect("symbol", ")");
    }
    if (ROTATIONS.has(kind) && angle === undefined) {
      throw this.error(`gate ${JSON.stringify(nameTok.text)} requires an angle`, nameTok);
    }
    if (!ROTATIONS.has(kind) && angle !== undefined) {
      throw this.error(`gate ${JSON.stringify(nameTok.text)} takes no angle`, nameTok);
    }
    const qubits = [this.parseIndexed("qreg")];
    while (this.peek().kind === "symbol" && this.peek().text === ",") {
      this.advance();
      qubits.push(this.parseIndexed("qreg"));
    }
    this.expect("symbol", ";");
    const expectQubits = TWO_QUBIT.has(kind) ? 2 : 1;
    if (qubits.length !== expectQubits) {
      throw this.error(`${kind} expects ${expectQubits} qubit(s), got ${qubits.length}`, nameTok);
    }
    if (new Set(qubits).size !== qubits.length) {
      throw this.error(`${kind} qubits must be distinct`, nameTok);
    }
    for (const q of qubits) {
      if (this.measured.has(q)) throw this.error(`qubit ${q} is already measured`, nameTok);
      this.numQubits = Math.max(this.numQubits, q + 1);
    }
    this.gates.push(angle !== undefined ? { kind, qubits, angle } : { kind, qubits });
  }

  parseMeasure(): void {
    const kw = this.advance();
    const qubit = this.parseIndexed("qreg");
    this.expect("symbol", "->");
    const clbit = this.parseIndexed("creg");
    this.expect("symbol", ";");
    if (this.measured.has(qubit)) throw this.error(`qubit ${qubit} is already measured`, kw);
    if (this.usedClbits.has(clbit)) throw this.error(`classical bit ${clbit} is already used`, kw);
    this.measured.add(qubit);
    this.usedClbits.add(clbit);
    this.numQubits = Math.max(this.numQubits, qubit + 1);
    this.measurements.push([qubit, clbit]);
  }

  parseAngle(): Angle {
    const tok = this.peek();
    const m = tok.kind === "ident" ? /^QBTHETA_(\d+)$/.exec(tok.text) : null;
    if (m) {
      this.advance();
      const closing = this.peek();
      if (!(closing.kind === "symbol" && closing.text === ")")) {
        throw this.error("parameter placeholder must be the entire angle", closing);
      }
      return { sym: Number(m[1]) };
    }
    return { lit: this.parseExpr() };
  }

  parseExpr(): number {
    let value = this.parseTerm();
    while (this.peek().kind === "symbol" && (this.peek().text === "+" || this.peek().text === "-")) {
      const op = this.advance().text;
      const rhs = this.parseTerm();
      value = op === "+" ? value + rhs : value - rhs;
    }
    return value;
  }

  parseTerm(): number {
    let value = this.parseFactor();
    while (this.peek().kind === "symbol" && (this.peek().text === "*" || this.peek().text === "/")) {
      const op = this.advance();
      const rhs = this.parseFactor();
      if (op.text === "/") {
        if (rhs === 0) throw this.error("division by zero in angle expression", op);
        value /= rhs;
      } else {
        value *= rhs;
      }
    }
    return value;
  }

  parseFactor(): number {
    const tok = this.peek();
    if (tok.kind === "symbol" && tok.text === "-") {
      this.advance();
      return -this.parseFactor();
    }
    if (tok.kind === "symbol" && tok.text === "(") {
      this.advance();
      const value = this.parseExpr();
      this.expect("symbol", ")");
      return value;
    }
    if (tok.kind === "number") {
      this.advance();
      return Number(tok.text);
    }
    if (tok.kind === "ident" && tok.text === "pi") {
      this.advance();
      return Math.PI;
    }
    if (tok.kind === "ident" && tok.text.startsWith("QBTHETA_")) {
      throw this.error("parameter placeholder cannot appear inside an expression", tok);
    }
    throw this.error(`expected a number, 'pi', or '(' in angle, found ${JSON.stringify(tok.text)}`, tok);
  }
}

export function parseQasm(text: string): CircuitData {
  const { body, kernelReg } = stripKernelWrapper(text);
  const parser = new Parser(tokenize(body));
  if (kernelReg !== null) parser.qreg = { name: kernelReg, size: null };
  return parser.parseProgram();
}
