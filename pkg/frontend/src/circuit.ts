/** Circuit payloads as carried on the wire; the client never simulates them. */

import { PyFloat, Wire } from "./canonical.js";

export type Angle = { lit: number } | { sym: number };

export interface GateOp {
  kind: string;
  qubits: number[];
  angle?: Angle;
}

export interface CircuitData {
  num_qubits: number;
  gates: GateOp[];
  measurements: Array<[number, number]>;
}

export function symbolIndices(circuit: CircuitData): Set<number> {
  const indices = new Set<number>();
  for (const g of circuit.gates) {
    if (g.angle && "sym" in g.angle) indices.add(g.angle.sym);
  }
  return indices;
}

export function parameterCount(circuit: CircuitData): number {
  return symbolIndices(circuit).size;
}

export function bindParameters(circuit: CircuitData, theta: number[]): CircuitData {
  const indices = symbolIndices(circuit);
  for (let i = 0; i < indices.size; i++) {
    if (!indices.has(i)) {
      throw new Error(`symbol indices have gaps (missing ${i})`);
    }
  }
  if (theta.length !== indices.size) {
    throw new Error(
      `circuit has ${indices.size} parameter(s), got ${theta.length} value(s)`);
  }
  return {
    num_qubits: circuit.num_qubits,
    gates: circuit.gates.map((g) => {
      if (g.angle && "sym" in g.angle) {
        return { kind: g.kind, qubits: [...g.qubits], angle: { lit: theta[g.angle.sym] } };
      }
      return { kind: g.kind, qubits: [...g.qubits], ...(g.angle ? { angle: g.angle } : {}) };
    }),
    measurements: circuit.measurements.map(([q, c]) => [q, c]),
  };
}

/** Wire form of a circuit; angles become PyFloat so bytes match the coordinator. */
export function circuitToWire(circuit: CircuitData): Wire {
  const gates: Wire[] = circuit.gates.map((g) => {
    const entry: { [k: string]: Wire } = {
      kind: g.kind,
      qubits: [...g.qubits],
    };
    if (g.angle) {
      entry.angle = "lit" in g.angle
        ? { lit: new PyFloat(g.angle.lit) }
        : { sym: g.angle.sym };
    }
    return entry;
  });
  return {
    num_qubits: circuit.num_qubits,
    gates,
    measurements: circuit.measurements.map(([q, c]) => [q, c] as Wire),
  };
}
