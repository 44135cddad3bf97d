/**
 * Session-style client: an OpenQASM instring, a job table of rows
 * (circuits) by columns (parameter/shot configurations), and non-blocking
 * runAsync(row, column) returning pollable handles. Everything executes
 * remotely over the worker wire protocol; this client never simulates.
 */

import { Wire } from "./canonical.js";
import { bindParameters, CircuitData } from "./circuit.js";
import { Connection, executeMessage, packFrame, pingMessage } from "./protocol.js";
import { parseQasm } from "./qasm.js";

export interface ColumnConfig {
  shots: number | null; // null = exact mode
  seed: number;
  theta: number[];
}

export type Counts = Record<string, number>;
export type HandleState = "queued" | "sent" | "running" | "complete" | "failed";

export class NotReadyError extends Error {}

export class JobHandle {
  state: HandleState = "queued";
  error: string | null = null;
  private value: Counts | number | null = null;
  private settled: Promise<void>;
  private settle!: () => void;

  constructor(public readonly jobId: string, public readonly endpoint: string) {
    this.settled = new Promise((resolve) => { this.settle = resolve; });
  }

  complete(): boolean {
    return this.state === "complete";
  }

  done(): boolean {
    return this.state === "complete" || this.state === "failed";
  }

  /** Counts (shots mode) or expectation value (exact mode); throws until complete. */
  result(): Counts | number {
    if (!this.complete()) {
      throw new NotReadyError(`job ${this.jobId} is ${this.state}`);
    }
    return this.value!;
  }

  wait(): Promise<void> {
    return this.settled;
  }

  /** @internal */
  _finish(state: "complete" | "failed", value: Counts | number | null, error: string | null): void {
    if (this.done()) return;
    this.state = state;
    this.value = value;
    this.error = error;
    this.settle();
  }

  /** @internal */
  _advance(state: HandleState): void {
    if (!this.done()) this.state = state;
  }
}

export interface WorkerInfo {
  worker_id: string;
  max_qubits: number;
  max_shots: number;
}

export class Session {
  endpoints: string[] = [];
  rows: CircuitData[] = [];
  columns: ColumnConfig[] = [];
  private connections = new Map<string, Connection>();
  private cursor = 0;
  private sourceText = "";

  constructor(endpoints: string[] = []) {
    this.endpoints = [...endpoints];
  }

  /** OpenQASM source for row 0 (kernel-wrapped or bare). */
  set instring(text: string) {
    this.sourceText = text;
    this.rows = [parseQasm(text)];
  }

  get instring(): string {
    return this.sourceText;
  }

  addRow(circuit: CircuitData): number {
    this.rows.push(circuit);
    return this.rows.length - 1;
  }

  /** One column per theta value, mirroring a parameter-scan job table. */
  setThetaScan(values: number[], options: { shots: number | null; seed: number }): void {
    this.columns = values.map((t) => ({
      shots: options.shots,
      seed: options.seed,
      theta: [t],
    }));
  }

  private connection(endpoint: string): Connection {
    let conn = this.connections.get(endpoint);
    if (!conn) {
      conn = new Connection(endpoint);
      this.connections.set(endpoint, conn);
    }
    return conn;
  }

  private nextEndpoint(): string {
    if (this.endpoints.length === 0) {
      throw new Error("session has no worker endpoints configured");
    }
    const endpoint = this.endpoints[this.cursor % this.endpoints.length];
    this.cursor += 1;
    return endpoint;
  }

  async ping(endpoint: string): Promise<WorkerInfo> {
    const reply = await this.connection(endpoint).request(pingMessage());
    if (reply.type !== "pong") throw new Error(`expected pong, got ${reply.type}`);
    return reply as WorkerInfo;
  }

  /** The exact frame runAsync(row, column) puts on the wire. */
  cellFrame(row: number, column: number): Buffer {
    return packFrame(this.cellMessage(row, column));
  }

  cellMessage(row: number, column: number): Wire {
    if (row < 0 || row >= this.rows.length) {
      throw new Error(`row ${row} out of range (${this.rows.length} rows)`);
    }
    if (column < 0 || column >= this.columns.length) {
      throw new Error(`column ${column} out of range (${this.columns.length} columns)`);
    }
    const config = this.columns[column];
    const bound = bindParameters(this.rows[row], config.theta);
    // column seed + row offset, as the coordinator assigns cell seeds
    return executeMessage(`cell-${row}-${column}`, bound, config.shots,
                          config.seed + row);
  }

  /** Non-blocking submit of cell (row, column); state surfaces on the handle. */
  runAsync(row: number, column: number): JobHandle {
    const frame = this.cellFrame(row, column);
    const endpoint = this.nextEndpoint();
    const handle = new JobHandle(`cell-${row}-${column}`, endpoint);
    const reply = this.connection(endpoint).sendFrame(frame);
    handle._advance("sent");
    reply.then((message) => {
      handle._advance("running");
      if (message.type === "result") {
        if (message.counts !== undefined) {
          handle._finish("complete", message.counts as Counts, null);
        } else {
          handle._finish("complete", Number(message.expectations[0]), null);
        }
      } else if (message.type === "error") {
        handle._finish("failed", null, `${message.code}: ${message.message}`);
      } else {
        handle._finish("failed", null, `unexpected reply type ${message.type}`);
      }
    }).catch((err) => {
      handle._finish("failed", null, String(err.message ?? err));
    });
    return handle;
  }

  close(): void {
    for (const conn of this.connections.values()) conn.close();
    this.connections.clear();
  }
}

/** numpy-equivalent linspace: i * ((stop-start)/(num-1)) + start, endpoint forced. */
export function linspace(start: number, stop: number, num: number): number[] {
  if (num < 2) return num === 1 ? [start] : [];
  const step = (stop - start) / (num - 1);
  const values = new Array<number>(num);
  for (let i = 0; i < num; i++) values[i] = i * step + start;
  values[num - 1] = stop;
  return values;
}
