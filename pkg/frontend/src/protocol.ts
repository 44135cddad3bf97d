/** Length-prefixed frames and a FIFO request connection to one worker. */

import * as net from "node:net";

import { canonicalBytes, Wire } from "./canonical.js";
import { CircuitData, circuitToWire } from "./circuit.js";

export function executeMessage(jobId: string, circuit: CircuitData,
                               shots: number | null, seed: number): Wire {
  return {
    type: "execute",
    job_id: jobId,
    circuit: circuitToWire(circuit),
    shots,
    seed,
  };
}

export function pingMessage(): Wire {
  return { type: "ping" };
}

export function packFrame(message: Wire): Buffer {
  const payload = canonicalBytes(message);
  const header = Buffer.allocUnsafe(4);
  header.writeUInt32BE(payload.length, 0);
  return Buffer.concat([header, payload]);
}

export function parseAddress(address: string): { host: string; port: number } {
  const at = address.lastIndexOf(":");
  const host = address.slice(0, at);
  const port = Number(address.slice(at + 1));
  if (!host || !Number.isInteger(port)) {
    throw new Error(`address must be host:port, got ${JSON.stringify(address)}`);
  }
  return { host, port };
}

interface Pending {
  resolve: (reply: any) => void;
  reject: (err: Error) => void;
}

/**
 * One persistent socket per worker. Requests are sent as they arrive and
 * replies resolved in FIFO order (the worker answers a connection's
 * requests sequentially).
 */
export class Connection {
  private socket: net.Socket | null = null;
  private buffer = Buffer.alloc(0);
  private pending: Pending[] = [];
  private connectPromise: Promise<void> | null = null;
  private closed = false;

  constructor(public readonly address: string) {}

  private ensureConnected(): Promise<void> {
    if (this.connectPromise) return this.connectPromise;
    const { host, port } = parseAddress(this.address);
    this.connectPromise = new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port, noDelay: true });
      socket.on("connect", () => {
        this.socket = socket;
        resolve();
      });
      socket.on("data", (chunk) => this.onData(chunk));
      socket.on("error", (err) => {
        this.failAll(new Error(`transport: ${err.message}`));
        reject(err);
      });
      socket.on("close", () => {
        if (!this.closed) this.failAll(new Error("transport: connection closed"));
        this.socket = null;
        this.connectPromise = null;
      });
    });
    return this.connectPromise;
  }

  private onData(chunk: Buffer): void {
    this.buffer = Buffer.concat([this.buffer, chunk]);
    while (this.buffer.length >= 4) {
      const length = this.buffer.readUInt32BE(0);
      if (this.buffer.length < 4 + length) break;
      const payload = this.buffer.subarray(4, 4 + length);
      this.buffer = this.buffer.subarray(4 + length);
      const next = this.pending.shift();
      if (!next) continue; // unsolicited frame; drop
      try {
        next.resolve(JSON.parse(payload.toString("utf-8")));
      } catch (err) {
        next.reject(new Error(`malformed frame: ${err}`));
      }
    }
  }

  private failAll(err: Error): void {
    const waiting = this.pending;
    this.pending = [];
    for (const p of waiting) p.reject(err);
  }

  /** Send a pre-packed frame; the reply is matched FIFO. */
  sendFrame(frame: Buffer): Promise<any> {
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.ensureConnected()
        .then(() => this.socket!.write(frame))
        .catch((err) => {
          const index = this.pending.findIndex((p) => p.resolve === resolve);
          if (index >= 0) this.pending.splice(index, 1);
          reject(new Error(`transport: ${err.message ?? err}`));
        });
    });
  }

  request(message: Wire): Promise<any> {
    return this.sendFrame(packFrame(message));
  }

  close(): void {
    this.closed = true;
    this.socket?.end();
    this.socket?.destroy();
    this.socket = null;
  }
}
