export { PyFloat, canonicalStringify, canonicalBytes, pyFloatRepr } from "./canonical.js";
export type { Wire } from "./canonical.js";
export { bindParameters, circuitToWire, parameterCount } from "./circuit.js";
export type { Angle, CircuitData, GateOp } from "./circuit.js";
export { Connection, executeMessage, packFrame, parseAddress, pingMessage } from "./protocol.js";
export { QasmError, parseQasm, stripKernelWrapper } from "./qasm.js";
export { JobHandle, NotReadyError, Session, linspace } from "./session.js";
export type { ColumnConfig, Counts, HandleState, WorkerInfo } from "./session.js";
