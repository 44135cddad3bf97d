/**
 * Parameter scan against a pool of remote workers: submit all 100 points
 * asynchronously, do other work, then poll the handles for completion.
 *
 * Usage: node dist/examples/parameter-scan.js host:port[,host:port...]
 */
import { Session, linspace } from "../src/session.js";

const endpoints = (process.argv[2] ?? "127.0.0.1:7401").split(",");
const session = new Session(endpoints);

// Input parameterized quantum circuit in OpenQASM
session.instring = `
__qpu__ void QBCIRCUIT(qreg q) {
    OPENQASM 2.0;
    include "qelib1.inc";
    creg c[2];
    x q[1];
    ry(QBTHETA_0) q[0];
    cx q[1], q[0];
    measure q[0] -> c[0];
    measure q[1] -> c[1];
}`;

// Set up a parameter scan (100 data points) in the session job table
session.setThetaScan(linspace(0, Math.PI, 100), { shots: 1024, seed: 11 });

// Post all the jobs asynchronously
const handles = [];
for (let idx = 0; idx < session.columns.length; idx++) {
  handles.push(session.runAsync(0, idx));
}

// At this point every job has been offloaded to the worker pool,
// so this thread is free to do other useful work.

await Promise.all(handles.map((h) => h.wait()));
const allDone = handles.every((h) => h.complete());
console.log(`all jobs complete: ${allDone}`);
for (const idx of [0, 49, 99]) {
  const counts = handles[idx].result();
  console.log(`theta[${idx}] ->`, counts);
}
session.close();
