export const LISTING_SOURCE = `__qpu__ void QBCIRCUIT(qreg q) {
    OPENQASM 2.0;
    include "qelib1.inc";
    creg c[2];
    x q[1];
    ry(QBTHETA_0) q[0];
    cx q[1], q[0];
    measure q[0] -> c[0];
    measure q[1] -> c[1];
}`;
