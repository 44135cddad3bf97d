"""qfleet: distributed orchestration of quantum circuit ensembles.

Circuits (built programmatically or parsed from OpenQASM 2.0) execute on a
pool of simulator-backed virtual QPUs, either through asynchronous per-job
offload or coordinator/worker scatter-gather, with a VQE driver and a
scaling benchmark on top.
"""
from .circuit import Angle, Circuit, Gate, GateKind, Sym
from .observable import PauliOperator, PauliTerm, expectation, parse_pauli_string
from .pool import (ExecutorPool, JobHandle, JobState, JobTable, RunConfig,
                   WorkerEndpoint, run_async, shots_for_precision, wait_all)
from .cluster import EnsembleJob, EnsembleResult, partition, scatter_execute
from .qasm import QasmError, emit_qasm, parse_qasm
from .simulator import CountsResult, StateVector, expectation_z, sample, simulate
from .vqe import (VqeParams, VqeResult, fixed_point_energy_benchmark,
                  hardware_efficient_ansatz, synthetic_hamiltonian,
                  vqe_minimize, vqe_objective)
from .worker import WorkerDaemon

__version__ = "0.1.0"
