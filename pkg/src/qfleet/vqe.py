"""VQE driver and the fixed-parameter energy-evaluation benchmark.

Each objective evaluation binds theta into the ansatz, expands the
Hamiltonian into one measurement circuit per non-identity term, and
scatter-executes the ensemble over the virtual-QPU cluster. The optimizer
loop itself is sequential; all parallelism lives inside an evaluation.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Sym
from .cluster import EnsembleJob, EnsembleResult, scatter_execute
from .observable import (PauliOperator, PauliTerm, assemble_energy,
                         measurement_circuits, parity_average)
from .optimize import OptimizeResult, nelder_mead

# Seed of the published 16-qubit synthetic benchmark Hamiltonian.
BENCHMARK_SEED = 1729


@dataclass
class VqeParams:
    ansatz: Circuit
    hamiltonian: PauliOperator
    theta0: list[float]
    max_iters: int = 100        # objective-evaluation budget
    ftol: float = 1e-6
    shots: int | None = None    # None = deterministic (exact) mode
    seed: int = 0
    n_virtual_qpus: int = 1

    def __post_init__(self):
        expected = self.ansatz.parameter_count()
        if len(self.theta0) != expected:
            raise ValueError(f"theta0 has {len(self.theta0)} entries but the "
                             f"ansatz takes {expected} parameter(s)")


@dataclass
class VqeResult:
    energies: list[float]       # one entry per objective evaluation
    opt_params: list[float]
    opt_val: float
    evaluations: int
    converged: bool
    wall_seconds: float = 0.0
    execution_seconds: float = 0.0  # worker-reported, summed over evaluations
    pre_post_seconds: float = 0.0


def hardware_efficient_ansatz(num_qubits: int, depth: int) -> Circuit:
    """Layers of RY rotations (one symbol each) followed by a CNOT ladder."""
    if num_qubits < 1 or depth < 1:
        raise ValueError("num_qubits and depth must be >= 1")
    c = Circuit(num_qubits)
    k = 0
    for _ in range(depth):
        for q in range(num_qubits):
            c = c.ry(q, Sym(k))
            k += 1
        for q in range(num_qubits - 1):
            c = c.cnot(q, q + 1)
    return c


def synthetic_hamiltonian(num_qubits: int = 16, num_terms: int = 3052,
                          seed: int = BENCHMARK_SEED,
                          max_weight: int = 4) -> PauliOperator:
    """Distinct random non-identity Pauli terms, coefficients uniform in [-1, 1]."""
    if num_terms < 1:
        raise ValueError("num_terms must be >= 1")
    from math import comb
    available = sum(comb(num_qubits, w) * 3 ** w
                    for w in range(1, min(max_weight, num_qubits) + 1))
    if num_terms > available:
        raise ValueError(f"only {available} distinct terms exist on "
                         f"{num_qubits} qubits at weight <= {max_weight}")
    rng = np.random.default_rng(seed)
    seen: set[tuple] = set()
    terms: list[PauliTerm] = []
    while len(terms) < num_terms:
        weight = int(rng.integers(1, min(max_weight, num_qubits) + 1))
        qubits = sorted(int(q) for q in rng.choice(num_qubits, size=weight, replace=False))
        paulis = {q: "XYZ"[rng.integers(3)] for q in qubits}
        key = tuple(sorted(paulis.items()))
        if key in seen:
            continue
        seen.add(key)
        terms.append(PauliTerm(float(rng.uniform(-1, 1)), paulis))
    return PauliOperator(tuple(terms), num_qubits)


def _evaluate_energy(theta, params: VqeParams,
                     workers: list[str]) -> tuple[float, list[float], EnsembleResult]:
    bound = params.ansatz.bind_parameters(theta)
    indexed = measurement_circuits(bound, params.hamiltonian)
    job = EnsembleJob(circuits=[c for _, c in indexed], shots=params.shots,
                      seed=params.seed, n_virtual_qpus=params.n_virtual_qpus)
    ensemble = scatter_execute(job, workers)
    term_values: dict[int, float] = {}
    for (term_index, _), value in zip(indexed, ensemble.values):
        if params.shots is not None:
            value = parity_average(value.counts, value.shots)
        term_values[term_index] = value
    energy, per_term = assemble_energy(params.hamiltonian, term_values)
    return energy, per_term, ensemble


def vqe_objective(theta, params: VqeParams, workers: list[str]) -> float:
    """<psi(theta)|H|psi(theta)> evaluated over the worker cluster."""
    energy, _, _ = _evaluate_energy(theta, params, workers)
    return energy


def vqe_minimize(params: VqeParams, workers: list[str]) -> VqeResult:
    """Derivative-free minimization from theta0 over the cluster."""
    wall_start = time.perf_counter()
    exec_total = 0.0

    def objective(theta):
        nonlocal exec_total
        energy, _, ensemble = _evaluate_energy(theta, params, workers)
        exec_total += ensemble.max_execution_seconds
        return energy

    opt: OptimizeResult = nelder_mead(objective, params.theta0,
                                      max_evals=params.max_iters, ftol=params.ftol)
    wall = time.perf_counter() - wall_start
    return VqeResult(
        energies=opt.history,
        opt_params=opt.x,
        opt_val=min(opt.history),
        evaluations=opt.evaluations,
        converged=opt.converged,
        wall_seconds=wall,
        execution_seconds=exec_total,
        pre_post_seconds=max(wall - exec_total, 0.0),
    )


@dataclass
class BenchmarkRow:
    workers: int
    wall_seconds: float
    execution_seconds: float  # max over workers (the parallel bottleneck)
    pre_post_seconds: float
    circuits_per_worker: list[int]
    energy: float
    speedup: float = 1.0


@dataclass
class BenchmarkReport:
    num_qubits: int
    num_terms: int
    mode: str  # "exact" or "shots"
    shots: int | None
    seed: int
    rows: list[BenchmarkRow] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "num_terms": self.num_terms,
            "mode": self.mode,
            "shots": self.shots,
            "seed": self.seed,
            "rows": [{
                "workers": r.workers,
                "wall_s": r.wall_seconds,
                "exec_s": r.execution_seconds,
                "overhead_s": r.pre_post_seconds,
                "circuits_per_worker": r.circuits_per_worker,
                "energy": r.energy,
                "speedup": r.speedup,
            } for r in self.rows],
        }


def fixed_point_energy_benchmark(params: VqeParams, worker_counts: list[int],
                                 workers: list[str]) -> BenchmarkReport:
    """One full energy evaluation per worker count k; no optimization loop.

    Reports wall time, per-worker execution time, overhead, and circuits per
    worker for each k, using fixed variational parameters.
    """
    if not worker_counts:
        raise ValueError("worker_counts must not be empty")
    if max(worker_counts) > len(workers):
        raise ValueError(f"need {max(worker_counts)} workers but only "
                         f"{len(workers)} are registered")
    if params.hamiltonian.num_circuits == 0:
        raise ValueError("benchmark ensemble is empty (identity-only Hamiltonian)")
    report = BenchmarkReport(
        num_qubits=params.hamiltonian.num_qubits,
        num_terms=len(params.hamiltonian.terms),
        mode="exact" if params.shots is None else "shots",
        shots=params.shots,
        seed=params.seed,
    )
    baseline_wall = None
    for k in worker_counts:
        run = VqeParams(params.ansatz, params.hamiltonian, params.theta0,
                        shots=params.shots, seed=params.seed, n_virtual_qpus=k)
        energy, _, ensemble = _evaluate_energy(params.theta0, run, workers)
        if baseline_wall is None:
            baseline_wall = ensemble.wall_seconds
        report.rows.append(BenchmarkRow(
            workers=k,
            wall_seconds=ensemble.wall_seconds,
            execution_seconds=ensemble.max_execution_seconds,
            pre_post_seconds=ensemble.pre_post_seconds,
            circuits_per_worker=ensemble.circuits_per_worker,
            energy=energy,
            speedup=baseline_wall / ensemble.wall_seconds,
        ))
    return report
