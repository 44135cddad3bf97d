"""Coordinator side of the scatter/gather runtime.

A circuit ensemble is statically partitioned into contiguous, balanced
batches, one per virtual QPU; batches execute in parallel and results are
reassembled in submission order. Per-circuit seeds travel with the circuits,
so results do not depend on how many workers served the run.
"""
from __future__ import annotations

import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import protocol
from .circuit import Circuit
from .simulator import CountsResult


class EnsembleError(RuntimeError):
    """A worker failed mid-ensemble; the whole scatter/gather is abandoned.

    completed holds the per-worker result prefix gathered before the failure.
    """

    def __init__(self, worker: str, cause: str, completed: dict[str, list] | None = None):
        self.worker = worker
        self.completed = completed or {}
        super().__init__(f"worker {worker} failed during ensemble: {cause}")


def partition(total: int, workers: int) -> list[range]:
    """Contiguous index ranges covering 0..total-1, sizes differing by <= 1."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if total < 0:
        raise ValueError("total must be >= 0")
    base, extra = divmod(total, workers)
    ranges = []
    start = 0
    for i in range(workers):
        size = base + (1 if i < extra else 0)
        ranges.append(range(start, start + size))
        start += size
    return ranges


@dataclass
class EnsembleJob:
    circuits: list[Circuit]
    shots: int | None = None  # None = exact mode
    seed: int = 0
    n_virtual_qpus: int = 1


@dataclass
class EnsembleResult:
    values: list  # per circuit, original order: CountsResult or float
    execution_seconds: list[float]  # per worker, self-reported
    pre_post_seconds: float
    wall_seconds: float
    circuits_per_worker: list[int]
    workers: list[str] = field(default_factory=list)

    @property
    def max_execution_seconds(self) -> float:
        return max(self.execution_seconds, default=0.0)


def _decode_value(fields: dict):
    if "counts" in fields:
        counts = {k: int(v) for k, v in fields["counts"].items()}
        return CountsResult(counts, sum(counts.values()))
    return float(fields["expectations"][0])


def _run_batch(address: str, circuits: list[Circuit], shots: int | None,
               seeds: list[int], job_id: str, timeout: float) -> tuple[list, float]:
    message = protocol.batch_message(job_id, [c.to_json_dict() for c in circuits],
                                     shots, seeds)
    reply = protocol.request(address, message, timeout=timeout)
    if reply["type"] == "error":
        raise RuntimeError(f"{reply['code']}: {reply['message']}")
    if reply["type"] != "batch_result":
        raise protocol.ProtocolError(f"unexpected reply type {reply['type']!r}")
    return [_decode_value(f) for f in reply["results"]], float(reply["execution_seconds"])


def scatter_execute(job: EnsembleJob, workers: list[str],
                    timeout: float = 600.0) -> EnsembleResult:
    """Scatter the ensemble over the first n_virtual_qpus workers and gather."""
    k = job.n_virtual_qpus
    if k < 1:
        raise ValueError("n_virtual_qpus must be >= 1")
    if k > len(workers):
        raise ValueError(f"{k} virtual QPUs requested but only "
                         f"{len(workers)} workers registered")
    for i, c in enumerate(job.circuits):
        if c.is_symbolic:
            raise ValueError(f"circuit {i} is symbolic; bind parameters first")
    active = workers[:k]
    ranges = partition(len(job.circuits), k)
    seeds = [job.seed + i for i in range(len(job.circuits))]
    wall_start = time.perf_counter()

    def run_part(i: int):
        r = ranges[i]
        if len(r) == 0:
            return [], 0.0
        return _run_batch(active[i], [job.circuits[j] for j in r], job.shots,
                          [seeds[j] for j in r], f"batch-{i}", timeout)

    failures: list[tuple[str, Exception]] = []
    completed: dict[str, list] = {}
    per_worker: list[tuple[list, float]] = [([], 0.0)] * k
    with ThreadPoolExecutor(max_workers=max(k, 1)) as pool:
        futures = {pool.submit(run_part, i): i for i in range(k)}
        for future, i in futures.items():
            try:
                per_worker[i] = future.result()
                completed[active[i]] = per_worker[i][0]
            except Exception as exc:
                failures.append((active[i], exc))
    if failures:
        worker, cause = failures[0]
        raise EnsembleError(worker, str(cause), completed)

    values: list = [None] * len(job.circuits)
    for i, r in enumerate(ranges):
        for offset, j in enumerate(r):
            values[j] = per_worker[i][0][offset]
    wall = time.perf_counter() - wall_start
    exec_seconds = [per_worker[i][1] for i in range(k)]
    return EnsembleResult(
        values=values,
        execution_seconds=exec_seconds,
        pre_post_seconds=max(wall - max(exec_seconds, default=0.0), 0.0),
        wall_seconds=wall,
        circuits_per_worker=[len(r) for r in ranges],
        workers=list(active),
    )


def ping_worker(address: str, timeout: float = 5.0) -> dict:
    reply = protocol.request(address, protocol.ping_message(), timeout=timeout)
    if reply["type"] != "pong":
        raise protocol.ProtocolError(f"expected pong, got {reply['type']!r}")
    return reply


def shutdown_worker(address: str, timeout: float = 5.0) -> None:
    protocol.request(address, protocol.shutdown_message(), timeout=timeout)


class LocalWorkerFleet:
    """Spawns local worker processes and reaps them; used by benchmarks/tests."""

    def __init__(self, count: int, max_qubits: int = 24, threads: int = 1,
                 startup_timeout: float = 20.0):
        self.count = count
        self.max_qubits = max_qubits
        self.threads = threads
        self.startup_timeout = startup_timeout
        self.processes: list[subprocess.Popen] = []
        self.addresses: list[str] = []

    def __enter__(self) -> "LocalWorkerFleet":
        try:
            for i in range(self.count):
                proc = subprocess.Popen(
                    [sys.executable, "-m", "qfleet", "worker", "--port", "0",
                     "--max-qubits", str(self.max_qubits),
                     "--threads", str(self.threads),
                     "--worker-id", f"local-{i}"],
                    stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, text=True)
                self.processes.append(proc)
            deadline = time.monotonic() + self.startup_timeout
            for proc in self.processes:
                line = proc.stdout.readline().strip()
                if not line.startswith("READY "):
                    raise RuntimeError(f"worker failed to start: {line!r}")
                self.addresses.append(line.split(" ", 1)[1])
                if time.monotonic() > deadline:
                    raise RuntimeError("workers took too long to start")
        except Exception:
            self._terminate_all()
            raise
        return self

    def kill(self, index: int) -> None:
        self.processes[index].kill()
        self.processes[index].wait()

    def _terminate_all(self) -> None:
        for proc in self.processes:
            if proc.poll() is None:
                proc.terminate()
        for proc in self.processes:
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

    def __exit__(self, *exc_info) -> None:
        self._terminate_all()
