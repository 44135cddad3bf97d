"""Asynchronous offload to a pool of remote virtual QPUs.

Submission never blocks on remote execution: async_execute enqueues the job
and returns a JobHandle immediately. One background thread per endpoint
drives the wire exchange and the handle's state transitions; dispatch is
round-robin over healthy endpoints, with no automatic retry (failures stay
on the handle for the caller to inspect).
"""
from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from queue import Empty, Queue

from . import protocol
from .circuit import Circuit
from .cluster import _decode_value, ping_worker


class PoolExhaustedError(RuntimeError):
    """No healthy endpoint is currently available."""


class JobTimeout(TimeoutError):
    def __init__(self, pending_ids: list[str]):
        self.pending_ids = pending_ids
        super().__init__(f"{len(pending_ids)} job(s) still pending: "
                         f"{', '.join(pending_ids[:8])}"
                         + ("..." if len(pending_ids) > 8 else ""))


class JobState(Enum):
    QUEUED = "queued"
    SENT = "sent"
    RUNNING = "running"
    COMPLETE = "complete"
    FAILED = "failed"


_RANK = {JobState.QUEUED: 0, JobState.SENT: 1, JobState.RUNNING: 2,
         JobState.COMPLETE: 3, JobState.FAILED: 3}
_TERMINAL = (JobState.COMPLETE, JobState.FAILED)


@dataclass
class WorkerEndpoint:
    address: str
    max_qubits: int | None = None
    max_shots: int | None = None
    healthy: bool = True
    last_checked: float = 0.0


class JobHandle:
    """Observation object for one offloaded execution; read from any thread."""

    def __init__(self, job_id: str, endpoint: WorkerEndpoint):
        self.job_id = job_id
        self.endpoint = endpoint
        self.result = None  # CountsResult (shots mode) or float (exact mode)
        self.error: str | None = None
        self.submitted_at = time.time()
        self.completed_at: float | None = None
        self._state = JobState.QUEUED
        self.transitions: list[tuple[JobState, float]] = [(JobState.QUEUED, time.time())]
        self._lock = threading.Lock()
        self._done = threading.Event()

    @property
    def state(self) -> JobState:
        return self._state

    def complete(self) -> bool:
        return self._state is JobState.COMPLETE

    def done(self) -> bool:
        return self._state in _TERMINAL

    def wait(self, timeout: float | None = None) -> bool:
        return self._done.wait(timeout)

    def _transition(self, new: JobState) -> None:
        with self._lock:
            if self._state in _TERMINAL:
                raise RuntimeError(f"job {self.job_id}: cannot leave terminal "
                                   f"state {self._state.value}")
            if new is JobState.COMPLETE and self._state is not JobState.RUNNING:
                raise RuntimeError(f"job {self.job_id}: complete requires running")
            if _RANK[new] <= _RANK[self._state]:
                raise RuntimeError(f"job {self.job_id}: backward transition "
                                   f"{self._state.value} -> {new.value}")
            self._state = new
            self.transitions.append((new, time.time()))
            if new in _TERMINAL:
                self.completed_at = time.time()
                self._done.set()

    def _finish_ok(self, value) -> None:
        self.result = value
        self._transition(JobState.COMPLETE)

    def _finish_error(self, message: str) -> None:
        self.error = message
        self._transition(JobState.FAILED)


class ExecutorPool:
    """Round-robin pool of worker endpoints with background submitters.

    `available` means healthy, not idle: dispatch stays cyclic whatever the
    per-endpoint queue depths are.
    """

    def __init__(self, endpoints, *, timeout: float = 300.0,
                 ping_interval: float = 5.0, start_health_monitor: bool = True):
        if not endpoints:
            raise ValueError("executor pool needs at least one endpoint")
        self.endpoints = [e if isinstance(e, WorkerEndpoint) else WorkerEndpoint(str(e))
                          for e in endpoints]
        self.timeout = timeout
        self.ping_interval = ping_interval
        self._cursor = 0
        self._lock = threading.Lock()
        self._job_counter = 0
        self._stop = threading.Event()
        self._queues: dict[str, Queue] = {e.address: Queue() for e in self.endpoints}
        self._threads = [threading.Thread(target=self._submit_loop, args=(e,), daemon=True)
                         for e in self.endpoints]
        for t in self._threads:
            t.start()
        self._health_thread = None
        if start_health_monitor and ping_interval > 0:
            self._health_thread = threading.Thread(target=self._health_loop, daemon=True)
            self._health_thread.start()

    def __enter__(self) -> "ExecutorPool":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def __len__(self) -> int:
        return len(self.endpoints)

    # -- dispatch ----------------------------------------------------------

    def get_next_available_qpu(self) -> WorkerEndpoint:
        """Next healthy endpoint, cyclically; each call advances the cursor."""
        with self._lock:
            for _ in range(len(self.endpoints)):
                endpoint = self.endpoints[self._cursor % len(self.endpoints)]
                self._cursor += 1
                if endpoint.healthy:
                    return endpoint
        raise PoolExhaustedError("all endpoints are unhealthy")

    def async_execute(self, endpoint: WorkerEndpoint, circuit: Circuit,
                      shots: int | None, seed: int = 0,
                      job_id: str | None = None) -> JobHandle:
        """Non-blocking submit; returns before the job runs remotely."""
        if circuit.is_symbolic:
            raise ValueError("circuit is symbolic; bind parameters first")
        if not circuit.measurements:
            raise ValueError("circuit has no measurements")
        if shots is not None and shots < 1:
            raise ValueError("shots must be positive")
        if endpoint.max_qubits is not None and circuit.num_qubits > endpoint.max_qubits:
            raise ValueError(f"{circuit.num_qubits} qubits exceeds endpoint "
                             f"capability of {endpoint.max_qubits}")
        if (endpoint.max_shots is not None and shots is not None
                and shots > endpoint.max_shots):
            raise ValueError(f"{shots} shots exceeds endpoint capability "
                             f"of {endpoint.max_shots}")
        if job_id is None:
            with self._lock:
                self._job_counter += 1
                job_id = f"job-{self._job_counter}"
        handle = JobHandle(job_id, endpoint)
        self._queues[endpoint.address].put((handle, circuit, shots, seed))
        return handle

    def submit(self, circuit: Circuit, shots: int | None, seed: int = 0,
               job_id: str | None = None) -> JobHandle:
        """get_next_available_qpu + async_execute in one call."""
        return self.async_execute(self.get_next_available_qpu(), circuit,
                                  shots, seed, job_id)

    # -- background machinery ------------------------------------------------

    def _submit_loop(self, endpoint: WorkerEndpoint) -> None:
        queue = self._queues[endpoint.address]
        conn = None
        while True:
            try:
                item = queue.get(timeout=0.2)
            except Empty:
                if self._stop.is_set():
                    break
                continue
            if item is None:
                break
            handle, circuit, shots, seed = item
            try:
                if conn is None:
                    conn = protocol.connect(endpoint.address, timeout=self.timeout)
                    conn.settimeout(self.timeout)
                message = protocol.execute_message(
                    handle.job_id, circuit.to_json_dict(), shots, seed)
                protocol.send_frame(conn, message)
                handle._transition(JobState.SENT)
                handle._transition(JobState.RUNNING)
                reply = protocol.recv_frame(conn)
                if reply is None:
                    raise ConnectionError("worker closed the connection")
                if reply["type"] == "result":
                    handle._finish_ok(_decode_value(reply))
                elif reply["type"] == "error":
                    handle._finish_error(f"{reply['code']}: {reply['message']}")
                else:
                    raise protocol.ProtocolError(f"unexpected reply {reply['type']!r}")
            except (OSError, protocol.ProtocolError) as exc:
                if conn is not None:
                    conn.close()
                    conn = None
                endpoint.healthy = False
                if not handle.done():
                    handle._finish_error(f"transport: {exc}")
        if conn is not None:
            conn.close()

    def _health_loop(self) -> None:
        while not self._stop.wait(self.ping_interval):
            self.check_health()

    def check_health(self, timeout: float = 2.0) -> None:
        """Active ping sweep; re-marks endpoints healthy and learns capabilities."""
        for endpoint in self.endpoints:
            try:
                pong = ping_worker(endpoint.address, timeout=timeout)
            except (OSError, protocol.ProtocolError):
                endpoint.healthy = False
            else:
                endpoint.max_qubits = int(pong["max_qubits"])
                endpoint.max_shots = int(pong["max_shots"])
                endpoint.healthy = True
            endpoint.last_checked = time.time()

    def close(self) -> None:
        self._stop.set()
        for queue in self._queues.values():
            queue.put(None)
        for t in self._threads:
            t.join(timeout=5)


def pool32_endpoints(host: str = "127.0.0.1", base_port: int = 7401) -> list[str]:
    """Preset naming 32 local worker endpoints on consecutive ports."""
    return [f"{host}:{base_port + i}" for i in range(32)]


# -- job tables (parameter scans) --------------------------------------------

@dataclass
class RunConfig:
    """One job-table column: execution settings plus the parameter vector."""
    shots: int | None
    seed: int = 0
    theta: tuple[float, ...] = ()


@dataclass
class JobTable:
    rows: list[Circuit] = field(default_factory=list)
    columns: list[RunConfig] = field(default_factory=list)

    def cell(self, row: int, column: int) -> tuple[Circuit, RunConfig]:
        if not (0 <= row < len(self.rows)):
            raise IndexError(f"row {row} out of range ({len(self.rows)} rows)")
        if not (0 <= column < len(self.columns)):
            raise IndexError(f"column {column} out of range "
                             f"({len(self.columns)} columns)")
        return self.rows[row], self.columns[column]


def cell_job_id(row: int, column: int) -> str:
    return f"cell-{row}-{column}"


def cell_seed(config: RunConfig, row: int) -> int:
    # column seed + row offset keeps distributed runs bitwise reproducible
    return config.seed + row


def run_async(table: JobTable, row: int, column: int, pool: ExecutorPool) -> JobHandle:
    """Bind the cell's parameters, acquire the next QPU, submit, return the handle."""
    circuit, config = table.cell(row, column)
    bound = circuit.bind_parameters(config.theta)
    endpoint = pool.get_next_available_qpu()
    return pool.async_execute(endpoint, bound, config.shots,
                              cell_seed(config, row), cell_job_id(row, column))


def wait_all(handles: list[JobHandle], timeout: float | None = None) -> list[JobState]:
    """Block until every handle is terminal; JobTimeout lists unfinished ids."""
    deadline = None if timeout is None else time.monotonic() + timeout
    for handle in handles:
        remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
        if not handle.wait(remaining):
            pending = [h.job_id for h in handles if not h.done()]
            raise JobTimeout(pending)
    return [h.state for h in handles]


def shots_for_precision(epsilon: float) -> int:
    """Shot count 1/epsilon^2 (rounded up) for target precision epsilon."""
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    value = 1.0 / (epsilon * epsilon)
    nearest = round(value)
    if abs(value - nearest) < 1e-9 * max(nearest, 1):
        return int(nearest)
    return math.ceil(value)
