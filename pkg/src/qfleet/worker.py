"""Worker daemon: one virtual QPU serving the wire protocol.

Each accepted connection is serviced on its own thread, one request at a
time; `threads` bounds how many circuits of a batch run concurrently.
Failures are always answered with an error frame, never a dropped request.
"""
from __future__ import annotations

import socket
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor

from . import protocol, simulator
from .circuit import Circuit


class WorkerDaemon:
    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 max_qubits: int = simulator.DEFAULT_MAX_QUBITS,
                 max_shots: int = 100_000_000, threads: int = 1,
                 worker_id: str | None = None, delay: float = 0.0):
        if threads < 1:
            raise ValueError("threads must be >= 1")
        self.host = host
        self.port = port
        self.max_qubits = max_qubits
        self.max_shots = max_shots
        self.threads = threads
        self.worker_id = worker_id or f"worker-{uuid.uuid4().hex[:8]}"
        self.delay = delay  # artificial per-circuit latency, for tests
        self._server: socket.socket | None = None
        self._stop = threading.Event()
        self._accept_thread: threading.Thread | None = None

    # -- lifecycle ---------------------------------------------------------

    @property
    def address(self) -> str:
        return f"{self.host}:{self.port}"

    def bind(self) -> None:
        server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        server.bind((self.host, self.port))
        server.listen(64)
        server.settimeout(0.2)
        self.port = server.getsockname()[1]
        self._server = server

    def start(self) -> None:
        """Bind and serve on a background thread (test-friendly)."""
        if self._server is None:
            self.bind()
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def serve_forever(self) -> None:
        if self._server is None:
            self.bind()
        self._accept_loop()

    def stop(self) -> None:
        self._stop.set()
        if self._accept_thread is not None:
            self._accept_thread.join(timeout=5)
            self._accept_thread = None
        if self._server is not None:
            self._server.close()
            self._server = None

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _ = self._server.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            threading.Thread(target=self._serve_connection, args=(conn,),
                             daemon=True).start()

    def _serve_connection(self, conn: socket.socket) -> None:
        with conn:
            while not self._stop.is_set():
                try:
                    message = protocol.recv_frame(conn)
                except protocol.ProtocolError as exc:
                    protocol.send_frame(conn, protocol.error_message(
                        None, protocol.ERR_BAD_REQUEST, str(exc)))
                    continue
                except OSError:
                    return
                if message is None:
                    return
                try:
                    reply = self._dispatch(message)
                except Exception as exc:  # never drop a request silently
                    reply = protocol.error_message(
                        message.get("job_id"), protocol.ERR_EXECUTION, str(exc))
                try:
                    protocol.send_frame(conn, reply)
                except OSError:
                    return
                if message.get("type") == "shutdown":
                    self._stop.set()
                    return

    # -- request handling ----------------------------------------------------

    def _dispatch(self, message: dict) -> dict:
        kind = message.get("type")
        if kind == "ping":
            return protocol.pong_message(self.worker_id, self.max_qubits, self.max_shots)
        if kind == "execute":
            return self._handle_execute(message)
        if kind == "batch":
            return self._handle_batch(message)
        if kind == "shutdown":
            return {"type": "bye", "worker_id": self.worker_id}
        return protocol.error_message(message.get("job_id"), protocol.ERR_BAD_REQUEST,
                                      f"unknown message type {kind!r}")

    def _load_circuit(self, data: dict, job_id: str | None) -> Circuit:
        try:
            circuit = Circuit.from_json_dict(data)
        except Exception as exc:
            raise _RequestError(protocol.ERR_BAD_REQUEST, f"bad circuit: {exc}") from exc
        if circuit.num_qubits > self.max_qubits:
            raise _RequestError(protocol.ERR_CAPABILITY,
                                f"{circuit.num_qubits} qubits exceeds this worker's "
                                f"capability of {self.max_qubits}")
        return circuit

    def _run_one(self, circuit: Circuit, shots: int | None, seed: int) -> tuple[dict, float]:
        """Execute one circuit; returns (result fields, execution seconds)."""
        if self.delay:
            time.sleep(self.delay)
        if shots is None:
            value, elapsed = simulator.run_expectation(circuit, max_qubits=self.max_qubits)
            return {"expectations": [value]}, elapsed
        if shots > self.max_shots:
            raise _RequestError(protocol.ERR_CAPABILITY,
                                f"{shots} shots exceeds this worker's capability "
                                f"of {self.max_shots}")
        result = simulator.run_counts(circuit, shots, seed, max_qubits=self.max_qubits)
        return {"counts": result.counts}, result.execution_time

    def _handle_execute(self, message: dict) -> dict:
        job_id = message.get("job_id")
        try:
            circuit = self._load_circuit(message.get("circuit") or {}, job_id)
            shots = message.get("shots")
            fields, elapsed = self._run_one(circuit, shots, int(message.get("seed") or 0))
        except _RequestError as exc:
            return protocol.error_message(job_id, exc.code, str(exc))
        except Exception as exc:
            return protocol.error_message(job_id, protocol.ERR_EXECUTION, str(exc))
        return protocol.result_message(job_id, execution_seconds=elapsed, **fields)

    def _handle_batch(self, message: dict) -> dict:
        job_id = message.get("job_id")
        try:
            circuits = [self._load_circuit(c, job_id) for c in message.get("circuits", [])]
            shots = message.get("shots")
            seeds = message.get("seeds") or [0] * len(circuits)
            if len(seeds) != len(circuits):
                raise _RequestError(protocol.ERR_BAD_REQUEST,
                                    f"{len(seeds)} seeds for {len(circuits)} circuits")
            start = time.perf_counter()
            if self.threads > 1 and len(circuits) > 1:
                with ThreadPoolExecutor(max_workers=self.threads) as pool:
                    outcomes = list(pool.map(
                        lambda cs: self._run_one(cs[0], shots, cs[1]),
                        zip(circuits, seeds)))
            else:
                outcomes = [self._run_one(c, shots, s) for c, s in zip(circuits, seeds)]
            elapsed = time.perf_counter() - start
        except _RequestError as exc:
            return protocol.error_message(job_id, exc.code, str(exc))
        except Exception as exc:
            return protocol.error_message(job_id, protocol.ERR_EXECUTION, str(exc))
        return protocol.batch_result_message(job_id, [fields for fields, _ in outcomes],
                                             elapsed)


class _RequestError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)
