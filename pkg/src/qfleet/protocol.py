"""Wire protocol: length-prefixed canonical JSON frames over a stream socket.

Frames are a 4-byte big-endian payload length followed by UTF-8 JSON with
sorted keys and no whitespace. The encoding is deterministic so identical
requests are identical on the wire, whichever client produced them.
"""
from __future__ import annotations

import json
import socket
import struct

MAX_FRAME_BYTES = 256 * 1024 * 1024

# error codes carried by {"type": "error"} frames
ERR_BAD_REQUEST = "bad_request"
ERR_CAPABILITY = "capability"
ERR_EXECUTION = "execution"


class ProtocolError(RuntimeError):
    pass


def canonical_dumps(message: dict) -> bytes:
    return json.dumps(message, sort_keys=True, separators=(",", ":")).encode("utf-8")


def pack_frame(message: dict) -> bytes:
    payload = canonical_dumps(message)
    return struct.pack(">I", len(payload)) + payload


def send_frame(sock: socket.socket, message: dict) -> None:
    sock.sendall(pack_frame(message))


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    chunks = []
    remaining = n
    while remaining > 0:
        chunk = sock.recv(remaining)
        if not chunk:
            raise ConnectionError("connection closed mid-frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def recv_frame(sock: socket.socket) -> dict | None:
    """Next frame as a dict, or None on clean EOF."""
    try:
        header = sock.recv(4)
    except ConnectionResetError:
        return None
    if not header:
        return None
    if len(header) < 4:
        header += _recv_exact(sock, 4 - len(header))
    (length,) = struct.unpack(">I", header)
    if length > MAX_FRAME_BYTES:
        raise ProtocolError(f"frame of {length} bytes exceeds limit")
    payload = _recv_exact(sock, length)
    try:
        message = json.loads(payload.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ProtocolError(f"malformed frame: {exc}") from exc
    if not isinstance(message, dict) or "type" not in message:
        raise ProtocolError("frame is not an object with a 'type' field")
    return message


# -- message constructors ---------------------------------------------------

def ping_message() -> dict:
    return {"type": "ping"}


def pong_message(worker_id: str, max_qubits: int, max_shots: int) -> dict:
    return {"type": "pong", "worker_id": worker_id,
            "max_qubits": max_qubits, "max_shots": max_shots}


def execute_message(job_id: str, circuit: dict, shots: int | None, seed: int) -> dict:
    return {"type": "execute", "job_id": job_id, "circuit": circuit,
            "shots": shots, "seed": seed}


def result_message(job_id: str, *, counts: dict[str, int] | None = None,
                   expectations: list[float] | None = None,
                   execution_seconds: float = 0.0) -> dict:
    message: dict = {"type": "result", "job_id": job_id,
                     "execution_seconds": execution_seconds}
    if counts is not None:
        message["counts"] = counts
    else:
        message["expectations"] = expectations
    return message


def batch_message(job_id: str, circuits: list[dict], shots: int | None,
                  seeds: list[int]) -> dict:
    return {"type": "batch", "job_id": job_id, "circuits": circuits,
            "shots": shots, "seeds": seeds}


def batch_result_message(job_id: str, results: list[dict],
                         execution_seconds: float) -> dict:
    return {"type": "batch_result", "job_id": job_id, "results": results,
            "execution_seconds": execution_seconds}


def error_message(job_id: str | None, code: str, message: str) -> dict:
    return {"type": "error", "job_id": job_id, "code": code, "message": message}


def shutdown_message() -> dict:
    return {"type": "shutdown"}


# -- client helpers ---------------------------------------------------------

def parse_address(address: str) -> tuple[str, int]:
    host, _, port = address.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"address must be host:port, got {address!r}")
    return host, int(port)


def connect(address: str, timeout: float | None = None) -> socket.socket:
    sock = socket.create_connection(parse_address(address), timeout=timeout)
    sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
    return sock


def request(address: str, message: dict, timeout: float | None = None) -> dict:
    """One-shot request/response against a worker."""
    with connect(address, timeout) as sock:
        send_frame(sock, message)
        reply = recv_frame(sock)
    if reply is None:
        raise ConnectionError(f"worker at {address} closed the connection")
    return reply
