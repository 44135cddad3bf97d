import json
import socket
import struct

import pytest

from qfleet import protocol
from qfleet.protocol import (ProtocolError, canonical_dumps, pack_frame,
                             parse_address, recv_frame, send_frame)


def test_canonical_dumps_is_sorted_and_compact():
    payload = canonical_dumps({"b": 1, "a": {"z": 2, "y": [1, 2]}})
    assert payload == b'{"a":{"y":[1,2],"z":2},"b":1}'


def test_pack_frame_layout():
    frame = pack_frame({"type": "ping"})
    assert frame[:4] == struct.pack(">I", len(frame) - 4)
    assert json.loads(frame[4:]) == {"type": "ping"}


def test_send_recv_round_trip():
    a, b = socket.socketpair()
    with a, b:
        message = protocol.execute_message("job-1", {"num_qubits": 1, "gates": [],
                                                     "measurements": [[0, 0]]}, 10, 3)
        send_frame(a, message)
        assert recv_frame(b) == message


def test_recv_eof_returns_none():
    a, b = socket.socketpair()
    with b:
        a.close()
        assert recv_frame(b) is None


def test_recv_rejects_oversized_frame():
    a, b = socket.socketpair()
    with a, b:
        a.sendall(struct.pack(">I", protocol.MAX_FRAME_BYTES + 1))
        with pytest.raises(ProtocolError, match="limit"):
            recv_frame(b)


def test_recv_rejects_malformed_json():
    a, b = socket.socketpair()
    with a, b:
        payload = b"{not json"
        a.sendall(struct.pack(">I", len(payload)) + payload)
        with pytest.raises(ProtocolError, match="malformed"):
            recv_frame(b)


def test_recv_rejects_non_object():
    a, b = socket.socketpair()
    with a, b:
        payload = b"[1,2,3]"
        a.sendall(struct.pack(">I", len(payload)) + payload)
        with pytest.raises(ProtocolError, match="type"):
            recv_frame(b)


def test_message_schemas_match_wire_contract():
    execute = protocol.execute_message("j", {"c": 1}, None, 7)
    assert set(execute) == {"type", "job_id", "circuit", "shots", "seed"}
    assert execute["shots"] is None  # null means exact mode
    batch = protocol.batch_message("j", [{"c": 1}], 10, [1])
    assert set(batch) == {"type", "job_id", "circuits", "shots", "seeds"}
    error = protocol.error_message("j", protocol.ERR_BAD_REQUEST, "nope")
    assert set(error) == {"type", "job_id", "code", "message"}
    pong = protocol.pong_message("w", 24, 1000)
    assert set(pong) == {"type", "worker_id", "max_qubits", "max_shots"}


def test_parse_address():
    assert parse_address("127.0.0.1:7401") == ("127.0.0.1", 7401)
    with pytest.raises(ValueError):
        parse_address("nonsense")
    with pytest.raises(ValueError):
        parse_address("host:")
