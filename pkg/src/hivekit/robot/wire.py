"""Hardware wire protocol: length-prefixed binary frames over TCP.

Frame layout (all integers and floats big-endian):

    u32 length | u8 opcode | u32 request_id | payload

``length`` counts everything after itself (5 + len(payload)).

Opcodes:

    0x01 PING        ()                      -> 0x81 PONG ()
    0x02 RESET       (u64 episode_seed)      -> 0x82 STATE echo
    0x03 GET_STATE   ()                      -> 0x83 STATE
    0x04 SET_CMD     (u8 mode, u8 gripper,
                      u16 n, n x f64)        -> 0x84 ACK ()
    0x7F ERROR       (u16 code, utf8 msg)    server -> client only

STATE payload: u16 n_joints | n x f64 pos | n x f64 vel |
               u16 n_objects | per object f64 px, py, vx, vy.
"""

from __future__ import annotations

import socket
import struct
from dataclasses import dataclass

import numpy as np

OP_PING = 0x01
OP_RESET = 0x02
OP_GET_STATE = 0x03
OP_SET_CMD = 0x04
OP_PONG = 0x81
OP_STATE_ECHO = 0x82
OP_STATE = 0x83
OP_ACK = 0x84
OP_ERROR = 0x7F

ERR_BUSY = 1
ERR_MALFORMED = 2
ERR_UNSUPPORTED = 3
ERR_MODE_MISMATCH = 4

MAX_FRAME = 1 << 24


class WireError(Exception):
    """Protocol violation or transport failure."""


class WireTimeout(WireError):
    pass


class RemoteError(WireError):
    def __init__(self, code: int, message: str):
        super().__init__(f"remote error {code}: {message}")
        self.code = code
        self.message = message


@dataclass
class Frame:
    opcode: int
    request_id: int
    payload: bytes


def encode_frame(opcode: int, request_id: int, payload: bytes = b"") -> bytes:
    return struct.pack(">IBI", 5 + len(payload), opcode, request_id) + payload


def encode_error(request_id: int, code: int, message: str) -> bytes:
    msg = message.encode("utf-8")
    return encode_frame(OP_ERROR, request_id, struct.pack(">H", code) + msg)


def decode_error(payload: bytes) -> tuple[int, str]:
    (code,) = struct.unpack(">H", payload[:2])
    return code, payload[2:].decode("utf-8")


def encode_state(joint_pos, joint_vel, obj_pos, obj_vel) -> bytes:
    n = len(joint_pos)
    m = len(obj_pos)
    out = [struct.pack(">H", n)]
    out.append(struct.pack(f">{n}d", *[float(x) for x in joint_pos]))
    out.append(struct.pack(f">{n}d", *[float(x) for x in joint_vel]))
    out.append(struct.pack(">H", m))
    for i in range(m):
        out.append(
            struct.pack(
                ">4d",
                float(obj_pos[i][0]),
                float(obj_pos[i][1]),
                float(obj_vel[i][0]),
                float(obj_vel[i][1]),
            )
        )
    return b"".join(out)


def decode_state(payload: bytes):
    """-> (joint_pos, joint_vel, obj_pos, obj_vel) as float64 arrays."""
    off = 0
    (n,) = struct.unpack_from(">H", payload, off)
    off += 2
    pos = np.array(struct.unpack_from(f">{n}d", payload, off))
    off += 8 * n
    vel = np.array(struct.unpack_from(f">{n}d", payload, off))
    off += 8 * n
    (m,) = struct.unpack_from(">H", payload, off)
    off += 2
    opos = np.zeros((m, 2))
    ovel = np.zeros((m, 2))
    for i in range(m):
        px, py, vx, vy = struct.unpack_from(">4d", payload, off)
        off += 32
        opos[i] = (px, py)
        ovel[i] = (vx, vy)
    if off != len(payload):
        raise WireError("state payload has trailing bytes")
    return pos, vel, opos, ovel


def encode_command(mode_code: int, gripper_code: int, values) -> bytes:
    n = len(values)
    return struct.pack(">BBH", mode_code, gripper_code, n) + struct.pack(
        f">{n}d", *[float(v) for v in values]
    )


def decode_command(payload: bytes) -> tuple[int, int, np.ndarray]:
    mode, gripper, n = struct.unpack_from(">BBH", payload, 0)
    values = np.array(struct.unpack_from(f">{n}d", payload, 4))
    if 4 + 8 * n != len(payload):
        raise WireError("command payload length mismatch")
    return mode, gripper, values


def recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        try:
            chunk = sock.recv(n - len(buf))
        except socket.timeout as e:
            raise WireTimeout("timed out waiting for frame") from e
        if not chunk:
            raise WireError("connection closed mid-frame")
        buf.extend(chunk)
    return bytes(buf)


def recv_frame(sock: socket.socket) -> Frame:
    (length,) = struct.unpack(">I", recv_exact(sock, 4))
    if length < 5 or length > MAX_FRAME:
        raise WireError(f"bad frame length {length}")
    body = recv_exact(sock, length)
    opcode, request_id = struct.unpack(">BI", body[:5])
    return Frame(opcode, request_id, body[5:])


def send_frame(sock: socket.socket, opcode: int, request_id: int, payload: bytes = b"") -> None:
    sock.sendall(encode_frame(opcode, request_id, payload))


class WireClient:
    """Single-connection request/response client with monotonically
    increasing request ids."""

    def __init__(self, host: str, port: int, timeout: float = 2.0):
        self._timeout = timeout
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except (OSError, socket.timeout) as e:
            raise WireError(f"cannot connect to {host}:{port}: {e}") from e
        self._sock.settimeout(timeout)
        self._next_id = 1

    def request(self, opcode: int, payload: bytes = b"", expect: int = 0) -> Frame:
        req_id = self._next_id
        self._next_id += 1
        send_frame(self._sock, opcode, req_id, payload)
        frame = recv_frame(self._sock)
        if frame.opcode == OP_ERROR:
            code, msg = decode_error(frame.payload)
            raise RemoteError(code, msg)
        if frame.request_id != req_id:
            raise WireError(
                f"response id {frame.request_id} does not match request {req_id}"
            )
        if expect and frame.opcode != expect:
            raise WireError(f"expected opcode {expect:#x}, got {frame.opcode:#x}")
        return frame

    def ping(self) -> None:
        self.request(OP_PING, expect=OP_PONG)

    def reset(self, episode_seed: int):
        frame = self.request(OP_RESET, struct.pack(">Q", episode_seed), expect=OP_STATE_ECHO)
        return decode_state(frame.payload)

    def get_state(self):
        frame = self.request(OP_GET_STATE, expect=OP_STATE)
        return decode_state(frame.payload)

    def set_command(self, mode_code: int, gripper_code: int, values) -> None:
        self.request(OP_SET_CMD, encode_command(mode_code, gripper_code, values), expect=OP_ACK)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass
