"""Wire protocol codec: frame layout, endianness, payload round trips."""

import struct

import numpy as np
import pytest

from hivekit.robot import wire


def test_frame_layout_golden_bytes():
    frame = wire.encode_frame(wire.OP_PING, 0x01020304)
    # u32 length (5) | u8 opcode | u32 request id, all big-endian
    assert frame == b"\x00\x00\x00\x05\x01\x01\x02\x03\x04"


def test_command_payload_golden_bytes():
    payload = wire.encode_command(2, 1, [1.0])
    assert payload[:4] == b"\x02\x01\x00\x01"
    assert payload[4:] == struct.pack(">d", 1.0)
    mode, gripper, values = wire.decode_command(payload)
    assert (mode, gripper) == (2, 1)
    assert values.tolist() == [1.0]


def test_state_roundtrip():
    pos = np.array([0.25, -1.5])
    vel = np.array([3.0, 0.125])
    opos = np.array([[0.5, -0.5], [1.25, 2.0]])
    ovel = np.array([[0.0, 1.0], [-1.0, 0.0]])
    payload = wire.encode_state(pos, vel, opos, ovel)
    p2, v2, op2, ov2 = wire.decode_state(payload)
    assert np.array_equal(p2, pos) and np.array_equal(v2, vel)
    assert np.array_equal(op2, opos) and np.array_equal(ov2, ovel)


def test_state_trailing_bytes_rejected():
    payload = wire.encode_state([0.0], [0.0], np.zeros((0, 2)), np.zeros((0, 2)))
    with pytest.raises(wire.WireError, match="trailing"):
        wire.decode_state(payload + b"\x00")


def test_error_roundtrip():
    frame = wire.encode_error(9, wire.ERR_BUSY, "busy")
    length, opcode, rid = struct.unpack(">IBI", frame[:9])
    assert opcode == wire.OP_ERROR and rid == 9
    code, msg = wire.decode_error(frame[9:])
    assert (code, msg) == (wire.ERR_BUSY, "busy")


def test_floats_are_big_endian_on_the_wire():
    payload = wire.encode_state([1.0], [0.0], np.zeros((0, 2)), np.zeros((0, 2)))
    # n_joints | 1.0 as >d starts with 0x3FF0...
    assert payload[2:10] == b"\x3f\xf0\x00\x00\x00\x00\x00\x00"
