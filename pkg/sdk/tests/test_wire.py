"""Byte-exact decode/encode round-trips against harness-emitted golden frames."""

import struct
from pathlib import Path

import pytest

from drivesim_agent_sdk import wire

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def parse(raw: bytes):
    (n,) = struct.unpack_from("<I", raw, 0)
    assert len(raw) == 4 + n
    body = raw[4:]
    return body[0], body[1], body[2:]


def test_hello_golden():
    raw = (FIXTURES / "hello.bin").read_bytes()
    msg_type, version, payload = parse(raw)
    assert msg_type == wire.MSG_HELLO
    assert version == wire.PROTOCOL_VERSION
    assert wire.encode_hello("ego") == raw


def test_error_golden():
    raw = (FIXTURES / "error_version.bin").read_bytes()
    msg_type, _, payload = parse(raw)
    assert msg_type == wire.MSG_ERROR
    code, message = wire.decode_error(payload)
    assert code == wire.ERR_VERSION_MISMATCH
    assert "version" in message


def test_observation_golden_roundtrip():
    raw = (FIXTURES / "observation.bin").read_bytes()
    msg_type, version, payload = parse(raw)
    assert msg_type == wire.MSG_OBSERVATION
    assert version == wire.PROTOCOL_VERSION
    obs = wire.decode_observation(payload)
    # frozen field expectations (values chosen exactly representable)
    assert obs.ego.t == 1.25
    assert obs.ego.x == -3.5
    assert obs.ego.y == 12.0625
    assert obs.ego.heading == 0.78125
    assert obs.ego.v == 8.5
    assert obs.ego.a == -0.375
    assert obs.ego.command == "left"
    assert obs.bev_shape == (8, 8)
    assert obs.bev_extent == 32.0
    assert obs.bev_count(3, 4, high=False) == 2.0
    assert obs.bev_count(5, 2, high=True) == 5.0
    assert set(obs.cameras) == {"front"}
    w, h, img = obs.cameras["front"]
    assert (w, h) == (4, 3)
    assert len(img) == 4 * 3 * 3
    assert len(obs.lidar_points) == 3 * 4
    assert obs.lidar_points[0] == 1.5
    # byte-exact re-encode
    assert wire.encode_observation(obs) == raw


def test_plan_golden_roundtrip():
    raw = (FIXTURES / "plan.bin").read_bytes()
    msg_type, _, payload = parse(raw)
    assert msg_type == wire.MSG_PLAN
    plan = wire.decode_plan(payload)
    assert len(plan.waypoints) == 5
    assert plan.waypoints[0] == (0.1, 0.0, 0.0, 0.1, 8.125)
    assert plan.waypoints[4][4] == 8.125
    assert wire.encode_plan(plan) == raw


def test_plan_roundtrip_random_values():
    plan = wire.Plan([(0.1 * k, 1.5 * k, -0.25 * k, 0.3, 7.5)
                      for k in range(1, 9)])
    encoded = wire.encode_plan(plan)
    _, _, payload = parse(encoded)
    back = wire.decode_plan(payload)
    assert back.waypoints == plan.waypoints
    assert wire.encode_plan(back) == encoded


def test_malformed_length_prefix():
    reader = wire.FrameReader(lambda: struct.pack("<I", 1) + b"x")
    with pytest.raises(wire.ProtocolError):
        reader.next_frame()


def test_truncated_frame():
    chunks = [struct.pack("<I", 100) + b"ab", b""]
    reader = wire.FrameReader(lambda: chunks.pop(0))
    with pytest.raises(wire.ProtocolError):
        reader.next_frame()
