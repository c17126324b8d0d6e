import math
import socket
import struct
import threading

import numpy as np
import pytest

from drivesim.agents import (ConstantVelocityAgent, Observation,
                             ReplayAgent, RuleAgent, protocol)
from drivesim.errors import AgentProtocolError, ValidationError
from drivesim.geom import Polyline
from drivesim.scene import straight_trajectory
from drivesim.sensors import EgoStatus


def obs_at(t=0.0, x=0.0, y=0.0, heading=0.0, v=8.0, bev=None, command="straight"):
    return Observation(ego=EgoStatus(t=t, x=x, y=y, heading=heading, v=v,
                                     command=command),
                       bev=bev if bev is not None else np.zeros((64, 64, 2)),
                       bev_extent=32.0, bev_split_height=0.2)


# ---------------------------------------------------------------------------
# built-in agents


def test_constant_velocity_stationary():
    plan = ConstantVelocityAgent().plan(obs_at(v=0.0, x=3.0, y=1.0))
    assert np.allclose(plan.x, 3.0)
    assert np.allclose(plan.y, 1.0)


def test_constant_velocity_forward():
    plan = ConstantVelocityAgent(dt=0.1).plan(obs_at(v=10.0))
    for k in range(1, len(plan) + 1):
        assert plan.x[k - 1] == pytest.approx(k * 1.0, abs=1e-12)
        assert plan.t[k - 1] == pytest.approx(k * 0.1, abs=1e-12)


def test_constant_velocity_heading_quarter_turn():
    plan = ConstantVelocityAgent(dt=0.1).plan(obs_at(v=10.0, heading=math.pi / 2))
    assert np.allclose(plan.x, 0.0, atol=1e-9)
    assert plan.y[-1] == pytest.approx(len(plan) * 0.1 * 10.0, abs=1e-9)


def test_replay_agent_echoes_recording():
    rec = straight_trajectory(0, 0, 0.0, 5.0, 10.0)
    agent = ReplayAgent(rec, horizon_steps=10, dt=0.1)
    plan = agent.plan(obs_at(t=0.0, v=5.0))
    for i, t in enumerate(plan.t):
        x, y, h, v = rec.sample(t)
        assert plan.x[i] == x and plan.v[i] == v


def test_replay_agent_clamps_past_end():
    rec = straight_trajectory(0, 0, 0.0, 5.0, 1.0)
    agent = ReplayAgent(rec, horizon_steps=5, dt=0.1)
    plan = agent.plan(obs_at(t=10.0, v=0.0))
    assert np.allclose(plan.x, rec.x[-1])


def test_rule_agent_cruises_when_clear():
    route = Polyline([(0, 0), (200, 0)])
    agent = RuleAgent(route, cruise_speed=8.0)
    plan = agent.plan(obs_at(v=8.0))
    assert np.allclose(plan.v, 8.0)
    assert plan.x[-1] > plan.x[0]


def test_rule_agent_brakes_on_blocker():
    route = Polyline([(0, 0), (200, 0)])
    agent = RuleAgent(route, cruise_speed=8.0, a_brake=3.0, margin=7.0)
    bev = np.zeros((64, 64, 2))
    # blocker 12 m ahead: cell x index = (12+32)/1 = 44, centered laterally
    bev[44, 32, 1] = 3.0
    plan = agent.plan(obs_at(v=8.0, bev=bev))
    assert plan.v[-1] < 8.0
    # stopping distance v^2/2a = 10.67 exceeds... decelerating plan reaches 0
    assert plan.v[-1] == pytest.approx(max(8.0 - 3.0 * 0.1 * len(plan), 0.0), abs=1e-9)


def test_rule_agent_ignores_blocker_beyond_corridor():
    route = Polyline([(0, 0), (200, 0)])
    agent = RuleAgent(route, cruise_speed=8.0, a_brake=3.0, margin=7.0)
    bev = np.zeros((64, 64, 2))
    bev[63, 32, 1] = 3.0   # ~31.5 m ahead, corridor is 10.7+7
    plan = agent.plan(obs_at(v=8.0, bev=bev))
    assert np.allclose(plan.v, 8.0)


# ---------------------------------------------------------------------------
# wire protocol


def test_observation_roundtrip_bytes():
    rng = np.random.default_rng(0)
    obs = Observation(
        ego=EgoStatus(t=1.5, x=2.25, y=-3.5, heading=0.7853981633974483,
                      v=8.125, a=-0.5, command="left"),
        bev=rng.integers(0, 5, (16, 16, 2)).astype(np.float32),
        bev_extent=32.0, bev_split_height=0.2,
        cameras={"front": rng.uniform(0, 1, (6, 8, 3)).astype(np.float32)},
        lidar_points=rng.uniform(-10, 10, (7, 4)).astype(np.float32),
    )
    encoded = protocol.encode_observation(obs)
    msg_type, version, payload = protocol.parse_frame(encoded[4:])
    assert msg_type == protocol.MSG_OBSERVATION
    assert version == protocol.PROTOCOL_VERSION
    back = protocol.decode_observation(payload)
    assert back.ego == obs.ego
    np.testing.assert_array_equal(back.bev, obs.bev)
    np.testing.assert_array_equal(back.cameras["front"], obs.cameras["front"])
    np.testing.assert_array_equal(back.lidar_points, obs.lidar_points)
    # byte-exact re-encode
    assert protocol.encode_observation(back) == encoded


def test_plan_roundtrip_bytes():
    plan = straight_trajectory(1.0, -2.0, 0.3, 7.5, 2.0)
    encoded = protocol.encode_plan(plan)
    _, _, payload = protocol.parse_frame(encoded[4:])
    back = protocol.decode_plan(payload)
    np.testing.assert_array_equal(back.t, plan.t)
    np.testing.assert_array_equal(back.x, plan.x)
    assert protocol.encode_plan(back) == encoded


def test_malformed_length_prefix():
    reader = protocol.FrameReader(lambda: struct.pack("<I", 1) + b"x")
    with pytest.raises(AgentProtocolError):
        reader.next_frame()


def test_plan_validation():
    from drivesim.agents import validate_plan
    plan = straight_trajectory(0, 0, 0, 5.0, 2.0, t0=0.1)
    validate_plan(plan, 0.0, 0.1)
    with pytest.raises(ValidationError):
        validate_plan(straight_trajectory(0, 0, 0, 5.0, 2.0, t0=-0.5), 0.0, 0.1)


# ---------------------------------------------------------------------------
# handshake over a real socket


def _client_hello(port, agent_id="ego", version=protocol.PROTOCOL_VERSION):
    sock = socket.create_connection(("127.0.0.1", port), timeout=5)
    raw = agent_id.encode()
    sock.sendall(protocol.frame(protocol.MSG_HELLO,
                                struct.pack("<H", len(raw)) + raw,
                                version=version))
    reader = protocol.FrameReader(lambda: sock.recv(1 << 16))
    reply = reader.next_frame()
    return sock, reader, reply


def test_handshake_ok_and_plan_cycle():
    from drivesim.agents.server import ProtocolServer
    server = ProtocolServer("127.0.0.1:0", ["ego"], timeout=5.0).listen()
    port = server.bound_port
    result = {}

    def client():
        sock, reader, reply = _client_hello(port)
        result["hello"] = reply[0]
        # one observation -> one plan
        msg_type, _, payload = reader.next_frame()
        result["got_obs"] = msg_type
        obs = protocol.decode_observation(payload)
        plan = ConstantVelocityAgent().plan(obs)
        sock.sendall(protocol.encode_plan(plan))
        sock.close()

    th = threading.Thread(target=client)
    th.start()
    server.accept_all()
    server.send_observations({"ego": obs_at(v=5.0)})
    plans = server.receive_plans(["ego"], step=0)
    server.close()
    th.join()
    assert result["hello"] == protocol.MSG_HELLO_OK
    assert result["got_obs"] == protocol.MSG_OBSERVATION
    assert plans["ego"].v[0] == 5.0


def test_handshake_version_mismatch():
    from drivesim.agents.server import ProtocolServer
    from drivesim.errors import VersionMismatch
    server = ProtocolServer("127.0.0.1:0", ["ego"], timeout=5.0).listen()
    port = server.bound_port
    replies = {}

    def client():
        sock, reader, reply = _client_hello(port, version=99)
        replies["type"], _, payload = reply[0], reply[1], reply[2]
        replies["code"] = protocol.decode_error(payload)[0]
        sock.close()

    th = threading.Thread(target=client)
    th.start()
    # the server rejects the bad client but keeps listening for a good one
    server._listener.settimeout(5.0)
    conn, _ = server._listener.accept()
    conn.settimeout(5.0)
    rejection = server._handshake(conn)
    th.join()
    server.close()
    assert isinstance(rejection, VersionMismatch)
    assert replies["type"] == protocol.MSG_ERROR
    assert replies["code"] == protocol.ERR_VERSION_MISMATCH
    assert "ego" not in server.sessions


def test_handshake_duplicate_id():
    from drivesim.agents.server import ProtocolServer
    from drivesim.errors import DuplicateAgentId
    server = ProtocolServer("127.0.0.1:0", ["a", "b"], timeout=5.0).listen()
    port = server.bound_port
    replies = {}

    def first():
        sock, reader, reply = _client_hello(port, agent_id="a")
        replies["first"] = reply[0]
        # hold the connection open while the duplicate tries
        try:
            reader.next_frame()
        except AgentProtocolError:
            pass
        sock.close()

    def dup():
        sock, reader, reply = _client_hello(port, agent_id="a")
        replies["dup_type"] = reply[0]
        replies["dup_code"] = protocol.decode_error(reply[2])[0]
        sock.close()

    t1 = threading.Thread(target=first)
    t1.start()
    import time
    deadline = time.time() + 5
    while "first" not in replies and time.time() < deadline:
        try:
            server._listener.settimeout(0.2)
            conn, _ = server._listener.accept()
            conn.settimeout(5.0)
            server._handshake(conn)
        except socket.timeout:
            pass
    t2 = threading.Thread(target=dup)
    t2.start()
    server._listener.settimeout(5.0)
    conn, _ = server._listener.accept()
    conn.settimeout(5.0)
    rejection = server._handshake(conn)
    t2.join()
    server.close()
    t1.join()
    assert isinstance(rejection, DuplicateAgentId)
    assert replies["first"] == protocol.MSG_HELLO_OK
    assert replies["dup_type"] == protocol.MSG_ERROR
    assert replies["dup_code"] == protocol.ERR_DUPLICATE_AGENT
