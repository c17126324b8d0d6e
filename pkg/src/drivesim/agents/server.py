"""Harness-side protocol server: one blocking session per external agent,
driven in lockstep by the sim loop (all observations out, then all plans in).
"""

from __future__ import annotations

import socket

from ..errors import (AgentProtocolError, AgentTimeout, DuplicateAgentId,
                      VersionMismatch)
from . import protocol as wire


def parse_endpoint(endpoint: str):
    """'host:port' strings; bare ports bind loopback."""
    if ":" in endpoint:
        host, port = endpoint.rsplit(":", 1)
        return host or "127.0.0.1", int(port)
    return "127.0.0.1", int(endpoint)


class AgentSession:
    def __init__(self, conn: socket.socket, agent_id: str):
        self.conn = conn
        self.agent_id = agent_id
        self.reader = wire.FrameReader(lambda: conn.recv(1 << 16))

    def send(self, data: bytes):
        self.conn.sendall(data)

    def close(self):
        try:
            self.conn.sendall(wire.frame(wire.MSG_BYE))
        except OSError:
            pass
        try:
            self.conn.close()
        except OSError:
            pass


class ProtocolServer:
    """Accepts the expected agent ids, then exchanges observation/plan pairs."""

    def __init__(self, endpoint: str, expected_ids, timeout: float = 10.0):
        self.host, self.port = parse_endpoint(endpoint)
        self.expected = list(expected_ids)
        self.timeout = timeout
        self.sessions = {}
        self._listener = None

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    @property
    def bound_port(self) -> int:
        return self._listener.getsockname()[1]

    def listen(self):
        self._listener = socket.create_server((self.host, self.port))
        self._listener.settimeout(self.timeout)
        return self

    def accept_all(self):
        """Block until every expected agent id has completed its handshake."""
        while set(self.sessions) != set(self.expected):
            try:
                conn, _ = self._listener.accept()
            except socket.timeout as e:
                missing = set(self.expected) - set(self.sessions)
                raise AgentTimeout(",".join(sorted(missing)), -1) from e
            conn.settimeout(self.timeout)
            self._handshake(conn)

    def _handshake(self, conn: socket.socket):
        """Admit one connection, or reject it with an ERROR reply and keep
        listening; a bad client must not strand the legitimate ones.

        Returns the rejection exception (not raised) so callers can inspect it.
        """
        reader = wire.FrameReader(lambda: conn.recv(1 << 16))
        try:
            msg_type, version, payload = reader.next_frame()
        except AgentProtocolError as e:
            conn.close()
            return e
        if msg_type != wire.MSG_HELLO:
            conn.sendall(wire.encode_error(wire.ERR_MALFORMED, "expected HELLO"))
            conn.close()
            return AgentProtocolError(f"expected HELLO, got type {msg_type}")
        if version != wire.PROTOCOL_VERSION:
            conn.sendall(wire.encode_error(
                wire.ERR_VERSION_MISMATCH,
                f"server speaks version {wire.PROTOCOL_VERSION}"))
            conn.close()
            return VersionMismatch(f"agent offered version {version}")
        agent_id = wire.decode_hello(payload)
        if agent_id in self.sessions:
            conn.sendall(wire.encode_error(wire.ERR_DUPLICATE_AGENT,
                                           f"agent {agent_id!r} already connected"))
            conn.close()
            return DuplicateAgentId(agent_id)
        if agent_id not in self.expected:
            conn.sendall(wire.encode_error(wire.ERR_UNKNOWN_AGENT,
                                           f"agent {agent_id!r} not expected"))
            conn.close()
            return AgentProtocolError(f"unexpected agent id {agent_id!r}")
        conn.sendall(wire.frame(wire.MSG_HELLO_OK))
        session = AgentSession(conn, agent_id)
        session.reader = reader
        self.sessions[agent_id] = session
        return None

    def send_observations(self, observations: dict):
        for agent_id, obs in observations.items():
            self.sessions[agent_id].send(wire.encode_observation(obs))

    def receive_plans(self, agent_ids, step: int) -> dict:
        plans = {}
        for agent_id in agent_ids:
            session = self.sessions[agent_id]
            try:
                msg_type, version, payload = session.reader.next_frame()
            except socket.timeout as e:
                raise AgentTimeout(agent_id, step) from e
            except AgentProtocolError as e:
                raise AgentProtocolError(f"agent {agent_id!r}: {e}") from e
            wire.check_version(version)
            if msg_type != wire.MSG_PLAN:
                raise AgentProtocolError(
                    f"agent {agent_id!r} sent message type {msg_type}, expected PLAN")
            plans[agent_id] = wire.decode_plan(payload)
        return plans

    def close(self):
        for session in self.sessions.values():
            session.close()
        self.sessions.clear()
        if self._listener is not None:
            self._listener.close()
            self._listener = None


def serve_protocol(endpoint: str, expected_ids, timeout: float = 10.0) -> ProtocolServer:
    """Bind, listen, and handshake every expected external agent."""
    server = ProtocolServer(endpoint, expected_ids, timeout)
    server.listen()
    server.accept_all()
    return server
