"""Blocking client session against the drivesim harness.

One session per process; this module is not thread-safe.
"""

from __future__ import annotations

import socket
from dataclasses import dataclass

from . import wire
from .wire import (DuplicateAgentId, Observation, Plan, ProtocolError,
                   SessionClosed, VersionMismatch)


def _parse_endpoint(endpoint: str):
    if ":" in endpoint:
        host, port = endpoint.rsplit(":", 1)
        return host or "127.0.0.1", int(port)
    return "127.0.0.1", int(endpoint)


@dataclass
class ClientSession:
    agent_id: str
    endpoint: str
    sock: socket.socket
    reader: wire.FrameReader
    open: bool = True

    def close(self):
        if self.open:
            self.open = False
            try:
                self.sock.close()
            except OSError:
                pass


def connect(endpoint: str, agent_id: str, timeout: float = 10.0) -> ClientSession:
    """Handshake with the harness; raises VersionMismatch / DuplicateAgentId
    on rejection and ConnectionRefusedError if nothing is listening."""
    host, port = _parse_endpoint(endpoint)
    sock = socket.create_connection((host, port), timeout=timeout)
    sock.settimeout(timeout)
    reader = wire.FrameReader(lambda: sock.recv(1 << 16))
    sock.sendall(wire.encode_hello(agent_id))
    reply = reader.next_frame()
    if reply is None:
        sock.close()
        raise ProtocolError("server closed during handshake")
    msg_type, version, payload = reply
    if msg_type == wire.MSG_ERROR:
        code, message = wire.decode_error(payload)
        sock.close()
        if code == wire.ERR_VERSION_MISMATCH:
            raise VersionMismatch(message)
        if code == wire.ERR_DUPLICATE_AGENT:
            raise DuplicateAgentId(message)
        raise ProtocolError(f"handshake rejected ({code}): {message}")
    if msg_type != wire.MSG_HELLO_OK:
        sock.close()
        raise ProtocolError(f"unexpected handshake reply type {msg_type}")
    if version != wire.PROTOCOL_VERSION:
        sock.close()
        raise VersionMismatch(f"server speaks version {version}")
    return ClientSession(agent_id=agent_id, endpoint=endpoint, sock=sock,
                         reader=reader)


def next_observation(session: ClientSession):
    """Next Observation, or None when the harness says BYE / closes."""
    if not session.open:
        raise SessionClosed("session already closed")
    frame = session.reader.next_frame()
    if frame is None:
        session.close()
        return None
    msg_type, version, payload = frame
    if version != wire.PROTOCOL_VERSION:
        raise VersionMismatch(f"server sent version {version}")
    if msg_type == wire.MSG_BYE:
        session.close()
        return None
    if msg_type == wire.MSG_ERROR:
        code, message = wire.decode_error(payload)
        session.close()
        raise ProtocolError(f"server error ({code}): {message}")
    if msg_type != wire.MSG_OBSERVATION:
        raise ProtocolError(f"expected OBSERVATION, got type {msg_type}")
    return wire.decode_observation(payload)


def send_plan(session: ClientSession, plan) -> None:
    if not session.open:
        raise SessionClosed("session already closed")
    if not isinstance(plan, Plan):
        plan = Plan(list(plan))
    if len(plan.waypoints) < 2:
        raise ProtocolError("plans need at least 2 waypoints")
    session.sock.sendall(wire.encode_plan(plan))


__all__ = ["ClientSession", "connect", "next_observation", "send_plan",
           "Observation", "Plan", "ProtocolError", "VersionMismatch",
           "DuplicateAgentId", "SessionClosed"]
