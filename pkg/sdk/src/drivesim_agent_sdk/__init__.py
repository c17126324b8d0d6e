"""Client SDK for the drivesim agent wire protocol. Standard library only."""

from .client import (ClientSession, connect, next_observation, send_plan)
from .wire import (COMMANDS, PROTOCOL_VERSION, DuplicateAgentId, EgoStatus,
                   Observation, Plan, ProtocolError, SessionClosed,
                   VersionMismatch)

__version__ = "0.1.0"

__all__ = [
    "connect", "next_observation", "send_plan", "ClientSession",
    "Observation", "EgoStatus", "Plan",
    "ProtocolError", "VersionMismatch", "DuplicateAgentId", "SessionClosed",
    "COMMANDS", "PROTOCOL_VERSION",
]
