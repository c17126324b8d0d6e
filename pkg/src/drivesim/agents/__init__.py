"""The agent boundary: reference planners and the external wire protocol."""

from . import protocol
from .builtin import ConstantVelocityAgent, ReplayAgent, RuleAgent
from .pool import AgentPool
from .server import AgentSession, ProtocolServer, parse_endpoint, serve_protocol
from .types import COMMAND_CODES, COMMANDS, Observation, validate_plan

__all__ = [
    "Observation", "COMMANDS", "COMMAND_CODES", "validate_plan",
    "ConstantVelocityAgent", "ReplayAgent", "RuleAgent",
    "AgentPool", "ProtocolServer", "AgentSession", "serve_protocol",
    "parse_endpoint", "protocol",
]
