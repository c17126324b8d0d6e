"""Lockstep agent pool: in-process planners and remote sessions behind one call."""

from __future__ import annotations

from ..errors import AgentProtocolError, ValidationError
from .server import ProtocolServer
from .types import validate_plan


class AgentPool:
    """agents: agent_id -> object with .plan(obs), or the string "remote"
    (those ids must be connected on `server`)."""

    def __init__(self, agents: dict, server: ProtocolServer = None):
        self.local = {aid: a for aid, a in agents.items() if a != "remote"}
        self.remote_ids = [aid for aid, a in agents.items() if a == "remote"]
        self.server = server
        if self.remote_ids and server is None:
            raise ValueError("remote agents need a protocol server")

    def plan_all(self, observations: dict, step: int, dt: float) -> dict:
        """All observations go out before any plan is read back."""
        if self.remote_ids:
            self.server.send_observations(
                {aid: observations[aid] for aid in self.remote_ids})
        plans = {}
        for aid, agent in self.local.items():
            plans[aid] = agent.plan(observations[aid])
        if self.remote_ids:
            plans.update(self.server.receive_plans(self.remote_ids, step))
        for aid, plan in plans.items():
            try:
                validate_plan(plan, observations[aid].ego.t, dt)
            except ValidationError as e:
                # a bad plan is an agent failure, not a config problem
                raise AgentProtocolError(
                    f"agent {aid!r} at step {step}: {e}") from e
        return plans

    def close(self):
        if self.server is not None:
            self.server.close()
