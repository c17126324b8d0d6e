"""World composition: place every participant at a simulation time."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import MissingAgentState
from ..geom import OrientedBox2D, Pose
from .behaviors import scripted_state
from .trajectory import sample_pose
from .types import Scenario


@dataclass
class PosedParticipant:
    pid: str
    mesh: object
    pose: Pose
    footprint: OrientedBox2D
    v: float
    is_agent: bool = False
    agent_id: str = None


@dataclass
class WorldSnapshot:
    t: float
    items: list       # list[PosedParticipant], ego first

    def by_id(self, pid: str) -> PosedParticipant:
        for item in self.items:
            if item.pid == pid:
                return item
        raise KeyError(pid)

    def agents(self):
        return [i for i in self.items if i.is_agent]


def compose(scenario: Scenario, t: float, agent_states: dict,
            trigger_times: dict = None) -> WorldSnapshot:
    """Pure function of (scenario, t, agent_states, trigger_times).

    agent_states: agent_id -> object with x, y, heading, v attributes.
    trigger_times: participant id -> fired trigger time (scripted behaviors).
    """
    trigger_times = trigger_times or {}
    ground_z = scenario.background.ground_z
    items = []
    for p in [scenario.ego] + list(scenario.participants):
        if p.mode == "agent":
            state = agent_states.get(p.agent_id)
            if state is None:
                raise MissingAgentState(f"no state supplied for agent {p.agent_id!r}")
            pose = Pose.from_xyyaw(state.x, state.y, state.heading, z=ground_z)
            v = state.v
        elif p.mode == "replay":
            pose, v = sample_pose(p.trajectory, t, z=ground_z)
        else:  # scripted
            x, y, h, v = scripted_state(p.behavior, t, p.initial,
                                        trigger_times.get(p.pid))
            pose = Pose.from_xyyaw(x, y, h, z=ground_z)
        footprint = p.footprint.at(pose.translation[0], pose.translation[1],
                                   pose.yaw)
        items.append(PosedParticipant(p.pid, p.mesh, pose, footprint, v,
                                      is_agent=p.mode == "agent",
                                      agent_id=p.agent_id))
    return WorldSnapshot(t, items)
