"""Template for wiring your own planner to the harness.

Copy this file, fill in `my_planner`, and run it while the harness waits on
the same endpoint (`drivesim run ... --agent ego=remote --agent-endpoint ...`).
"""

from __future__ import annotations

from .client import connect, next_observation, send_plan
from .wire import Observation, Plan


def my_planner(obs: Observation) -> Plan:
    """Return >= 2 waypoints (t, x, y, heading, v) starting after obs.ego.t.

    Available inputs:
      obs.ego                      -- t, x, y, heading, v, a, command
      obs.bev_count(ix, iy, high)  -- BEV occupancy counts
      obs.cameras / obs.lidar_points when the scenario enables them
    """
    e = obs.ego
    dt = 0.1
    return Plan([(e.t + k * dt, e.x, e.y, e.heading, 0.0)
                 for k in range(1, 21)])   # TODO(you): plan something real


def main(endpoint: str = "127.0.0.1:7707", agent_id: str = "ego"):
    session = connect(endpoint, agent_id)
    try:
        while (obs := next_observation(session)) is not None:
            send_plan(session, my_planner(obs))
    finally:
        session.close()


if __name__ == "__main__":
    main()
