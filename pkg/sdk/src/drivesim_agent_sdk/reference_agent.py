"""Reference constant-velocity agent: extrapolates the current pose.

Runnable:  drivesim-reference-agent --endpoint 127.0.0.1:7707 --agent-id ego
"""

from __future__ import annotations

import argparse
import math

from .client import connect, next_observation, send_plan
from .wire import Observation, Plan

PLAN_STEPS = 20
PLAN_DT = 0.1


def plan_constant_velocity(obs: Observation, horizon_steps: int = PLAN_STEPS,
                           dt: float = PLAN_DT) -> Plan:
    e = obs.ego
    c, s = math.cos(e.heading), math.sin(e.heading)
    waypoints = []
    for k in range(1, horizon_steps + 1):
        waypoints.append((e.t + k * dt,
                          e.x + e.v * c * k * dt,
                          e.y + e.v * s * k * dt,
                          e.heading, e.v))
    return Plan(waypoints)


def run(endpoint: str, agent_id: str, timeout: float = 30.0,
        horizon_steps: int = PLAN_STEPS, dt: float = PLAN_DT) -> int:
    session = connect(endpoint, agent_id, timeout=timeout)
    steps = 0
    try:
        while True:
            obs = next_observation(session)
            if obs is None:
                break
            send_plan(session, plan_constant_velocity(obs, horizon_steps, dt))
            steps += 1
    finally:
        session.close()
    return steps


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--endpoint", default="127.0.0.1:7707")
    parser.add_argument("--agent-id", default="ego")
    parser.add_argument("--timeout", type=float, default=30.0)
    parser.add_argument("--dt", type=float, default=PLAN_DT)
    args = parser.parse_args(argv)
    steps = run(args.endpoint, args.agent_id, timeout=args.timeout, dt=args.dt)
    print(f"{args.agent_id}: planned {steps} steps")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
