"""Reference in-process agents: constant velocity, replay, and a braking rule."""

from __future__ import annotations

import math

import numpy as np

from ..geom import Polyline
from ..scene import Trajectory
from .types import Observation

PLAN_STEPS = 20
PLAN_DT = 0.1


class ConstantVelocityAgent:
    """Extrapolates the current pose along the current heading at current speed."""

    def __init__(self, horizon_steps: int = PLAN_STEPS, dt: float = PLAN_DT):
        self.horizon_steps = max(horizon_steps, 2)
        self.dt = dt

    def plan(self, obs: Observation) -> Trajectory:
        e = obs.ego
        k = np.arange(1, self.horizon_steps + 1)
        t = e.t + k * self.dt
        c, s = math.cos(e.heading), math.sin(e.heading)
        return Trajectory(t, e.x + e.v * c * k * self.dt,
                          e.y + e.v * s * k * self.dt,
                          np.full(len(k), e.heading), np.full(len(k), e.v))


class ReplayAgent:
    """Echoes the recorded trajectory segment starting at the observation time."""

    def __init__(self, recorded: Trajectory, horizon_steps: int = PLAN_STEPS,
                 dt: float = PLAN_DT):
        self.recorded = recorded
        self.horizon_steps = max(horizon_steps, 2)
        self.dt = dt

    def plan(self, obs: Observation) -> Trajectory:
        t0 = obs.ego.t
        ts, xs, ys, hs, vs = [], [], [], [], []
        for k in range(1, self.horizon_steps + 1):
            t = t0 + k * self.dt
            x, y, h, v = self.recorded.sample(t)
            ts.append(t)
            xs.append(x)
            ys.append(y)
            hs.append(h)
            vs.append(v)
        return Trajectory(ts, xs, ys, hs, vs)


class RuleAgent:
    """Follows the route centerline at cruise speed; brakes when the BEV shows
    occupancy inside a corridor of length v^2/(2 a_brake) + margin ahead."""

    def __init__(self, route: Polyline, cruise_speed: float = 8.0,
                 a_brake: float = 3.0, a_cruise: float = 1.5,
                 margin: float = 7.0, corridor_halfwidth: float = 1.6,
                 horizon_steps: int = PLAN_STEPS, dt: float = PLAN_DT):
        self.route = route
        self.cruise_speed = cruise_speed
        self.a_brake = a_brake
        self.a_cruise = a_cruise
        self.margin = margin
        self.corridor_halfwidth = corridor_halfwidth
        self.horizon_steps = max(horizon_steps, 2)
        self.dt = dt

    def _corridor_blocked(self, obs: Observation, length: float) -> bool:
        if obs.bev is None:
            return False
        cells = obs.bev.shape[0]
        cell = 2.0 * obs.bev_extent / cells
        occupied = obs.bev[:, :, 1] >= 1.0
        if not occupied.any():
            return False
        ix, iy = np.nonzero(occupied)
        x_c = (ix + 0.5) * cell - obs.bev_extent   # forward in the ego frame
        y_c = (iy + 0.5) * cell - obs.bev_extent
        ahead = (x_c > 0.0) & (x_c <= length) & (np.abs(y_c) <= self.corridor_halfwidth)
        return bool(ahead.any())

    def plan(self, obs: Observation) -> Trajectory:
        e = obs.ego
        corridor = e.v * e.v / (2.0 * self.a_brake) + self.margin
        braking = self._corridor_blocked(obs, corridor)

        s0 = self.route.project((e.x, e.y))
        ts, xs, ys, hs, vs = [], [], [], [], []
        v = e.v
        s = s0
        for k in range(1, self.horizon_steps + 1):
            if braking:
                v = max(v - self.a_brake * self.dt, 0.0)
            else:
                v = min(v + self.a_cruise * self.dt, self.cruise_speed)
            s = s + v * self.dt
            p = self.route.point_at(s)
            ts.append(e.t + k * self.dt)
            xs.append(p[0])
            ys.append(p[1])
            hs.append(self.route.heading_at(s))
            vs.append(v)
        return Trajectory(ts, xs, ys, hs, vs)
