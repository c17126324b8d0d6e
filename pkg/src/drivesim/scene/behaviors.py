"""Scripted hazard behaviors: stationary, sudden brake, intersection cross, cut-in.

Behaviors are pure functions of (params, t, trigger time); the sim loop owns
trigger resolution (distance-to-ego with a time fallback) and passes the
fired trigger time in explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import UnknownBehavior
from ..geom import Pose

BEHAVIOR_KINDS = ("stationary", "sudden_brake", "intersection_cross", "cut_in")


@dataclass
class BehaviorSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in BEHAVIOR_KINDS:
            raise UnknownBehavior(f"unknown scripted behavior {self.kind!r}")

    @property
    def trigger_distance(self):
        return self.params.get("trigger_distance")

    @property
    def trigger_time(self):
        return self.params.get("trigger_time")

    @property
    def waits_for_trigger(self) -> bool:
        """Whether motion is gated on the trigger at all."""
        if self.kind == "stationary":
            return False
        return self.trigger_distance is not None or self.trigger_time is not None


def _advance(initial, distance: float):
    x0, y0, h0, _ = initial
    return x0 + distance * math.cos(h0), y0 + distance * math.sin(h0)


def scripted_state(spec: BehaviorSpec, t: float, initial, trigger_t):
    """(x, y, heading, v) of a scripted participant at time t.

    `initial` is the (x, y, heading, v) config tuple; `trigger_t` is the
    resolved trigger firing time or None if it has not fired by t.
    """
    kind, p = spec.kind, spec.params
    x0, y0, h0, v0 = initial
    if kind == "stationary":
        return x0, y0, h0, 0.0

    if kind == "sudden_brake":
        speed = p.get("speed", v0)
        a = p.get("a_brake", 4.0)
        if trigger_t is None or t <= trigger_t:
            x, y = _advance(initial, speed * t)
            return x, y, h0, speed
        tau = t - trigger_t
        tau_stop = speed / a if a > 0 else math.inf
        tau_c = min(tau, tau_stop)
        dist = speed * trigger_t + speed * tau_c - 0.5 * a * tau_c * tau_c
        v = max(0.0, speed - a * tau)
        x, y = _advance(initial, dist)
        return x, y, h0, v

    if kind == "intersection_cross":
        speed = p.get("speed", v0)
        if spec.waits_for_trigger:
            if trigger_t is None or t <= trigger_t:
                return x0, y0, h0, 0.0
            dist = speed * (t - trigger_t)
        else:
            dist = speed * t
        x, y = _advance(initial, dist)
        return x, y, h0, speed

    if kind == "cut_in":
        speed = p.get("speed", v0)
        lane_width = p.get("lane_width", 3.5)
        duration = p.get("cut_duration", 2.0)
        direction = p.get("direction", 1.0)   # +1 cuts left, -1 right
        x, y = _advance(initial, speed * t)
        if trigger_t is not None and t > trigger_t:
            frac = min((t - trigger_t) / duration, 1.0) if duration > 0 else 1.0
            offset = direction * lane_width * frac
            x += offset * -math.sin(h0)
            y += offset * math.cos(h0)
        return x, y, h0, speed

    raise UnknownBehavior(f"unknown scripted behavior {kind!r}")


def scripted_behavior(kind: str, params: dict, t: float, ego_state,
                      initial, trigger_t=None, z: float = 0.0):
    """Spec-facing wrapper returning (Pose, speed)."""
    spec = BehaviorSpec(kind, dict(params))
    x, y, h, v = scripted_state(spec, t, initial, trigger_t)
    return Pose.from_xyyaw(x, y, h, z=z), v


def update_trigger(spec: BehaviorSpec, t: float, participant_xy, agent_positions,
                   current: float):
    """Resolve the trigger: distance to the nearest agent, else the time fallback."""
    if current is not None:
        return current
    d = spec.trigger_distance
    if d is not None and agent_positions:
        px, py = participant_xy
        for ax, ay in agent_positions:
            if math.hypot(ax - px, ay - py) <= d:
                return t
    tt = spec.trigger_time
    if tt is not None and t >= tt:
        return tt
    return None
