"""Plan tracking: decoupled lateral/longitudinal LQR over a kinematic bicycle."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import EmptyPlan, ValidationError
from ..geom import wrap_angle
from .riccati import lateral_model, longitudinal_model, lqr_gains

V_EPS = 0.5        # m/s floor for the lateral channel linearization
_KAPPA_V_MIN = 0.1  # below this speed the curvature feedforward is off


@dataclass(frozen=True)
class EgoState:
    t: float
    x: float
    y: float
    heading: float
    v: float
    a: float = 0.0
    steering: float = 0.0

    def __post_init__(self):
        vals = (self.t, self.x, self.y, self.heading, self.v, self.a, self.steering)
        if not all(math.isfinite(val) for val in vals):
            raise ValidationError("ego state has non-finite values")


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 2.7
    steer_max: float = 0.6
    a_min: float = -4.5
    a_max: float = 3.0
    steer_rate_max: float = 1.2    # rad/s

    def __post_init__(self):
        if self.wheelbase <= 0:
            raise ValidationError("wheelbase must be positive")
        if not self.a_min < 0 < self.a_max:
            raise ValidationError("need a_min < 0 < a_max")


@dataclass(frozen=True)
class ControllerWeights:
    q_lat_y: float = 1.0
    q_lat_heading: float = 0.5
    r_lat: float = 2.0
    q_lon_s: float = 1.0
    q_lon_v: float = 1.0
    r_lon: float = 1.0

    @staticmethod
    def from_overrides(overrides: dict) -> "ControllerWeights":
        base = ControllerWeights()
        fields = {k: overrides[k] for k in
                  ("q_lat_y", "q_lat_heading", "r_lat", "q_lon_s", "q_lon_v", "r_lon")
                  if k in overrides}
        return replace(base, **fields)


@dataclass(frozen=True)
class Controls:
    a: float
    steering: float


_GAIN_CACHE = {}


def _gains_for(v: float, params: VehicleParams, weights: ControllerWeights,
               dt: float):
    """Gain scheduling: table keyed by speed rounded to 1 m/s, so gains only
    change when speed moves by about that much and track_step stays pure."""
    v_q = max(round(abs(v)), round(V_EPS + 0.5))
    key = (v_q, params.wheelbase, weights, dt)
    hit = _GAIN_CACHE.get(key)
    if hit is not None:
        return hit
    a_lat, b_lat = lateral_model(float(v_q), params.wheelbase, dt)
    k_lat = lqr_gains(a_lat, b_lat,
                      np.diag([weights.q_lat_y, weights.q_lat_heading]),
                      np.array([[weights.r_lat]]))[0]
    a_lon, b_lon = longitudinal_model(dt)
    k_lon = lqr_gains(a_lon, b_lon,
                      np.diag([weights.q_lon_s, weights.q_lon_v]),
                      np.array([[weights.r_lon]]))[0]
    _GAIN_CACHE[key] = (k_lat, k_lon)
    return k_lat, k_lon


def integrate_bicycle(state: EgoState, a: float, steering: float, dt: float,
                      wheelbase: float) -> EgoState:
    """Advance one step; constant-curvature arc with midpoint speed, which
    stays within 1e-3 m of RK4 at dt=0.1 for road speeds."""
    v_mid = max(state.v + 0.5 * a * dt, 0.0)
    omega = v_mid * math.tan(steering) / wheelbase
    h = state.heading
    if abs(omega * dt) < 1e-9:
        x = state.x + v_mid * dt * math.cos(h)
        y = state.y + v_mid * dt * math.sin(h)
        h_new = wrap_angle(h + omega * dt)
    else:
        h_new = h + omega * dt
        radius = v_mid / omega
        x = state.x + radius * (math.sin(h_new) - math.sin(h))
        y = state.y + radius * (-math.cos(h_new) + math.cos(h))
        h_new = wrap_angle(h_new)
    return EgoState(t=state.t + dt, x=x, y=y, heading=h_new,
                    v=max(state.v + a * dt, 0.0), a=a, steering=steering)


def track_step(state: EgoState, plan, params: VehicleParams, dt: float,
               lookahead: float = 0.5,
               weights: ControllerWeights = ControllerWeights()):
    """One control cycle: LQR against the plan, then integrate the bicycle.

    Returns (Controls, next EgoState). Pure in its arguments.
    """
    if plan is None or len(plan) == 0:
        raise EmptyPlan("track_step needs a non-empty plan")

    xr, yr, hr, vr = plan.sample(state.t + lookahead)
    x2, y2, h2, v2 = plan.sample(state.t + lookahead + dt)

    # feedforward from the plan's local curvature and acceleration
    if vr > _KAPPA_V_MIN:
        kappa = wrap_angle(h2 - hr) / (vr * dt)
        a_ff = (v2 - vr) / dt
    else:
        kappa = 0.0
        a_ff = 0.0

    ch, sh = math.cos(hr), math.sin(hr)
    dx = state.x - xr
    dy = state.y - yr
    along = ch * dx + sh * dy
    cross = -sh * dx + ch * dy
    e_s = along + vr * lookahead      # zero when exactly on a constant-speed plan
    e_v = state.v - vr
    e_h = wrap_angle(state.heading - hr)

    k_lat, k_lon = _gains_for(state.v, params, weights, dt)
    a_cmd = a_ff - (k_lon[0] * e_s + k_lon[1] * e_v)
    a_cmd = min(max(a_cmd, params.a_min), params.a_max)

    steer_ff = math.atan(kappa * params.wheelbase)
    steer_cmd = steer_ff - (k_lat[0] * cross + k_lat[1] * e_h)
    steer_cmd = min(max(steer_cmd, -params.steer_max), params.steer_max)
    max_delta = params.steer_rate_max * dt
    steer_cmd = min(max(steer_cmd, state.steering - max_delta),
                    state.steering + max_delta)

    controls = Controls(a=a_cmd, steering=steer_cmd)
    return controls, integrate_bicycle(state, a_cmd, steer_cmd, dt,
                                       params.wheelbase)
