"""Trajectory tracking: Riccati/LQR gains over a kinematic bicycle model."""

from .riccati import (lateral_model, longitudinal_model, lqr_gains, solve_dare)
from .tracker import (Controls, ControllerWeights, EgoState, V_EPS,
                      VehicleParams, integrate_bicycle, track_step)

__all__ = [
    "solve_dare", "lqr_gains", "lateral_model", "longitudinal_model",
    "EgoState", "VehicleParams", "ControllerWeights", "Controls",
    "track_step", "integrate_bicycle", "V_EPS",
]
