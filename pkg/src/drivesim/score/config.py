"""Scoring weights, thresholds, and kinematic comfort bounds.

Defaults follow the Navsim/nuPlan conventions and are config-overridable;
they are not asserted as ground truth anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError


@dataclass
class ScoreConfig:
    weight_ep: float = 5.0
    weight_ttc: float = 5.0
    weight_comfort: float = 2.0
    ttc_threshold: float = 1.0        # s
    ttc_horizon: float = 3.0          # s, constant-velocity projection window
    a_lon_min: float = -4.05          # m/s^2
    a_lon_max: float = 2.40
    a_lat_max: float = 4.89
    jerk_max: float = 8.37            # m/s^3
    yaw_rate_max: float = 0.95        # rad/s
    yaw_acc_max: float = 1.93         # rad/s^2
    at_fault_only: bool = False       # excuse being rear-ended while stopped
    ep_min_reference: float = 0.5     # m of reference progress below which EP=1

    def __post_init__(self):
        if self.weight_ep < 0 or self.weight_ttc < 0 or self.weight_comfort < 0:
            raise ValidationError("score weights must be non-negative")
        if self.weight_ep + self.weight_ttc + self.weight_comfort <= 0:
            raise ValidationError("score weights must not all be zero")
        if self.ttc_threshold <= 0 or self.ttc_horizon <= 0:
            raise ValidationError("TTC thresholds must be positive")

    @property
    def weights(self):
        return (self.weight_ep, self.weight_ttc, self.weight_comfort)
