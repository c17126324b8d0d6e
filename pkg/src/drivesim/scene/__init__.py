"""Scenario composition: background + participants + ego into a simulatable world."""

from .behaviors import (BEHAVIOR_KINDS, BehaviorSpec, scripted_behavior,
                        scripted_state, update_trigger)
from .compose import PosedParticipant, WorldSnapshot, compose
from .config import load_scenario, save_scenario, serialize_scenario
from .trajectory import (Trajectory, load_trajectory_csv, sample_pose,
                         save_trajectory_csv, straight_trajectory)
from .types import BackgroundScene, Participant, Scenario, SimParams

__all__ = [
    "Trajectory", "sample_pose", "load_trajectory_csv", "save_trajectory_csv",
    "straight_trajectory",
    "BehaviorSpec", "BEHAVIOR_KINDS", "scripted_behavior", "scripted_state",
    "update_trigger",
    "BackgroundScene", "Participant", "Scenario", "SimParams",
    "compose", "WorldSnapshot", "PosedParticipant",
    "load_scenario", "save_scenario", "serialize_scenario",
]
