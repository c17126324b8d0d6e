"""Closed-loop simulation engine and its deterministic run log."""

from .log import SimLog, make_header
from .loop import FrameDumper, build_observation, detect_events, open_loop_log, run

__all__ = ["SimLog", "make_header", "run", "open_loop_log",
           "build_observation", "detect_events", "FrameDumper"]
