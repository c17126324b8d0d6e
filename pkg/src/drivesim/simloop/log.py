"""Deterministic run logs: line-delimited JSON records.

The header embeds everything scoring needs (drivable area, centerline,
footprints, per-agent references), so logs are self-contained and
re-scorable without the scenario assets. No wall-clock data is recorded;
identical runs serialize to identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ParseError

LOG_VERSION = 1


def _traj_rows(traj):
    if traj is None:
        return None
    return [[float(traj.t[i]), float(traj.x[i]), float(traj.y[i]),
             float(traj.heading[i]), float(traj.v[i])] for i in range(len(traj))]


def make_header(scenario) -> dict:
    from ..scene import Scenario  # local import to keep log loadable standalone
    assert isinstance(scenario, Scenario)
    agents = {}
    for p in scenario.agent_participants():
        route = scenario.route_for(p)
        reference = scenario.reference_for(p)
        agents[p.agent_id] = {
            "pid": p.pid,
            "command": p.command,
            "route": [[float(x), float(y)] for x, y in route.points]
            if route is not None else None,
            "reference": _traj_rows(reference),
            "initial": [float(v) for v in p.initial],
        }
    footprints = {}
    for p in [scenario.ego] + list(scenario.participants):
        footprints[p.pid] = [float(p.footprint.half_extents[0]),
                             float(p.footprint.half_extents[1])]
    sc = scenario.scoring
    return {
        "kind": "header",
        "version": LOG_VERSION,
        "scenario": scenario.name,
        "mode": scenario.mode,
        "seed": scenario.sim.seed,
        "dt": scenario.sim.dt,
        "n_steps": scenario.sim.n_steps,
        "drivable": [[[float(x), float(y)] for x, y in poly.vertices]
                     for poly in scenario.background.drivable_area],
        "footprints": footprints,
        "agents": agents,
        "scoring": {
            "weights": [sc.weight_ep, sc.weight_ttc, sc.weight_comfort],
            "ttc_threshold": sc.ttc_threshold,
            "ttc_horizon": sc.ttc_horizon,
            "a_lon_min": sc.a_lon_min,
            "a_lon_max": sc.a_lon_max,
            "a_lat_max": sc.a_lat_max,
            "jerk_max": sc.jerk_max,
            "yaw_rate_max": sc.yaw_rate_max,
            "yaw_acc_max": sc.yaw_acc_max,
            "at_fault_only": sc.at_fault_only,
            "ep_min_reference": sc.ep_min_reference,
        },
    }


@dataclass
class SimLog:
    header: dict
    steps: list = field(default_factory=list)
    end: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return self.header["dt"]

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    def agent_ids(self):
        return sorted(self.header["agents"])

    def agent_states(self, agent_id: str):
        """Per-step (t, x, y, heading, v) rows for one agent."""
        rows = []
        for step in self.steps:
            a = step["agents"][agent_id]
            rows.append((step["t"], a["x"], a["y"], a["heading"], a["v"]))
        return rows

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.header, sort_keys=True, separators=(",", ":"))]
        for step in self.steps:
            lines.append(json.dumps(step, sort_keys=True, separators=(",", ":")))
        if self.end:
            lines.append(json.dumps(self.end, sort_keys=True, separators=(",", ":")))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @staticmethod
    def from_jsonl(text: str, path=None) -> "SimLog":
        header, steps, end = None, [], {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"bad log record: {e}", path=path, line=lineno) from e
            kind = rec.get("kind")
            if kind == "header":
                header = rec
            elif kind == "step":
                steps.append(rec)
            elif kind == "end":
                end = rec
            else:
                raise ParseError(f"unknown record kind {kind!r}", path=path,
                                 line=lineno)
        if header is None:
            raise ParseError("log has no header record", path=path)
        return SimLog(header, steps, end)

    @staticmethod
    def load(path) -> "SimLog":
        return SimLog.from_jsonl(Path(path).read_text(encoding="utf-8"), path=path)
