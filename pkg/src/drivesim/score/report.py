"""PDMS assembly, suite aggregation, report tables, and the sim-to-real gap."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from ..errors import NonPositiveInput
from .config import ScoreConfig
from .subscores import (comfort_score, config_from_log, dac_score, ep_score,
                        nc_score, ttc_score)

COLUMNS = ("NC", "DAC", "TTC", "Comf.", "EP", "PDMS")


def pdms(nc: float, dac: float, ttc: float, comfort: float, ep: float,
         cfg: ScoreConfig = None) -> float:
    """Penalties times the weighted reward average, computed exactly."""
    cfg = cfg or ScoreConfig()
    w_ep, w_ttc, w_c = cfg.weights
    rewards = (w_ep * ep + w_ttc * ttc + w_c * comfort) / (w_ep + w_ttc + w_c)
    return (nc * dac) * rewards


def gap(pdms_real: float, pdms_sim: float) -> float:
    """Relative PDMS difference; defined only for positive scores."""
    if pdms_real <= 0.0 or pdms_sim <= 0.0:
        raise NonPositiveInput("gap is defined only for PDMS > 0")
    return abs(pdms_real - pdms_sim) / max(pdms_real, pdms_sim)


@dataclass
class AgentScores:
    nc: float
    dac: float
    ttc: float
    comfort: float
    ep: float
    pdms: float

    def row(self):
        return (self.nc, self.dac, self.ttc, self.comfort, self.ep, self.pdms)


@dataclass
class ScoreReport:
    scenario: str
    per_agent: dict = field(default_factory=dict)   # agent_id -> AgentScores

    @property
    def nc(self):
        return _mean([s.nc for s in self.per_agent.values()])

    @property
    def dac(self):
        return _mean([s.dac for s in self.per_agent.values()])

    @property
    def ttc(self):
        return _mean([s.ttc for s in self.per_agent.values()])

    @property
    def comfort(self):
        return _mean([s.comfort for s in self.per_agent.values()])

    @property
    def ep(self):
        return _mean([s.ep for s in self.per_agent.values()])

    @property
    def pdms(self):
        return _mean([s.pdms for s in self.per_agent.values()])

    def row(self):
        return (self.nc, self.dac, self.ttc, self.comfort, self.ep, self.pdms)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "per_agent": {aid: asdict(s) for aid, s in sorted(self.per_agent.items())},
            "mean": dict(zip(("nc", "dac", "ttc", "comfort", "ep", "pdms"),
                             self.row())),
        }


def _mean(vals):
    return sum(vals) / len(vals) if vals else 0.0


def score_log(log, cfg: ScoreConfig = None) -> ScoreReport:
    """Score every agent in the log; multi-agent scenarios average later."""
    cfg = cfg or config_from_log(log)
    report = ScoreReport(scenario=log.header.get("scenario", "?"))
    for aid in log.agent_ids():
        nc = nc_score(log, aid, cfg)
        dac = dac_score(log, aid)
        ttc = ttc_score(log, aid, cfg)
        comfort = comfort_score(log, aid, cfg)
        ep = ep_score(log, aid, cfg)
        report.per_agent[aid] = AgentScores(
            nc=nc, dac=dac, ttc=ttc, comfort=comfort, ep=ep,
            pdms=pdms(nc, dac, ttc, comfort, ep, cfg))
    return report


def aggregate(reports) -> dict:
    """Suite summary: per-scenario rows (agents averaged first) and the mean,
    as percentages with one decimal."""
    rows = {}
    for rep in reports:
        rows[rep.scenario] = [round(100.0 * v, 1) for v in rep.row()]
    if reports:
        mean_row = [_mean([rep.row()[i] for rep in reports]) for i in range(6)]
        rows["mean"] = [round(100.0 * v, 1) for v in mean_row]
    return rows


def format_table(reports) -> str:
    rows = aggregate(reports)
    name_w = max([len(n) for n in rows] + [len("scenario")]) + 2
    head = "scenario".ljust(name_w) + "".join(c.rjust(8) for c in COLUMNS)
    lines = [head, "-" * len(head)]
    for name, vals in rows.items():
        if name == "mean":
            continue
        lines.append(name.ljust(name_w) + "".join(f"{v:8.1f}" for v in vals))
    if "mean" in rows:
        lines.append("-" * len(head))
        lines.append("mean".ljust(name_w)
                     + "".join(f"{v:8.1f}" for v in rows["mean"]))
    return "\n".join(lines)


def reports_to_json(reports) -> str:
    payload = {
        "scenarios": [rep.to_dict() for rep in reports],
        "suite_mean_percent": aggregate(reports).get("mean"),
    }
    return json.dumps(payload, sort_keys=True, indent=2)
