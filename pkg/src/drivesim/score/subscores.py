"""The five closed-loop subscores, each a pure function of (log, config)."""

from __future__ import annotations

import math

import numpy as np

from ..geom import (OrientedBox2D, Polygon2D, Polyline, boxes_overlap,
                    footprint_in_union, wrap_angle)
from ..scene.trajectory import Trajectory
from .config import ScoreConfig

_STOPPED = 0.05  # m/s; below this the ego counts as stationary for at-fault


def _footprint(log, pid: str, x, y, heading) -> OrientedBox2D:
    hl, hw = log.header["footprints"][pid]
    return OrientedBox2D((x, y), heading, (hl, hw))


def _others_at(log, step: dict, agent_id: str):
    """(pid, x, y, heading, v) of every participant except the scored agent."""
    out = []
    me = log.header["agents"][agent_id]["pid"]
    for rec in step["participants"]:
        out.append((rec["id"], rec["x"], rec["y"], rec["heading"], rec["v"]))
    for aid, rec in step["agents"].items():
        pid = log.header["agents"][aid]["pid"]
        if pid != me:
            out.append((pid, rec["x"], rec["y"], rec["heading"], rec["v"]))
    return out


def nc_score(log, agent_id: str = None, cfg: ScoreConfig = None) -> float:
    """1 unless the agent footprint ever overlaps another participant's."""
    agent_id = agent_id or log.agent_ids()[0]
    at_fault_only = bool(cfg.at_fault_only) if cfg is not None else \
        bool(log.header["scoring"].get("at_fault_only", False))
    me = log.header["agents"][agent_id]["pid"]
    for step in log.steps:
        a = step["agents"][agent_id]
        ego_box = _footprint(log, me, a["x"], a["y"], a["heading"])
        for pid, x, y, h, v in _others_at(log, step, agent_id):
            if boxes_overlap(ego_box, _footprint(log, pid, x, y, h)):
                if at_fault_only and a["v"] < _STOPPED and v > _STOPPED:
                    continue   # rear-ended while stopped: not at fault
                return 0.0
    return 1.0


def dac_score(log, agent_id: str = None) -> float:
    """1 iff the footprint stays within the drivable-area union at every step."""
    agent_id = agent_id or log.agent_ids()[0]
    polys = [Polygon2D(p) for p in log.header["drivable"]]
    if not polys:
        return 1.0
    me = log.header["agents"][agent_id]["pid"]
    for step in log.steps:
        a = step["agents"][agent_id]
        box = _footprint(log, me, a["x"], a["y"], a["heading"])
        if not footprint_in_union(box, polys):
            return 0.0
    return 1.0


def min_ttc(log, agent_id: str = None, cfg: ScoreConfig = None) -> float:
    """Minimum time to footprint overlap under constant-velocity projection."""
    agent_id = agent_id or log.agent_ids()[0]
    cfg = cfg or ScoreConfig()
    dt = log.dt
    n_sub = int(round(cfg.ttc_horizon / dt))
    me = log.header["agents"][agent_id]["pid"]
    best = math.inf
    for step in log.steps:
        a = step["agents"][agent_id]
        others = _others_at(log, step, agent_id)
        if not others:
            continue
        evx = a["v"] * math.cos(a["heading"])
        evy = a["v"] * math.sin(a["heading"])
        for j in range(n_sub + 1):
            tau = j * dt
            if tau >= best:
                break
            ego_box = _footprint(log, me, a["x"] + evx * tau,
                                 a["y"] + evy * tau, a["heading"])
            hit = False
            for pid, x, y, h, v in others:
                ox = x + v * math.cos(h) * tau
                oy = y + v * math.sin(h) * tau
                if boxes_overlap(ego_box, _footprint(log, pid, ox, oy, h)):
                    hit = True
                    break
            if hit:
                best = min(best, tau)
                break
    return best


def ttc_score(log, agent_id: str = None, cfg: ScoreConfig = None) -> float:
    cfg = cfg or _cfg_from_log(log)
    return 1.0 if min_ttc(log, agent_id, cfg) >= cfg.ttc_threshold else 0.0


def comfort_score(log, agent_id: str = None,
                  cfg: ScoreConfig = None) -> float:
    """Finite-difference kinematics of the executed pose sequence vs. bounds."""
    agent_id = agent_id or log.agent_ids()[0]
    cfg = cfg or _cfg_from_log(log)
    rows = log.agent_states(agent_id)
    if len(rows) < 2:
        return 1.0
    t = np.array([r[0] for r in rows])
    h = np.array([r[3] for r in rows])
    v = np.array([r[4] for r in rows])
    dt = np.diff(t)
    a_lon = np.diff(v) / dt
    yaw_rate = np.array([wrap_angle(d) for d in np.diff(h)]) / dt
    a_lat = v[:-1] * yaw_rate
    if (a_lon < cfg.a_lon_min - 1e-12).any() or (a_lon > cfg.a_lon_max + 1e-12).any():
        return 0.0
    if (np.abs(a_lat) > cfg.a_lat_max + 1e-12).any():
        return 0.0
    if (np.abs(yaw_rate) > cfg.yaw_rate_max + 1e-12).any():
        return 0.0
    if len(a_lon) >= 2:
        jerk = np.diff(a_lon) / dt[1:]
        if (np.abs(jerk) > cfg.jerk_max + 1e-12).any():
            return 0.0
    if len(yaw_rate) >= 2:
        yaw_acc = np.diff(yaw_rate) / dt[1:]
        if (np.abs(yaw_acc) > cfg.yaw_acc_max + 1e-12).any():
            return 0.0
    return 1.0


def ep_score(log, agent_id: str = None, cfg: ScoreConfig = None) -> float:
    """Centerline progress of the agent relative to the recorded reference."""
    agent_id = agent_id or log.agent_ids()[0]
    cfg = cfg or _cfg_from_log(log)
    info = log.header["agents"][agent_id]
    if info.get("route") is None or info.get("reference") is None:
        return 1.0
    route = Polyline(info["route"])
    ref_rows = np.array(info["reference"])
    reference = Trajectory(ref_rows[:, 0], ref_rows[:, 1], ref_rows[:, 2],
                           ref_rows[:, 3], ref_rows[:, 4])
    rows = log.agent_states(agent_id)
    t0, t1 = rows[0][0], rows[-1][0]
    rx0, ry0, _, _ = reference.sample(t0)
    rx1, ry1, _, _ = reference.sample(t1)
    ref_progress = max(route.project((rx1, ry1)) - route.project((rx0, ry0)), 0.0)
    if ref_progress < cfg.ep_min_reference:
        return 1.0
    ego_progress = max(route.project((rows[-1][1], rows[-1][2]))
                       - route.project((rows[0][1], rows[0][2])), 0.0)
    return min(max(ego_progress / ref_progress, 0.0), 1.0)


def _cfg_from_log(log) -> ScoreConfig:
    s = log.header["scoring"]
    return ScoreConfig(
        weight_ep=s["weights"][0], weight_ttc=s["weights"][1],
        weight_comfort=s["weights"][2],
        ttc_threshold=s["ttc_threshold"], ttc_horizon=s["ttc_horizon"],
        a_lon_min=s["a_lon_min"], a_lon_max=s["a_lon_max"],
        a_lat_max=s["a_lat_max"], jerk_max=s["jerk_max"],
        yaw_rate_max=s["yaw_rate_max"], yaw_acc_max=s["yaw_acc_max"],
        at_fault_only=s.get("at_fault_only", False),
        ep_min_reference=s.get("ep_min_reference", 0.5),
    )


def config_from_log(log) -> ScoreConfig:
    return _cfg_from_log(log)
