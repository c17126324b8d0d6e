"""The closed-loop engine: compose, render, plan in lockstep, track, advance."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..agents import AgentPool, Observation
from ..control import ControllerWeights, EgoState, VehicleParams, track_step
from ..errors import AgentProtocolError, AgentTimeout
from ..geom import Pose, boxes_overlap, footprint_in_union
from ..imageio import save_pfm, save_ppm
from ..relight import LightMaps, counter_hash, load_lightmaps
from ..scene import Scenario, compose, update_trigger
from ..scene.behaviors import scripted_state
from ..sensors import (EgoStatus, SceneView, SensorFrame, apply_exposure,
                       bev_histogram, range_image_to_points, render_camera,
                       render_lidar)
from .log import SimLog, make_header


def _vehicle_params(scenario: Scenario) -> VehicleParams:
    c = scenario.sim.controller
    kw = {}
    for key in ("wheelbase", "steer_max", "a_min", "a_max", "steer_rate_max"):
        if key in c:
            kw[key] = c[key]
    return VehicleParams(**kw)


def _derive_seed(base: int, *counters) -> int:
    return int(counter_hash(np.uint64(base & 0xFFFFFFFFFFFFFFFF), *counters))


def _lightmaps_for(scenario: Scenario) -> LightMaps:
    path = getattr(scenario.background, "lightmaps_path", None)
    if path == "fit":
        # deterministic fit from a synthetic sky-over-ground backdrop
        from ..relight import fit_lightmaps
        img = np.empty((16, 16, 3))
        img[:8] = np.asarray(scenario.rig.sky_color, dtype=np.float64)
        ground = scenario.background.meshes[0].albedo.mean(axis=0) \
            if scenario.background.meshes else np.full(3, 0.3)
        img[8:] = ground
        return fit_lightmaps([img])
    if path:
        base = Path(scenario.path).parent if scenario.path else Path(".")
        return load_lightmaps(base / path)
    return LightMaps.uniform(1.0)


class FrameDumper:
    def __init__(self, out_dir):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)

    def dump(self, step: int, agent_id: str, frame: SensorFrame):
        stem = f"step{step:04d}_{agent_id}"
        for name, (rgb, depth) in sorted(frame.cameras.items()):
            save_ppm(rgb, self.out / f"{stem}_{name}.ppm")
            save_pfm(depth, self.out / f"{stem}_{name}_depth.pfm")
        if frame.lidar is not None:
            save_pfm(frame.lidar.depth, self.out / f"{stem}_lidar_depth.pfm")
            save_pfm(frame.lidar.intensity, self.out / f"{stem}_lidar_intensity.pfm")


def build_observation(scenario: Scenario, snapshot, agent_item, state: EgoState,
                      command: str, bg_instances, step_seed: int):
    """Render one agent's SensorFrame (own mesh excluded) and its Observation."""
    rig = scenario.rig
    others = [(it.mesh, it.pose, i) for i, it in enumerate(snapshot.items)
              if it.pid != agent_item.pid]
    view = SceneView.build(bg_instances, others)
    ego_pose = agent_item.pose
    lightmaps = getattr(scenario, 'lightmaps', None) or LightMaps.uniform(1.0)

    cameras = {}
    for ci, cam in enumerate(rig.cameras):
        rgb, depth, _ = render_camera(
            view, cam, ego_pose, lightmaps,
            samples=rig.shade_samples, shadow_samples=rig.shadow_samples,
            shadows=rig.shadows, sky_color=rig.sky_color,
            fg_roughness=rig.fg_roughness, fg_metallic=rig.fg_metallic,
            seed=_derive_seed(step_seed, 1, ci), supersample=rig.supersample)
        if cam.name in rig.exposure:
            a, t = rig.exposure[cam.name]
            rgb = apply_exposure(rgb, a, t).astype(np.float32)
        cameras[cam.name] = (rgb, depth)

    ri = render_lidar(view, rig.lidar, ego_pose)
    if (ri.depth > 0).any():
        cloud = range_image_to_points(ri, rig.lidar, ego_pose)
        pts_world = cloud.points
        intensity = cloud.intensity
    else:
        pts_world = np.zeros((0, 3))
        intensity = np.zeros(0)
    pts_ego = ego_pose.inverse().apply(pts_world) if len(pts_world) else pts_world
    bev = bev_histogram(pts_ego, rig.bev, ground_z=0.0)

    status = EgoStatus(t=state.t, x=state.x, y=state.y, heading=state.heading,
                       v=state.v, a=state.a, command=command)
    frame = SensorFrame(ego_status=status, cameras=cameras, lidar=ri,
                        lidar_points=pts_world, lidar_intensity=intensity,
                        bev=bev)
    obs = Observation(
        ego=status,
        bev=bev.astype(np.float32),
        bev_extent=rig.bev.extent,
        bev_split_height=rig.bev.split_height,
        cameras={n: c[0] for n, c in cameras.items()} if rig.include_camera_in_obs
        else {},
        lidar_points=np.column_stack([pts_ego, intensity]).astype(np.float32)
        if rig.include_lidar_points_in_obs and len(pts_world) else None,
    )
    return obs, frame


def _blind_observation(scenario: Scenario, state: EgoState, command: str):
    """Status-only observation for runs with sensor rendering disabled."""
    status = EgoStatus(t=state.t, x=state.x, y=state.y, heading=state.heading,
                       v=state.v, a=state.a, command=command)
    cells = scenario.rig.bev.cells
    return Observation(ego=status,
                       bev=np.zeros((cells, cells, 2), dtype=np.float32),
                       bev_extent=scenario.rig.bev.extent,
                       bev_split_height=scenario.rig.bev.split_height)


def detect_events(snapshot, drivable) -> list:
    """Collision pairs involving agents, and agents leaving the drivable area."""
    events = []
    agents = snapshot.agents()
    for agent in agents:
        for other in snapshot.items:
            if other.pid == agent.pid:
                continue
            if other.is_agent and other.pid < agent.pid:
                continue  # agent-agent pair already reported once
            if boxes_overlap(agent.footprint, other.footprint):
                events.append({"type": "collision",
                               "ids": sorted([agent.pid, other.pid])})
        if drivable and not footprint_in_union(agent.footprint, drivable):
            events.append({"type": "offroad", "ids": [agent.pid]})
    return events


def _record_agent(state: EgoState, plan, controls, digest):
    rec = {
        "x": state.x, "y": state.y, "heading": state.heading,
        "v": state.v, "a": state.a, "steering": state.steering,
    }
    if plan is not None:
        rec["plan"] = [[float(plan.t[i]), float(plan.x[i]), float(plan.y[i]),
                        float(plan.heading[i]), float(plan.v[i])]
                       for i in range(len(plan))]
    if controls is not None:
        rec["controls"] = {"a": controls.a, "steering": controls.steering}
    if digest is not None:
        rec["digest"] = digest
    return rec


def run(scenario: Scenario, agents: dict, server=None, dump_dir=None,
        render_sensors: bool = True) -> SimLog:
    """Execute the closed-loop simulation and return its deterministic log.

    agents: agent_id -> planner object with .plan(obs), or "remote" (must be
    connected on `server`). Collisions and off-road events are logged, never
    terminal; the loop ends early only if an agent disconnects or times out.
    """
    scenario.lightmaps = _lightmaps_for(scenario)
    pool = AgentPool(agents, server)
    params = _vehicle_params(scenario)
    weights = ControllerWeights.from_overrides(scenario.sim.controller)
    dt = scenario.sim.dt
    lookahead = scenario.sim.lookahead
    dumper = FrameDumper(dump_dir) if dump_dir else None

    agent_parts = {p.agent_id: p for p in scenario.agent_participants()}
    order = sorted(agent_parts)
    states = {}
    for aid in order:
        x, y, h, v = agent_parts[aid].initial
        states[aid] = EgoState(t=0.0, x=x, y=y, heading=h, v=v)
    trigger_times = {p.pid: None for p in scenario.participants
                     if p.mode == "scripted"}
    bg_instances = [(mesh, Pose.identity(), -(i + 1))
                    for i, mesh in enumerate(scenario.background.meshes)]

    log = SimLog(make_header(scenario))
    termination = "completed"
    try:
        for k in range(scenario.sim.n_steps):
            t = k * dt
            # resolve scripted triggers against current agent positions
            agent_xy = [(states[a].x, states[a].y) for a in order]
            for p in scenario.participants:
                if p.mode != "scripted":
                    continue
                px, py, _, _ = scripted_state(p.behavior, t, p.initial,
                                              trigger_times[p.pid])
                trigger_times[p.pid] = update_trigger(
                    p.behavior, t, (px, py), agent_xy, trigger_times[p.pid])

            snapshot = compose(scenario, t, states, trigger_times)
            events = detect_events(snapshot, scenario.background.drivable_area)

            observations, frames = {}, {}
            for ai, aid in enumerate(order):
                item = snapshot.by_id(agent_parts[aid].pid)
                if render_sensors:
                    obs, frame = build_observation(
                        scenario, snapshot, item, states[aid],
                        agent_parts[aid].command, bg_instances,
                        _derive_seed(scenario.sim.seed, k, ai))
                else:
                    obs = _blind_observation(scenario, states[aid],
                                             agent_parts[aid].command)
                    frame = None
                observations[aid] = obs
                frames[aid] = frame
                if dumper is not None and frame is not None:
                    dumper.dump(k, aid, frame)

            plans = pool.plan_all(observations, k, dt)

            step_rec = {"kind": "step", "k": k, "t": t,
                        "participants": [], "agents": {}, "events": events}
            next_states = {}
            for aid in order:
                controls, nxt = track_step(states[aid], plans[aid], params, dt,
                                           lookahead=lookahead, weights=weights)
                digest = frames[aid].digest() if frames[aid] is not None else None
                step_rec["agents"][aid] = _record_agent(states[aid], plans[aid],
                                                        controls, digest)
                next_states[aid] = nxt
            for item in snapshot.items:
                if not item.is_agent:
                    step_rec["participants"].append({
                        "id": item.pid,
                        "x": float(item.pose.translation[0]),
                        "y": float(item.pose.translation[1]),
                        "heading": item.pose.yaw,
                        "v": float(item.v),
                    })
            log.steps.append(step_rec)
            states = next_states
    except (AgentTimeout, AgentProtocolError) as e:
        termination = f"agent_failure: {e}"
        log.end = {"kind": "end", "termination": termination,
                   "steps": len(log.steps)}
        raise
    finally:
        if not log.end:
            log.end = {"kind": "end", "termination": termination,
                       "steps": len(log.steps)}
    return log


def open_loop_log(scenario: Scenario, agent_trajectories: dict = None) -> SimLog:
    """Log built by sampling recorded trajectories instead of running agents.

    Default: every agent follows its reference trajectory. This is the
    open-loop side of the open/closed consistency comparison.
    """
    agent_parts = {p.agent_id: p for p in scenario.agent_participants()}
    order = sorted(agent_parts)
    if agent_trajectories is None:
        agent_trajectories = {}
        for aid in order:
            ref = scenario.reference_for(agent_parts[aid])
            if ref is None:
                raise ValueError(f"agent {aid} has no reference trajectory")
            agent_trajectories[aid] = ref

    dt = scenario.sim.dt
    trigger_times = {p.pid: None for p in scenario.participants
                     if p.mode == "scripted"}
    log = SimLog(make_header(scenario))

    class _S:
        __slots__ = ("x", "y", "heading", "v")

        def __init__(self, x, y, heading, v):
            self.x, self.y, self.heading, self.v = x, y, heading, v

    for k in range(scenario.sim.n_steps):
        t = k * dt
        samples = {aid: agent_trajectories[aid].sample(t) for aid in order}
        states = {aid: _S(*samples[aid]) for aid in order}
        agent_xy = [(states[a].x, states[a].y) for a in order]
        for p in scenario.participants:
            if p.mode != "scripted":
                continue
            px, py, _, _ = scripted_state(p.behavior, t, p.initial,
                                          trigger_times[p.pid])
            trigger_times[p.pid] = update_trigger(
                p.behavior, t, (px, py), agent_xy, trigger_times[p.pid])
        snapshot = compose(scenario, t, states, trigger_times)
        events = detect_events(snapshot, scenario.background.drivable_area)
        step_rec = {"kind": "step", "k": k, "t": t,
                    "participants": [], "agents": {}, "events": events}
        for aid in order:
            x, y, h, v = samples[aid]
            step_rec["agents"][aid] = {"x": x, "y": y, "heading": h, "v": v,
                                       "a": 0.0, "steering": 0.0}
        for item in snapshot.items:
            if not item.is_agent:
                step_rec["participants"].append({
                    "id": item.pid,
                    "x": float(item.pose.translation[0]),
                    "y": float(item.pose.translation[1]),
                    "heading": item.pose.yaw,
                    "v": float(item.v),
                })
        log.steps.append(step_rec)
    log.end = {"kind": "end", "termination": "completed", "steps": len(log.steps)}
    return log
