"""Scenario config files: a sectioned key-value format (full schema in
docs/formats.md). Asset paths resolve relative to the scenario file.
"""

from __future__ import annotations

import configparser
import math
from pathlib import Path

import numpy as np

from ..errors import MissingAsset, ParseError, ValidationError
from ..geom import OrientedBox2D, Polygon2D, Polyline, load_mesh
from ..score.config import ScoreConfig
from ..sensors import BevGrid, CameraModel, LidarModel, SensorRig, camera_extrinsic
from .behaviors import BEHAVIOR_KINDS, BehaviorSpec
from .trajectory import load_trajectory_csv
from .types import BackgroundScene, Participant, Scenario, SimParams

COMMANDS = ("left", "right", "straight", "unknown")
_BEHAVIOR_PARAM_KEYS = ("speed", "a_brake", "trigger_distance", "trigger_time",
                        "lane_width", "cut_duration", "direction")


def _floats(text: str, field: str, path=None):
    try:
        return [float(p) for p in text.replace(",", " ").split()]
    except ValueError as e:
        raise ParseError(f"bad number in {text!r}: {e}", path=path, field=field) from e


def _points(text: str, field: str, path=None) -> np.ndarray:
    vals = []
    for pair in text.split():
        parts = pair.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected x,y pairs in {field}", path=path, field=field)
        try:
            vals.append((float(parts[0]), float(parts[1])))
        except ValueError as e:
            raise ParseError(str(e), path=path, field=field) from e
    return np.array(vals)


def _fmt_floats(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def _fmt_points(points) -> str:
    return " ".join(f"{repr(float(x))},{repr(float(y))}" for x, y in points)


def _resolve(base: Path, rel: str) -> Path:
    p = Path(rel)
    return p if p.is_absolute() else base / p


def _load_participant(pid: str, section, base: Path, path) -> Participant:
    mesh_rel = section.get("mesh", "")
    if not mesh_rel:
        raise ParseError("participant needs a mesh", path=path, field=f"{pid}.mesh")
    mesh = load_mesh(_resolve(base, mesh_rel))

    fp = _floats(section.get("footprint", "4.5 1.9"), f"{pid}.footprint", path)
    if len(fp) != 2 or fp[0] <= 0 or fp[1] <= 0:
        raise ValidationError(f"participant {pid}: footprint must be 'length width' > 0")
    footprint = OrientedBox2D((0.0, 0.0), 0.0, (fp[0] / 2.0, fp[1] / 2.0))

    init = _floats(section.get("initial", "0 0 0 0"), f"{pid}.initial", path)
    if len(init) != 4:
        raise ParseError("initial must be 'x y heading v'", path=path,
                         field=f"{pid}.initial")

    mode = section.get("mode", "agent").strip()
    trajectory = None
    traj_rel = section.get("trajectory", "")
    if traj_rel:
        trajectory = load_trajectory_csv(_resolve(base, traj_rel))

    behavior = None
    if mode == "scripted":
        kind = section.get("behavior", "").strip()
        if kind not in BEHAVIOR_KINDS:
            raise ValidationError(f"participant {pid}: unknown behavior {kind!r}")
        params = {}
        for key in _BEHAVIOR_PARAM_KEYS:
            if key in section:
                params[key] = float(section[key])
        behavior = BehaviorSpec(kind, params)

    command = section.get("command", "unknown").strip()
    if command not in COMMANDS:
        raise ValidationError(f"participant {pid}: unknown command {command!r}")

    route = None
    route_points = None
    if "route" in section:
        route_points = _points(section["route"], f"{pid}.route", path)
        route = Polyline(route_points)
    reference = None
    ref_rel = section.get("reference_trajectory", "")
    if ref_rel:
        reference = load_trajectory_csv(_resolve(base, ref_rel))

    return Participant(
        pid=pid, mesh=mesh, footprint=footprint, mode=mode,
        initial=tuple(init), trajectory=trajectory, behavior=behavior,
        agent_id=section.get("agent_id", "").strip() or None,
        command=command, route=route, reference_trajectory=reference,
        mesh_path=mesh_rel, trajectory_path=traj_rel or None,
        reference_path=ref_rel or None, route_points=route_points,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise MissingAsset(path)
    base = path.parent
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ParseError(str(e), path=path) from e

    for required in ("scenario", "background", "ego", "sim"):
        if required not in cp:
            raise ParseError(f"missing [{required}] section", path=path)

    meta = cp["scenario"]
    name = meta.get("name", path.stem)
    mode = meta.get("mode", "non_reactive").strip()

    # background
    bg = cp["background"]
    mesh_paths = []
    for key in sorted(bg.keys()):
        if key == "mesh" or key.startswith("mesh."):
            mesh_paths.append(bg[key])
    meshes = [load_mesh(_resolve(base, m)) for m in mesh_paths]
    drivable = []
    for key in sorted(bg.keys()):
        if key == "drivable" or key.startswith("drivable."):
            drivable.append(Polygon2D(_points(bg[key], key, path)))
    centerline = None
    if "centerline" in bg:
        centerline = Polyline(_points(bg["centerline"], "centerline", path))
    reference = None
    ref_rel = bg.get("reference_trajectory", "")
    if ref_rel:
        reference = load_trajectory_csv(_resolve(base, ref_rel))
    lidar_ref = bg.get("lidar_reference", "") or None
    if lidar_ref and not _resolve(base, lidar_ref).exists():
        raise MissingAsset(_resolve(base, lidar_ref))
    lightmaps_rel = bg.get("lightmaps", "") or None
    if lightmaps_rel and lightmaps_rel != "fit":
        li = _resolve(base, lightmaps_rel).with_suffix(".li.pfm")
        if not li.exists():
            raise MissingAsset(li)
    background = BackgroundScene(
        meshes=meshes,
        ground_z=bg.getfloat("ground_z", 0.0),
        drivable_area=drivable,
        centerline=centerline,
        reference_trajectory=reference,
        lidar_reference_path=lidar_ref,
        lightmaps_path=lightmaps_rel,
        mesh_paths=mesh_paths,
        reference_path=ref_rel or None,
    )

    ego = _load_participant("ego", cp["ego"], base, path)
    if not ego.agent_id:
        raise ValidationError("ego needs an agent_id")

    participants = []
    for section in cp.sections():
        if section.startswith("participant."):
            pid = section[len("participant."):]
            participants.append(_load_participant(pid, cp[section], base, path))

    # sensors
    rig = SensorRig()
    if "sensors" in cp:
        sn = cp["sensors"]
        cameras = []
        for key in sorted(sn.keys()):
            if key.startswith("camera."):
                name_cam = key[len("camera."):]
                groups = [g.strip() for g in sn[key].split("|")]
                if len(groups) != 3:
                    raise ParseError("camera needs 'w h fx fy cx cy | x y z | yaw pitch'",
                                     path=path, field=key)
                dims = _floats(groups[0], key, path)
                pos = _floats(groups[1], key, path)
                ang = _floats(groups[2], key, path)
                if len(dims) != 6 or len(pos) != 3 or len(ang) != 2:
                    raise ParseError("camera spec has wrong arity", path=path, field=key)
                cameras.append(CameraModel(
                    name_cam, int(dims[0]), int(dims[1]), dims[2], dims[3],
                    dims[4], dims[5],
                    extrinsic=camera_extrinsic(pos[0], pos[1], pos[2],
                                               yaw=ang[0], pitch=ang[1])))
        rig.cameras = cameras
        if "lidar" in sn:
            groups = [g.strip() for g in sn["lidar"].split("|")]
            spec = _floats(groups[0], "lidar", path)
            if len(spec) != 5:
                raise ParseError("lidar needs 'channels vmin vmax res range | x y z'",
                                 path=path, field="lidar")
            offset = _floats(groups[1], "lidar", path) if len(groups) > 1 else [0, 0, 1.8]
            from ..geom import Pose
            rig.lidar = LidarModel(int(spec[0]), spec[1], spec[2], int(spec[3]),
                                   spec[4],
                                   extrinsic=Pose(np.eye(3), np.array(offset)))
        if "bev" in sn:
            b = _floats(sn["bev"], "bev", path)
            rig.bev = BevGrid(b[0], int(b[1]), b[2], int(b[3]))
        rig.shade_samples = sn.getint("shade_samples", rig.shade_samples)
        rig.shadow_samples = sn.getint("shadow_samples", rig.shadow_samples)
        rig.shadows = sn.getboolean("shadows", rig.shadows)
        rig.supersample = sn.getboolean("supersample", rig.supersample)
        rig.include_camera_in_obs = sn.getboolean("include_camera_in_obs", False)
        rig.include_lidar_points_in_obs = sn.getboolean("include_lidar_points_in_obs",
                                                        False)
        if "sky" in sn:
            rig.sky_color = tuple(_floats(sn["sky"], "sky", path))
        rig.fg_roughness = sn.getfloat("fg_roughness", rig.fg_roughness)
        rig.fg_metallic = sn.getfloat("fg_metallic", rig.fg_metallic)

    # sim
    sm = cp["sim"]
    controller = {}
    for key in ("q_lat_y", "q_lat_heading", "r_lat", "q_lon_s", "q_lon_v", "r_lon",
                "wheelbase", "steer_max", "a_min", "a_max", "steer_rate_max"):
        if key in sm:
            controller[key] = float(sm[key])
    sim = SimParams(
        dt=sm.getfloat("dt", 0.1),
        n_steps=sm.getint("n_steps", 40),
        seed=sm.getint("seed", 0),
        agent_timeout=sm.getfloat("agent_timeout", 10.0),
        lookahead=sm.getfloat("lookahead", 0.5),
        controller=controller,
    )

    scoring = ScoreConfig()
    if "scoring" in cp:
        sc = cp["scoring"]
        if "weights" in sc:
            w = _floats(sc["weights"], "weights", path)
            if len(w) != 3:
                raise ParseError("weights must be 'EP TTC C'", path=path,
                                 field="weights")
            scoring.weight_ep, scoring.weight_ttc, scoring.weight_comfort = w
        scoring.ttc_threshold = sc.getfloat("ttc_threshold", scoring.ttc_threshold)
        scoring.ttc_horizon = sc.getfloat("ttc_horizon", scoring.ttc_horizon)
        scoring.at_fault_only = sc.getboolean("at_fault_only", False)
        for key in ("a_lon_min", "a_lon_max", "a_lat_max", "jerk_max",
                    "yaw_rate_max", "yaw_acc_max"):
            if key in sc:
                setattr(scoring, key, float(sc[key]))
        # re-validate after overrides
        scoring.__post_init__()

    return Scenario(name=name, mode=mode, background=background, ego=ego,
                    participants=participants, rig=rig, sim=sim,
                    scoring=scoring, path=str(path))


def _participant_lines(p: Participant) -> list:
    lines = [f"mesh = {p.mesh_path}"]
    lines.append("footprint = %s" % _fmt_floats(
        [p.footprint.half_extents[0] * 2, p.footprint.half_extents[1] * 2]))
    lines.append("initial = %s" % _fmt_floats(p.initial))
    lines.append(f"mode = {p.mode}")
    if p.trajectory_path:
        lines.append(f"trajectory = {p.trajectory_path}")
    if p.behavior is not None:
        lines.append(f"behavior = {p.behavior.kind}")
        for key, val in sorted(p.behavior.params.items()):
            lines.append(f"{key} = {repr(float(val))}")
    if p.agent_id:
        lines.append(f"agent_id = {p.agent_id}")
    if p.command != "unknown":
        lines.append(f"command = {p.command}")
    if p.route_points is not None:
        lines.append("route = %s" % _fmt_points(p.route_points))
    if p.reference_path:
        lines.append(f"reference_trajectory = {p.reference_path}")
    return lines


def serialize_scenario(s: Scenario) -> str:
    out = ["[scenario]", f"name = {s.name}", f"mode = {s.mode}", ""]
    out.append("[background]")
    for i, m in enumerate(s.background.mesh_paths):
        out.append(("mesh = %s" % m) if i == 0 else (f"mesh.{i} = {m}"))
    out.append(f"ground_z = {repr(float(s.background.ground_z))}")
    for i, poly in enumerate(s.background.drivable_area):
        key = "drivable" if i == 0 else f"drivable.{i}"
        out.append(f"{key} = {_fmt_points(poly.vertices)}")
    if s.background.centerline is not None:
        out.append(f"centerline = {_fmt_points(s.background.centerline.points)}")
    if s.background.reference_path:
        out.append(f"reference_trajectory = {s.background.reference_path}")
    if s.background.lidar_reference_path:
        out.append(f"lidar_reference = {s.background.lidar_reference_path}")
    if s.background.lightmaps_path:
        out.append(f"lightmaps = {s.background.lightmaps_path}")
    out.append("")

    out.append("[ego]")
    out.extend(_participant_lines(s.ego))
    out.append("")
    for p in s.participants:
        out.append(f"[participant.{p.pid}]")
        out.extend(_participant_lines(p))
        out.append("")

    out.append("[sensors]")
    for cam in s.rig.cameras:
        ext = cam.extrinsic
        yaw = math.atan2(ext.rotation[1, 2], ext.rotation[0, 2])
        axis = ext.rotation @ np.array([0.0, 0.0, 1.0])
        pitch = -math.asin(max(-1.0, min(1.0, axis[2])))
        out.append("camera.%s = %s | %s | %s" % (
            cam.name,
            _fmt_floats([cam.width, cam.height, cam.fx, cam.fy, cam.cx, cam.cy]),
            _fmt_floats(ext.translation),
            _fmt_floats([yaw, pitch])))
    lid = s.rig.lidar
    out.append("lidar = %s | %s" % (
        _fmt_floats([lid.channels, lid.vfov_min, lid.vfov_max,
                     lid.horiz_resolution, lid.max_range]),
        _fmt_floats(lid.extrinsic.translation)))
    out.append("bev = %s" % _fmt_floats([s.rig.bev.extent, s.rig.bev.cells,
                                         s.rig.bev.split_height, s.rig.bev.clip_max]))
    out.append(f"shade_samples = {s.rig.shade_samples}")
    out.append(f"shadow_samples = {s.rig.shadow_samples}")
    out.append(f"shadows = {'true' if s.rig.shadows else 'false'}")
    out.append(f"supersample = {'true' if s.rig.supersample else 'false'}")
    out.append(f"include_camera_in_obs = {'true' if s.rig.include_camera_in_obs else 'false'}")
    out.append(f"include_lidar_points_in_obs = "
               f"{'true' if s.rig.include_lidar_points_in_obs else 'false'}")
    out.append("sky = %s" % _fmt_floats(s.rig.sky_color))
    out.append(f"fg_roughness = {repr(float(s.rig.fg_roughness))}")
    out.append(f"fg_metallic = {repr(float(s.rig.fg_metallic))}")
    out.append("")

    out.append("[sim]")
    out.append(f"dt = {repr(float(s.sim.dt))}")
    out.append(f"n_steps = {s.sim.n_steps}")
    out.append(f"seed = {s.sim.seed}")
    out.append(f"agent_timeout = {repr(float(s.sim.agent_timeout))}")
    out.append(f"lookahead = {repr(float(s.sim.lookahead))}")
    for key, val in sorted(s.sim.controller.items()):
        out.append(f"{key} = {repr(float(val))}")
    out.append("")

    sc = s.scoring
    out.append("[scoring]")
    out.append("weights = %s" % _fmt_floats(sc.weights))
    out.append(f"ttc_threshold = {repr(float(sc.ttc_threshold))}")
    out.append(f"ttc_horizon = {repr(float(sc.ttc_horizon))}")
    out.append(f"at_fault_only = {'true' if sc.at_fault_only else 'false'}")
    for key in ("a_lon_min", "a_lon_max", "a_lat_max", "jerk_max",
                "yaw_rate_max", "yaw_acc_max"):
        out.append(f"{key} = {repr(float(getattr(sc, key)))}")
    return "\n".join(out) + "\n"


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(serialize_scenario(s), encoding="utf-8")
