"""Command-line entry points: run, score, register, render.

Exit codes: 0 success, 1 simulation-level agent failure, 2 config/IO error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .agents import ConstantVelocityAgent, ReplayAgent, RuleAgent, serve_protocol
from .errors import (AgentProtocolError, AgentTimeout, DrivesimError,
                     MissingAsset, NonPositiveInput, ParseError,
                     ValidationError)
from .geom import Pose
from .imageio import save_ppm, save_pfm
from .registration import (correct_sequence, load_annotations, load_cloud)
from .scene import load_scenario
from .score import (ScoreConfig, format_table, gap as gap_metric,
                    reports_to_json, score_log)
from .simloop import SimLog, run as run_loop

BUILTIN_AGENTS = ("constant_velocity", "replay", "rule")

EXIT_OK = 0
EXIT_AGENT_FAILURE = 1
EXIT_CONFIG = 2


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_CONFIG


def _build_agent(kind: str, scenario, participant):
    if kind == "constant_velocity":
        return ConstantVelocityAgent(dt=scenario.sim.dt)
    if kind == "replay":
        ref = scenario.reference_for(participant)
        if ref is None:
            raise ValidationError(
                f"agent {participant.agent_id}: replay needs a reference trajectory")
        return ReplayAgent(ref, dt=scenario.sim.dt)
    if kind == "rule":
        route = scenario.route_for(participant)
        if route is None:
            raise ValidationError(
                f"agent {participant.agent_id}: rule agent needs a route")
        return RuleAgent(route, cruise_speed=max(participant.initial[3], 1.0),
                         dt=scenario.sim.dt)
    raise ValidationError(f"unknown agent binding {kind!r}")


def _parse_bindings(pairs) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValidationError(f"--agent expects id=binding, got {pair!r}")
        aid, kind = pair.split("=", 1)
        out[aid.strip()] = kind.strip()
    return out


def _scenario_paths(args) -> list:
    paths = []
    if args.scenario:
        paths.extend(args.scenario)
    if args.suite:
        suite = Path(args.suite)
        if not suite.is_dir():
            raise MissingAsset(suite)
        paths.extend(sorted(suite.glob("*.scn")))
    if not paths:
        raise ValidationError("nothing to run: pass --scenario or --suite")
    return [Path(p) for p in paths]


def _apply_overrides(scenario, args):
    if args.n_steps is not None:
        scenario.sim.n_steps = args.n_steps
    if args.dt is not None:
        scenario.sim.dt = args.dt
    if args.seed is not None:
        scenario.sim.seed = args.seed
    if args.mode is not None:
        scenario.mode = args.mode
    if args.weights is not None:
        w = [float(x) for x in args.weights.split()]
        if len(w) != 3:
            raise ValidationError("--weights expects 'EP TTC C'")
        scenario.scoring.weight_ep, scenario.scoring.weight_ttc, \
            scenario.scoring.weight_comfort = w
    return scenario


def cmd_run(args) -> int:
    try:
        paths = _scenario_paths(args)
        bindings = _parse_bindings(args.agent)
    except DrivesimError as e:
        return _fail(str(e))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    exit_code = EXIT_OK
    for path in paths:
        try:
            scenario = load_scenario(path)
            _apply_overrides(scenario, args)
        except DrivesimError as e:
            return _fail(f"{path}: {e}")

        agent_parts = {p.agent_id: p for p in scenario.agent_participants()}
        default = None if args.default_agent == "none" else args.default_agent
        agents = {}
        endpoint = args.agent_endpoint
        try:
            for aid in sorted(agent_parts):
                kind = bindings.get(aid, default)
                if kind is None:
                    raise ValidationError(f"agent {aid!r} has no binding; "
                                          f"use --agent {aid}=<builtin|endpoint>")
                if ":" in kind or kind.isdigit():
                    # id=host:port binds the agent remotely on that endpoint
                    if endpoint not in (None, kind):
                        raise ValidationError(
                            "all remote agents must share one endpoint")
                    endpoint = kind
                    kind = "remote"
                if kind == "remote":
                    agents[aid] = "remote"
                else:
                    agents[aid] = _build_agent(kind, scenario, agent_parts[aid])
        except DrivesimError as e:
            return _fail(f"{path}: {e}")

        server = None
        remote_ids = [a for a, k in agents.items() if k == "remote"]
        try:
            if remote_ids:
                if not endpoint:
                    return _fail("remote agents need --agent-endpoint or an "
                                 "id=host:port binding")
                print(f"waiting for {len(remote_ids)} agent(s) on "
                      f"{endpoint} ...")
                server = serve_protocol(endpoint, remote_ids,
                                        timeout=scenario.sim.agent_timeout)
            if args.dump_frames is None:
                dump = None
            elif args.dump_frames is True:
                dump = out_dir / "frames" / scenario.name
            else:
                dump = Path(args.dump_frames) / scenario.name
            log = run_loop(scenario, agents, server=server, dump_dir=dump)
        except (AgentTimeout, AgentProtocolError) as e:
            print(f"error: {path}: {e}", file=sys.stderr)
            exit_code = EXIT_AGENT_FAILURE
            continue
        finally:
            if server is not None:
                server.close()

        log_path = out_dir / f"{scenario.name}.log.jsonl"
        log.save(log_path)
        report = score_log(log)
        reports.append(report)
        print(f"{scenario.name}: {log.n_steps} steps -> {log_path}")

    if reports:
        table = format_table(reports)
        print(table)
        (out_dir / "report.txt").write_text(table + "\n", encoding="utf-8")
        (out_dir / "report.json").write_text(reports_to_json(reports) + "\n",
                                             encoding="utf-8")
    return exit_code


def _load_reports(target: Path, cfg):
    if target.is_dir():
        paths = sorted(target.glob("*.log.jsonl"))
        if not paths:
            raise MissingAsset(target / "*.log.jsonl")
    elif target.exists():
        paths = [target]
    else:
        raise MissingAsset(target)
    reports = []
    for path in paths:
        try:
            log = SimLog.load(path)
            reports.append(score_log(log, cfg))
        except (ParseError, KeyError) as e:
            raise ParseError(f"{path}: corrupt log: {e}") from e
    return reports


def cmd_score(args) -> int:
    cfg = None
    if args.weights is not None:
        w = [float(x) for x in args.weights.split()]
        if len(w) != 3:
            return _fail("--weights expects 'EP TTC C'")
        cfg = ScoreConfig(weight_ep=w[0], weight_ttc=w[1], weight_comfort=w[2])

    try:
        reports = _load_reports(Path(args.log), cfg)
    except (ParseError, MissingAsset) as e:
        return _fail(str(e))
    print(format_table(reports))

    if args.baseline:
        try:
            base_reports = _load_reports(Path(args.baseline), cfg)
        except (ParseError, MissingAsset) as e:
            return _fail(str(e))
        base = {r.scenario: r for r in base_reports}
        per_seq = []
        print("\nPDMS gap vs baseline (defined only where both PDMS > 0):")
        for rep in reports:
            other = base.get(rep.scenario)
            if other is None:
                continue
            try:
                g = gap_metric(other.pdms, rep.pdms)
            except NonPositiveInput:
                print(f"  {rep.scenario}: skipped (PDMS <= 0)")
                continue
            per_seq.append(g)
            print(f"  {rep.scenario}: {100.0 * g:.2f}%")
        if per_seq:
            print(f"  mean per-sequence gap: "
                  f"{100.0 * sum(per_seq) / len(per_seq):.2f}%")
        try:
            agg = gap_metric(sum(r.pdms for r in base_reports) / len(base_reports),
                             sum(r.pdms for r in reports) / len(reports))
            print(f"  aggregate-PDMS gap: {100.0 * agg:.2f}%")
        except NonPositiveInput:
            print("  aggregate-PDMS gap: undefined (aggregate PDMS <= 0)")

    if args.json_out:
        Path(args.json_out).write_text(reports_to_json(reports) + "\n",
                                       encoding="utf-8")
    return EXIT_OK


def cmd_register(args) -> int:
    cloud_dir = Path(args.clouds)
    if not cloud_dir.is_dir():
        return _fail(f"no such cloud directory: {cloud_dir}")
    paths = sorted(cloud_dir.glob("*.pcbin"))
    if not paths:
        return _fail(f"no *.pcbin clouds in {cloud_dir}")
    try:
        clouds = [load_cloud(p, frame_id=i) for i, p in enumerate(paths)]
        annotations = load_annotations(args.annotations)
    except (ParseError, ValidationError, MissingAsset) as e:
        return _fail(str(e))
    try:
        corrections = correct_sequence(clouds, annotations,
                                       reference_index=args.reference_index)
    except DrivesimError as e:
        return _fail(str(e))
    lines = ["# frame x y yaw"]
    for i, pose in enumerate(corrections):
        lines.append("%d %s %s %s" % (i, repr(float(pose.translation[0])),
                                      repr(float(pose.translation[1])),
                                      repr(float(pose.yaw))))
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(corrections)} corrections -> {args.out}")
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except DrivesimError as e:
        return _fail(str(e))
    try:
        parts = [float(x) for x in args.pose.split()]
        if len(parts) != 3:
            raise ValueError("expected 'x y heading'")
    except ValueError as e:
        return _fail(f"bad pose: {e}")

    from .relight import LightMaps
    from .scene import compose
    from .sensors import SceneView, render_camera, render_lidar

    class _S:
        x, y, heading, v = parts[0], parts[1], parts[2], 0.0

    states = {p.agent_id: _S for p in scenario.agent_participants()}
    snapshot = compose(scenario, args.t, states)
    bg = [(m, Pose.identity(), -(i + 1))
          for i, m in enumerate(scenario.background.meshes)]
    ego_item = snapshot.agents()[0]
    others = [(it.mesh, it.pose, i) for i, it in enumerate(snapshot.items)
              if it.pid != ego_item.pid]
    view = SceneView.build(bg, others)
    lm = LightMaps.uniform(1.0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for cam in scenario.rig.cameras:
        rgb, depth, mask = render_camera(
            view, cam, ego_item.pose, lm,
            samples=scenario.rig.shade_samples,
            shadow_samples=scenario.rig.shadow_samples,
            shadows=scenario.rig.shadows, sky_color=scenario.rig.sky_color,
            seed=scenario.sim.seed)
        save_ppm(rgb, out / f"{cam.name}.ppm")
        save_pfm(depth, out / f"{cam.name}_depth.pfm")
        save_pfm(mask.astype(np.float32), out / f"{cam.name}_mask.pfm")
    ri = render_lidar(view, scenario.rig.lidar, ego_item.pose)
    save_pfm(ri.depth, out / "lidar_depth.pfm")
    save_pfm(ri.intensity, out / "lidar_intensity.pfm")
    print(f"wrote renders -> {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="drivesim",
        description="Closed-loop driving simulation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run scenarios closed-loop and score them")
    p_run.add_argument("--scenario", action="append", help="scenario file (repeatable)")
    p_run.add_argument("--suite", help="directory of *.scn files")
    p_run.add_argument("--agent", action="append",
                       help="agent binding id=<constant_velocity|replay|rule|remote>")
    p_run.add_argument("--default-agent", default="constant_velocity",
                       choices=BUILTIN_AGENTS + ("remote", "none"),
                       help="binding for agents without an explicit --agent; "
                            "'none' requires every agent to be bound explicitly")
    p_run.add_argument("--agent-endpoint", help="host:port to serve remote agents")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--dump-frames", nargs="?", const=True, default=None,
                       metavar="DIR",
                       help="write per-step sensor images (default under --out)")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--n-steps", type=int)
    p_run.add_argument("--dt", type=float)
    p_run.add_argument("--mode", choices=("non_reactive", "safety_test", "multi_agent"))
    p_run.add_argument("--weights", help="'EP TTC C' scoring weights")
    p_run.set_defaults(func=cmd_run)

    p_score = sub.add_parser("score", help="re-score existing logs")
    p_score.add_argument("log", help="log file or directory")
    p_score.add_argument("--weights", help="'EP TTC C' scoring weights")
    p_score.add_argument("--baseline",
                         help="second log/dir; emit per-sequence and "
                              "aggregate PDMS gaps against it")
    p_score.add_argument("--json-out", help="write machine-readable report here")
    p_score.set_defaults(func=cmd_score)

    p_reg = sub.add_parser("register", help="correct ego poses from LiDAR clouds")
    p_reg.add_argument("--clouds", required=True, help="directory of *.pcbin files")
    p_reg.add_argument("--annotations", required=True)
    p_reg.add_argument("--out", default="corrections.txt")
    p_reg.add_argument("--reference-index", type=int, default=None)
    p_reg.set_defaults(func=cmd_register)

    p_render = sub.add_parser("render", help="single-frame debug render")
    p_render.add_argument("--scenario", required=True)
    p_render.add_argument("--pose", required=True, help="'x y heading'")
    p_render.add_argument("--t", type=float, default=0.0)
    p_render.add_argument("--out", default="render_out")
    p_render.set_defaults(func=cmd_render)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DrivesimError as e:
        return _fail(str(e))


if __name__ == "__main__":
    sys.exit(main())
