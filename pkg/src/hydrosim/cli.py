"""Command-line entry points.

Exit codes: 0 success, 2 configuration/input error, 3 mission failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import engine
from .errors import HydrosimError
from .planner import PlannerParams, hybrid_astar
from .worldmap import OccupancyGrid, Pose2D, erode, extract_edges, load_pgm, to_grid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSION_FAILED = 3


def _parse_pose(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"pose must be x,y,theta: {text!r}")
    return tuple(parts)


def cmd_run(args) -> int:
    scenario = engine.Scenario.from_file(args.scenario)
    log, metrics = engine.run(scenario, seed=args.seed)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "log.jsonl").write_text(log.to_jsonl())
    (out_dir / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
    engine.export_state_csv(log, out_dir / "series.csv")
    print(json.dumps({
        "scenario": scenario.name,
        "seed": scenario.seed if args.seed is None else args.seed,
        "exit_reason": metrics["exit_reason"],
        "duration_s": metrics["duration_s"],
        "waypoints": metrics["waypoints"],
        "n_samples": metrics["n_samples"],
        "log_sha256": log.sha256(),
        "out": str(out_dir),
    }, indent=2))
    return EXIT_MISSION_FAILED if metrics["exit_reason"] == "mission_failure" else EXIT_OK


def cmd_metrics(args) -> int:
    log = engine.SimLog.from_jsonl(Path(args.log).read_text())
    metrics = engine.compute_metrics(log)
    text = json.dumps(metrics, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_replay(args) -> int:
    log = engine.SimLog.from_jsonl(Path(args.log).read_text())
    if args.stream:
        for payload in engine.replay_stream(log, rate=args.rate):
            print(json.dumps(payload))
    else:
        for record in engine.replay(log, rate=args.rate):
            print(json.dumps(record))
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = engine.Scenario.from_file(args.scenario)
    first, last = (int(p) for p in args.seeds.split(".."))
    rows = []
    for seed in range(first, last + 1):
        log, metrics = engine.run(scenario, seed=seed)
        rows.append({
            "seed": seed,
            "exit_reason": metrics["exit_reason"],
            "duration_s": metrics["duration_s"],
            "log_sha256": log.sha256(),
        })
        if args.out:
            out_dir = Path(args.out) / f"seed-{seed}"
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "log.jsonl").write_text(log.to_jsonl())
            (out_dir / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
    print(json.dumps(rows, indent=2))
    distinct = len({r["log_sha256"] for r in rows})
    print(f"# {len(rows)} runs, {distinct} distinct log hashes", file=sys.stderr)
    return EXIT_OK


def cmd_map_preprocess(args) -> int:
    img = load_pgm(Path(args.input).read_bytes())
    mask = extract_edges(img, args.low, args.high)
    mask = erode(mask, args.erode)
    ox, oy = (float(v) for v in args.origin.split(","))
    grid = to_grid(mask, args.resolution, Pose2D(ox, oy, 0.0))
    Path(args.out).write_text(grid.to_json() + "\n")
    occupied = int((grid.cells == 1).sum())
    print(json.dumps({
        "width": grid.width, "height": grid.height,
        "resolution": grid.resolution, "occupied_cells": occupied,
        "out": args.out,
    }))
    return EXIT_OK


def cmd_plan(args) -> int:
    grid = OccupancyGrid.from_json(Path(args.grid).read_text())
    params = PlannerParams()
    if args.params:
        doc = json.loads(Path(args.params).read_text())
        if "steer_set" in doc:
            doc["steer_set"] = tuple(doc["steer_set"])
        params = PlannerParams(**doc)
    traj = hybrid_astar(grid, _parse_pose(args.start), _parse_pose(args.goal), params)
    doc = {
        "poses": [[round(v, 6) for v in p] for p in traj.poses.tolist()],
        "curvatures": [round(v, 9) for v in traj.curvatures.tolist()],
        "total_cost": traj.total_cost,
        "length_m": traj.length,
    }
    Path(args.out).write_text(json.dumps(doc) + "\n")
    print(json.dumps({"poses": len(traj.poses), "length_m": traj.length,
                      "total_cost": traj.total_cost, "out": args.out}))
    return EXIT_OK


def cmd_sample(args) -> int:
    import httpx

    action = {"stop": 0, "forward": 1, "reverse": 2}[args.action]
    base = args.url.rstrip("/")
    with httpx.Client(timeout=10.0) as client:
        session_id = args.session
        if session_id is None:
            sessions = client.get(f"{base}/api/sessions").json()
            running = [s for s in sessions if s["state"] == "running"]
            if not running:
                print("no running session", file=sys.stderr)
                return EXIT_CONFIG
            session_id = running[0]["id"]
        r = client.post(
            f"{base}/api/sessions/{session_id}/command",
            json={"type": "motor_command", "module": args.module,
                  "motor": args.motor, "action": action},
        )
        print(json.dumps(r.json(), indent=2))
        return EXIT_OK if r.status_code == 200 else EXIT_CONFIG


def cmd_serve(args) -> int:
    import uvicorn

    from .bridge import create_app

    app = create_app(
        data_dir=args.data_dir,
        default_scenario=args.scenario,
        default_rate=args.rate,
        max_sessions=args.max_sessions,
        frontend_dir=args.frontend,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hydrosim",
                                description="USV mission simulator and ground station")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario to completion")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None, help="output directory (default .)")
    run.set_defaults(fn=cmd_run)

    metrics = sub.add_parser("metrics", help="recompute metrics from a log")
    metrics.add_argument("log")
    metrics.add_argument("--out", default=None)
    metrics.set_defaults(fn=cmd_metrics)

    replay = sub.add_parser("replay", help="re-emit a log as JSONL")
    replay.add_argument("log")
    replay.add_argument("--rate", type=float, default=0.0,
                        help="sim seconds per wall second (0 = instant)")
    replay.add_argument("--stream", action="store_true",
                        help="emit only the delivered telemetry payloads")
    replay.set_defaults(fn=cmd_replay)

    sweep = sub.add_parser("sweep", help="run a scenario across a seed range")
    sweep.add_argument("scenario")
    sweep.add_argument("--seeds", required=True, help="range as FIRST..LAST")
    sweep.add_argument("--out", default=None)
    sweep.set_defaults(fn=cmd_sweep)

    map_parser = sub.add_parser("map", help="map utilities")
    map_sub = map_parser.add_subparsers(dest="map_command", required=True)
    prep = map_sub.add_parser("preprocess", help="PGM -> occupancy grid JSON")
    prep.add_argument("input")
    prep.add_argument("--low", type=float, default=40.0)
    prep.add_argument("--high", type=float, default=100.0)
    prep.add_argument("--erode", type=int, default=1)
    prep.add_argument("--resolution", type=float, default=1.0)
    prep.add_argument("--origin", default="0,0", help="grid origin as x,y")
    prep.add_argument("--out", required=True)
    prep.set_defaults(fn=cmd_map_preprocess)

    plan = sub.add_parser("plan", help="plan a path on a grid")
    plan.add_argument("--grid", required=True)
    plan.add_argument("--start", required=True, help="x,y,theta")
    plan.add_argument("--goal", required=True, help="x,y,theta")
    plan.add_argument("--params", default=None, help="planner params JSON file")
    plan.add_argument("--out", required=True)
    plan.set_defaults(fn=cmd_plan)

    sample = sub.add_parser("sample", help="send a sampler motor command to a live session")
    sample.add_argument("--module", type=int, required=True)
    sample.add_argument("--motor", type=int, required=True)
    sample.add_argument("--action", choices=("stop", "forward", "reverse"), required=True)
    sample.add_argument("--url", default="http://127.0.0.1:8000")
    sample.add_argument("--session", default=None)
    sample.set_defaults(fn=cmd_sample)

    serve = sub.add_parser("serve", help="start the ground-station service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--scenario", default=None, help="default scenario file")
    serve.add_argument("--data-dir", default=None)
    serve.add_argument("--rate", type=float, default=1.0,
                       help="sim seconds per wall second for new sessions")
    serve.add_argument("--max-sessions", type=int, default=1)
    serve.add_argument("--frontend", default=None, help="static UI directory to serve at /")
    serve.set_defaults(fn=cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except HydrosimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
