"""Deterministic scenario runner wiring every subsystem on a fixed-step
clock.

Tick order: inbound commands -> sensors -> estimator -> mission tree ->
arbitration -> thrust mixing -> dynamics -> sampler -> power -> telemetry.
All randomness flows through per-subsystem streams derived from the master
seed, so a (scenario, seed) pair maps to a byte-identical log.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time as _time
from dataclasses import dataclass, fields, field
from pathlib import Path

import numpy as np

from . import localization as loc
from . import mission as ms
from . import planner as pl
from . import power as pw
from . import rng as rng_mod
from . import sampler as sp
from . import telemetry as tm
from . import vehicle as vh
from .errors import (
    ConfigInvalid,
    EStopLatched,
    ExpanderUnresponsive,
    LogCorrupt,
    MapLoadFailed,
)
from .worldmap import GeoPoint, LocalFrame, OccupancyGrid, Pose2D

DEFAULT_RATES = {
    "imu_hz": 50.0,
    "gnss_hz": 1.0,
    "lidar_hz": 10.0,
    "telemetry_hz": 1.0,
    "bus_recovery_s": 5.0,
}

DEFAULT_NOISE = {
    "gnss_sigma_m": 0.0,
    "imu_yaw_sigma": 0.0,
    "imu_accel_sigma": 0.0,
    "heading_sigma": 0.0,  # 0 disables the AHRS heading correction
}


def _build(cls, doc: dict | None, what: str):
    """Construct a params dataclass from a JSON object, rejecting typos."""
    doc = dict(doc or {})
    known = {f.name for f in fields(cls)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigInvalid(f"{what}: unknown keys {sorted(unknown)}")
    for key, value in doc.items():
        if isinstance(value, list):
            doc[key] = tuple(value)
    try:
        return cls(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"{what}: {exc}") from exc


@dataclass(frozen=True)
class Scenario:
    name: str
    grid: OccupancyGrid
    plan: ms.MissionPlan
    origin_geo: GeoPoint
    start_pose: tuple[float, float, float]
    station_xy: tuple[float, float]
    vehicle: vh.VehicleParams
    planner: pl.PlannerParams
    controller: ms.ControllerParams
    sampler: sp.SamplerParams
    faults: sp.FaultModel
    disturbance: vh.DisturbanceModel
    link: tm.LinkModel
    load: pw.LoadProfile
    power: pw.PowerParams
    solar_irradiance: float  # constant [0, 1] scale on solar_peak_w
    roi_halfwidth_m: float
    roi_threshold_m: float
    rates: dict
    noise: dict
    process_noise_diag: tuple[float, ...]
    seed: int
    dt: float
    max_duration_s: float
    raw: dict  # canonical source document (hash input)

    @classmethod
    def from_file(cls, path: str | Path) -> "Scenario":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read scenario {path}: {exc}") from exc
        return cls.from_dict(doc, base_dir=path.parent)

    @classmethod
    def from_dict(cls, doc: dict, base_dir: str | Path = ".") -> "Scenario":
        base = Path(base_dir)
        if "dt" not in doc or doc["dt"] <= 0:
            raise ConfigInvalid("scenario requires dt > 0")

        grid_doc = doc.get("grid")
        if grid_doc is None:
            raise ConfigInvalid("scenario requires a grid")
        if "file" in grid_doc:
            gpath = base / grid_doc["file"]
            try:
                grid = OccupancyGrid.from_json(gpath.read_text())
            except OSError as exc:
                raise MapLoadFailed(f"grid file {gpath}: {exc}") from exc
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise MapLoadFailed(f"grid file {gpath} malformed: {exc}") from exc
        elif "empty" in grid_doc:
            e = grid_doc["empty"]
            origin = e.get("origin", {})
            grid = OccupancyGrid(
                width=int(e["width"]), height=int(e["height"]),
                resolution=float(e["resolution"]),
                origin=Pose2D(origin.get("x", 0.0), origin.get("y", 0.0), 0.0),
            )
        else:
            raise ConfigInvalid("grid must carry 'file' or 'empty'")

        mission_doc = doc.get("mission", {"waypoints": []})
        if "file" in mission_doc:
            mpath = base / mission_doc["file"]
            try:
                mission_doc = json.loads(mpath.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigInvalid(f"mission file {mpath}: {exc}") from exc
        try:
            plan = ms.MissionPlan.from_dict(mission_doc)
        except (KeyError, ValueError) as exc:
            raise ConfigInvalid(f"mission plan malformed: {exc}") from exc

        origin = doc.get("origin_geo", {"lat": 0.0, "lon": 0.0})
        faults_doc = doc.get("faults", {})
        sampler = _build(sp.SamplerParams, doc.get("sampler"), "sampler")
        if faults_doc == "calibrated":
            faults = sp.FaultModel.calibrated(sampler)
        else:
            faults = _build(sp.FaultModel, faults_doc, "faults")

        power_doc = doc.get("power", {})
        rates = {**DEFAULT_RATES, **doc.get("rates", {})}
        noise = {**DEFAULT_NOISE, **doc.get("noise", {})}
        roi = doc.get("roi", {})
        return cls(
            name=doc.get("name", "scenario"),
            grid=grid,
            plan=plan,
            origin_geo=GeoPoint(float(origin["lat"]), float(origin["lon"])),
            start_pose=tuple(doc.get("start_pose", (0.0, 0.0, 0.0))),
            station_xy=tuple(doc.get("station_xy", (0.0, 0.0))),
            vehicle=_build(vh.VehicleParams, doc.get("vehicle"), "vehicle"),
            planner=_build(pl.PlannerParams, doc.get("planner"), "planner"),
            controller=_build(ms.ControllerParams, doc.get("controller"), "controller"),
            sampler=sampler,
            faults=faults,
            disturbance=_build(vh.DisturbanceModel, doc.get("disturbance"), "disturbance"),
            link=_build(tm.LinkModel, doc.get("link"), "link"),
            load=_build(pw.LoadProfile, power_doc.get("profile"), "power.profile"),
            power=_build(pw.PowerParams, power_doc.get("params"), "power.params"),
            solar_irradiance=float(power_doc.get("solar_irradiance", 0.0)),
            roi_halfwidth_m=float(roi.get("halfwidth_m", 1.0)),
            roi_threshold_m=float(roi.get("threshold_m", 3.0)),
            rates=rates,
            noise=noise,
            process_noise_diag=tuple(doc.get("process_noise_diag", (1e-4, 1e-4, 1e-5, 1e-3))),
            seed=int(doc.get("seed", 0)),
            dt=float(doc["dt"]),
            max_duration_s=float(doc.get("max_duration_s", 600.0)),
            raw=doc,
        )


# ---------------------------------------------------------------------------
# log
# ---------------------------------------------------------------------------


@dataclass
class SimLog:
    records: list[dict] = field(default_factory=list)

    def append(self, t: float, kind: str, **data) -> None:
        self.records.append({"n": len(self.records), "t": round(t, 6), "kind": kind, **data})

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(r, sort_keys=True) for r in self.records) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.to_jsonl().encode()).hexdigest()

    def of_kind(self, kind: str) -> list[dict]:
        return [r for r in self.records if r["kind"] == kind]

    @classmethod
    def from_jsonl(cls, text: str) -> "SimLog":
        records = []
        for line in text.splitlines():
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise LogCorrupt(f"bad record: {exc}") from exc
        log = cls(records=records)
        log.validate()
        return log

    def validate(self) -> None:
        last_n = -1
        last_t = -math.inf
        for r in self.records:
            if "n" not in r or "t" not in r or "kind" not in r:
                raise LogCorrupt("record missing n/t/kind")
            if r["n"] != last_n + 1:
                raise LogCorrupt(f"record counter jumps at n={r.get('n')}")
            if r["t"] < last_t:
                raise LogCorrupt(f"time moves backwards at n={r['n']}")
            last_n, last_t = r["n"], r["t"]
        if not self.records or self.records[-1]["kind"] != "end":
            raise LogCorrupt("log has no terminal record")


def replay(log: SimLog, rate: float):
    """Re-emit log records; `rate` scales sim time to wall time (0 = as fast
    as possible).  Raises LogCorrupt for invalid logs."""
    log.validate()
    prev_t = None
    for record in log.records:
        if rate > 0 and prev_t is not None and record["t"] > prev_t:
            _time.sleep((record["t"] - prev_t) / rate)
        prev_t = record["t"]
        yield record


def replay_stream(log: SimLog, rate: float):
    """Replay only the delivered downlink payloads, in the exact shape the
    ground station pushes to its telemetry subscribers, so a replayed log
    feeds a console identically to the live session it recorded."""
    for record in replay(log, rate):
        if record["kind"] == "telemetry_tx" and record.get("msg") is not None:
            yield record["msg"]


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


class Simulation:
    """Incremental runner: the bridge steps it live; `run()` drives it to
    completion in one call.  Single-threaded; owns all mutable state."""

    def __init__(self, scenario: Scenario, seed: int | None = None):
        self.scenario = scenario
        self.seed = scenario.seed if seed is None else seed
        s = scenario

        self.rng_gnss = rng_mod.stream(self.seed, "gnss")
        self.rng_imu = rng_mod.stream(self.seed, "imu")
        self.rng_disturbance = rng_mod.stream(self.seed, "disturbance")
        self.rng_sampler = rng_mod.stream(self.seed, "sampler")
        self.rng_link = rng_mod.stream(self.seed, "link")

        self.frame = LocalFrame.at(s.origin_geo)
        self.truth = vh.TrueState(x=s.start_pose[0], y=s.start_pose[1], theta=s.start_pose[2])
        self.disturbance = s.disturbance.with_phases(self.rng_disturbance)
        self.est = loc.StateEstimate.initial(*s.start_pose)
        self.Q = np.diag(s.process_noise_diag)

        self.bb = ms.Blackboard(
            grid=s.grid,
            frame=self.frame,
            planner_params=s.planner,
            controller_params=s.controller,
            sampler=sp.SamplerState(params=s.sampler),
            dfield=pl.distance_field(s.grid),
            est_pose=s.start_pose,
            true_pose=s.start_pose,
        )
        self.executor = ms.MissionExecutor(s.plan, self.bb)
        self.power_state = pw.PowerState.full(s.power)
        self.channel = tm.Channel()
        self.rx_channel = tm.Channel()

        self.log = SimLog()
        self.outbox: list[tuple[float, dict]] = []  # delivered downlink frames
        self._inbound: list[tuple[float, int, tm.Message]] = []
        self._emitted_samples = 0
        self.tick_index = 0
        self.exit_reason: str | None = None
        self.tx_stats = {"sent": 0, "delivered": 0, "dropped": 0}
        self._prev_body_speed = 0.0

        dt = s.dt
        self._every = {
            key: max(1, int(round(1.0 / (s.rates[key] * dt))))
            for key in ("gnss_hz", "lidar_hz", "telemetry_hz")
        }
        self._bus_every = max(1, int(round(s.rates["bus_recovery_s"] / dt)))
        self.log.append(0.0, "start", scenario=s.name, seed=self.seed)

    # -- external interface (bridge) -----------------------------------------

    @property
    def t(self) -> float:
        return self.tick_index * self.scenario.dt

    @property
    def finished(self) -> bool:
        return self.exit_reason is not None

    def station_distance(self) -> float:
        sx, sy = self.scenario.station_xy
        return math.hypot(self.truth.x - sx, self.truth.y - sy)

    def submit(self, msg: tm.Message, seq: int, deliver_at: float) -> None:
        """Queue an uplink message for application once sim time reaches its
        delivery instant; duplicate sequence numbers are discarded."""
        if not self.rx_channel.accept(seq):
            self.log.append(self.t, "uplink_duplicate", seq=seq)
            return
        self._inbound.append((deliver_at, seq, msg))

    # -- main loop ------------------------------------------------------------

    def step(self) -> bool:
        """Advance one tick; returns False once the run has terminated."""
        if self.finished:
            return False
        s = self.scenario
        dt = s.dt
        self.tick_index += 1
        t = self.t
        self.bb.t = t

        self._apply_inbound(t)
        if self.tick_index % self._bus_every == 0:
            for ev in sp.bus_recovery(self.bb.sampler):
                self.log.append(t, "sampler_event", event=ev.kind,
                                module=ev.module, motor=ev.motor, **ev.data)

        # sensors (read the pre-step truth)
        imu = self._imu_sample(dt)
        self.est = loc.predict(self.est, imu, self.Q)
        if self.tick_index % self._every["gnss_hz"] == 0:
            self._gnss_update()
        if self.tick_index % self._every["lidar_hz"] == 0:
            self._roi_update()
        self.bb.est_pose = self.est.pose
        self.bb.true_pose = self.truth.pose

        # mission tick and command arbitration
        status = self.executor.tick()
        cmd = self.executor.command(s.vehicle)
        targets = vh.mix(cmd, s.vehicle.B)

        # plant
        self.truth = vh.step_dynamics(
            self.truth, targets, s.vehicle, self.disturbance, dt, self.rng_disturbance
        )
        sampler_events = sp.step_sampler(self.bb.sampler, dt, s.faults, self.rng_sampler)
        self.bb.sampler_events = sampler_events
        for ev in sampler_events:
            self.log.append(t, "sampler_event", event=ev.kind,
                            module=ev.module, motor=ev.motor, **ev.data)

        solar_w = s.power.solar_peak_w * s.solar_irradiance
        self.power_state = pw.step_power(self.power_state, s.load, s.power, solar_w, dt)

        if self.tick_index % self._every["telemetry_hz"] == 0:
            self._emit_telemetry(t, cmd, targets)

        # termination
        if self.power_state.depleted:
            self._finish(t, "depleted")
        elif status is ms.Status.SUCCESS:
            self._finish(t, "mission_success")
        elif status is ms.Status.FAILURE:
            self._finish(t, "mission_failure")
        elif t >= s.max_duration_s:
            self._finish(t, "max_duration")
        return not self.finished

    def run(self) -> tuple[SimLog, dict]:
        while self.step():
            pass
        return self.log, compute_metrics(self.log)

    # -- internals ------------------------------------------------------------

    def _imu_sample(self, dt: float) -> loc.ImuSample:
        s = self.scenario
        yaw_rate = (self.truth.v_r_actual - self.truth.v_l_actual) / s.vehicle.B
        accel = (self.truth.body_speed - self._prev_body_speed) / dt
        self._prev_body_speed = self.truth.body_speed
        if s.noise["imu_yaw_sigma"] > 0:
            yaw_rate += float(self.rng_imu.normal(0, s.noise["imu_yaw_sigma"]))
        if s.noise["imu_accel_sigma"] > 0:
            accel += float(self.rng_imu.normal(0, s.noise["imu_accel_sigma"]))
        return loc.ImuSample(yaw_rate=yaw_rate, forward_accel=accel, dt=dt)

    def _gnss_update(self) -> None:
        s = self.scenario
        sigma = s.noise["gnss_sigma_m"]
        z = np.array([self.truth.x, self.truth.y])
        if sigma > 0:
            z = z + self.rng_gnss.normal(0.0, sigma, size=2)
        R = np.eye(2) * max(sigma, 1e-6) ** 2
        self.est = loc.update_gnss(self.est, loc.GnssFix(z=z, R=R))
        if s.noise["heading_sigma"] > 0:
            theta = self.truth.theta + float(
                self.rng_imu.normal(0, s.noise["heading_sigma"])
            )
            self.est = loc.update_heading(self.est, theta, s.noise["heading_sigma"])

    def _roi_update(self) -> None:
        s = self.scenario
        col, row = s.grid.world_to_cell(self.truth.x, self.truth.y)
        if not s.grid.in_bounds(col, row):
            self.bb.roi_flag = False
            return
        # the distance field bounds any possible hit; skip the fan when the
        # nearest obstacle cannot be inside the trigger radius
        clearance = float(self.bb.dfield[row, col])
        if clearance > s.roi_threshold_m + 1.5 * s.grid.resolution:
            self.bb.roi_flag = False
            return
        out = vh.roi_obstacle(
            self.truth.pose, s.grid, s.roi_halfwidth_m, s.roi_threshold_m
        )
        self.bb.roi_flag = out["flag"]

    def _apply_inbound(self, t: float) -> None:
        due = [item for item in self._inbound if item[0] <= t]
        self._inbound = [item for item in self._inbound if item[0] > t]
        for _, seq, msg in sorted(due, key=lambda item: (item[0], item[1])):
            if isinstance(msg, tm.EStop):
                self.executor.set_estop(msg.engage)
                self.log.append(t, "uplink", type="estop", engage=msg.engage, seq=seq)
            elif isinstance(msg, tm.Command):
                mode = ms.Mode.AUTO if msg.mode == tm.MODE_AUTO else ms.Mode.MANUAL
                self.executor.set_mode(mode)
                self.executor.state.manual_cmd = vh.VelocityCommand(msg.v_x, msg.w_z)
                self.log.append(t, "uplink", type="command", mode=msg.mode,
                                v_x=msg.v_x, w_z=msg.w_z, seq=seq)
            elif isinstance(msg, sp.MotorCommand):
                try:
                    sp.apply_command(self.bb.sampler, msg)
                    self.log.append(t, "uplink", type="motor_command", seq=seq,
                                    module=msg.module, motor=msg.motor,
                                    action=int(msg.action))
                except (EStopLatched, ExpanderUnresponsive) as exc:
                    self.log.append(t, "uplink_rejected", type="motor_command",
                                    seq=seq, reason=type(exc).__name__)

    def _emit_telemetry(self, t: float, cmd: vh.VelocityCommand, targets) -> None:
        s = self.scenario
        msg = tm.Telemetry(
            x=self.truth.x, y=self.truth.y, theta=self.truth.theta,
            v=self.power_state.v, i=self.power_state.i, soc=self.power_state.soc_wh,
            mission_state={"running": 0, "success": 1, "failure": 2}[
                self.executor.state.status.value
            ],
            motor_bitmap=sp.motor_activity_bitmap(self.bb.sampler),
        )
        self._transmit(t, msg)
        while self._emitted_samples < len(self.bb.sample_records):
            rec = self.bb.sample_records[self._emitted_samples]
            self._emitted_samples += 1
            self._transmit(
                t,
                tm.SampleRecordMsg(
                    label=rec["label"], volume_ml=rec["volume_ml"],
                    t_start=rec["t_start"], t_end=rec["t_end"],
                    lat=rec["lat"], lon=rec["lon"],
                ),
            )
        self.log.append(
            t, "state",
            true=[round(v, 6) for v in self.truth.pose],
            est=[round(v, 6) for v in self.est.pose],
            cmd=[round(cmd.v_x, 6), round(cmd.w_z, 6)],
            thrusters=[round(targets[0], 6), round(targets[1], 6)],
            soc_wh=round(self.power_state.soc_wh, 6),
            v=round(self.power_state.v, 6),
            i=round(self.power_state.i, 6),
            mode=self.executor.state.mode.value,
            wp=self.executor.current_wp,
        )

    def _transmit(self, t: float, msg: tm.Message) -> None:
        seq = self.channel.next_seq()
        frame = tm.encode_frame(msg, seq)
        result = tm.link_transmit(frame, self.station_distance(), self.scenario.link,
                                  self.rng_link)
        self.tx_stats["sent"] += 1
        payload = None
        if result.delivered:
            self.tx_stats["delivered"] += 1
            payload = {
                "seq": seq, "t": round(t, 6),
                "latency_s": round(result.latency_s, 6),
                **tm.message_to_dict(msg),
            }
            self.outbox.append((t + result.latency_s, payload))
        else:
            self.tx_stats["dropped"] += 1
        self.log.append(t, "telemetry_tx", seq=seq, size=len(frame),
                        delivered=result.delivered,
                        latency_s=None if result.latency_s is None
                        else round(result.latency_s, 6),
                        msg=payload)

    def _finish(self, t: float, reason: str) -> None:
        self.exit_reason = reason
        samples = []
        for rec in self.bb.sample_records:
            final = dict(rec)
            label = rec["label"]
            for syringe in self.bb.sampler.syringes:
                if syringe.label == label:
                    final["volume_ml"] = syringe.volume_ml
                    break
            samples.append(final)
        self.log.append(t, "mission_events", events=self.bb.events)
        self.log.append(
            t, "end", reason=reason, duration_s=round(t, 6),
            waypoint_errors=[round(e, 6) for e in self.bb.waypoint_errors],
            hit_threshold_m=self.scenario.controller.wp_hit_threshold,
            samples=samples, tx=self.tx_stats,
            capacity_ml=self.scenario.sampler.capacity_ml,
        )


def run(scenario: Scenario, seed: int | None = None) -> tuple[SimLog, dict]:
    return Simulation(scenario, seed=seed).run()


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def compute_metrics(log: SimLog) -> dict:
    """Pure function of the log, so `metrics` on a stored log reproduces the
    run's own report."""
    end = log.of_kind("end")
    if not end:
        raise LogCorrupt("log has no terminal record")
    end = end[0]
    waypoints = None
    if end["waypoint_errors"]:
        waypoints = ms.waypoint_metrics(end["waypoint_errors"], end["hit_threshold_m"])
    samples = end["samples"]
    aggregate = aggregate_table4(samples, capacity_ml=end.get("capacity_ml", 45.0)) \
        if samples else None
    return {
        "exit_reason": end["reason"],
        "duration_s": end["duration_s"],
        "endurance_realized_s": end["duration_s"] if end["reason"] == "depleted" else None,
        "waypoints": waypoints,
        "n_samples": len(samples),
        "samples": samples,
        "aggregate": aggregate,
        "telemetry": end["tx"],
    }


_QUALITY_KEYS = ("temperature_c", "ph", "tds_mg_l", "ec_us_cm")


def aggregate_table4(
    records: list[dict], capacity_ml: float = 45.0, baseline_s: float = 130.0
) -> dict:
    """Per-motor-group and global means over per-syringe sample records.

    Semantics mirror the field campaign's reporting: group quality means
    spread over the full group size with absent readings contributing zero,
    while the global quality row averages only the present readings.
    Volume loss and time error fall back to derivation from volume/capacity
    and fill time/baseline when not supplied with the record.
    """
    if not records:
        raise ValueError("no records to aggregate")
    groups: dict[str, list[dict]] = {}
    for rec in records:
        key = rec.get("group") or rec["label"].split("_")[0]
        groups.setdefault(key, []).append(rec)

    def loss(rec) -> float:
        if rec.get("volume_loss_pct") is not None:
            return rec["volume_loss_pct"]
        return (capacity_ml - rec["volume_ml"]) / capacity_ml * 100.0

    def time_err(rec) -> float | None:
        if rec.get("time_error_pct") is not None:
            return rec["time_error_pct"]
        if rec.get("fill_time_s") is None:
            return None
        return (rec["fill_time_s"] - baseline_s) / baseline_s * 100.0

    rows = []
    for key in sorted(groups):
        members = groups[key]
        row = {
            "group": key,
            "n": len(members),
            "fill_time_s": _mean([m.get("fill_time_s") for m in members], present_only=True),
            "time_error_pct": _mean([time_err(m) for m in members], present_only=True),
            "volume_ml": _mean([m["volume_ml"] for m in members]),
            "volume_loss_pct": _mean([loss(m) for m in members]),
        }
        for q in _QUALITY_KEYS:
            values = [m.get(q) for m in members]
            if any(v is not None for v in values):
                row[q] = _mean([0.0 if v is None else v for v in values])
        rows.append(row)

    overall = {
        "group": "all",
        "n": len(records),
        "fill_time_s": _mean([r["fill_time_s"] for r in rows], present_only=True),
        "time_error_pct": _mean([r["time_error_pct"] for r in rows], present_only=True),
        "volume_ml": _mean([r["volume_ml"] for r in records]),
        "volume_loss_pct": _mean([loss(r) for r in records]),
    }
    for q in _QUALITY_KEYS:
        values = [r.get(q) for r in records]
        if any(v is not None for v in values):
            overall[q] = _mean(values, present_only=True)
    return {"groups": rows, "global": overall}


def _mean(values: list, present_only: bool = False) -> float | None:
    if present_only:
        values = [v for v in values if v is not None]
    if not values:
        return None
    return float(np.mean(values))


def export_state_csv(log: SimLog, path: str | Path) -> None:
    """Time series of the 1 Hz state snapshots."""
    rows = log.of_kind("state")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "t", "true_x", "true_y", "true_theta", "est_x", "est_y", "est_theta",
            "cmd_vx", "cmd_wz", "thrust_l", "thrust_r", "soc_wh", "v", "i", "mode", "wp",
        ])
        for r in rows:
            writer.writerow([
                r["t"], *r["true"], *r["est"], *r["cmd"], *r["thrusters"],
                r["soc_wh"], r["v"], r["i"], r["mode"], r["wp"],
            ])
