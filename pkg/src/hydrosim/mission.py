"""Mission executor: a behavior tree sequencing plan -> follow -> sample per
waypoint, with obstacle-triggered replanning, mode arbitration, and waypoint
scoring.

Tree shape per waypoint:

    Sequence[ PlanPath,
              Fallback[ FollowPath, Sequence[ Replan, FollowPath ] ],
              CollectSample?,   (only when the waypoint carries an assignment)
              Hold?,            (only when hold_s > 0)
              ReportStatus ]

Nodes follow standard tick semantics: Sequence fails fast, Fallback succeeds
fast, RUNNING pins the active child across ticks, and a finished node resets
so the next visit starts fresh.  Replanning always starts from the estimated
pose, never ground truth; truth enters only through the metrics tap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DuplicateMotorAssignment, EmptyLog, ExpanderUnresponsive
from .localization import normalize_heading
from .planner import PlannerParams, Trajectory, hybrid_astar
from .sampler import (
    MotorAction,
    MotorCommand,
    SamplerState,
    apply_command,
    emergency_stop,
    motor_label,
)
from .vehicle import VelocityCommand, VehicleParams
from .worldmap import GeoPoint, LocalFrame, OccupancyGrid, geo_to_local, local_to_geo
from . import errors


class Status(Enum):
    RUNNING = "running"
    SUCCESS = "success"
    FAILURE = "failure"


class Mode(Enum):
    AUTO = "auto"
    MANUAL = "manual"
    ESTOPPED = "estopped"


# ---------------------------------------------------------------------------
# behavior tree core
# ---------------------------------------------------------------------------


class BTNode:
    name = "node"

    def tick(self, bb) -> Status:
        raise NotImplementedError

    def reset(self) -> None:
        pass


class Sequence(BTNode):
    def __init__(self, children: list[BTNode], name: str = "sequence"):
        self.children = children
        self.name = name
        self._cursor = 0

    def tick(self, bb) -> Status:
        while self._cursor < len(self.children):
            status = self.children[self._cursor].tick(bb)
            if status is Status.RUNNING:
                return Status.RUNNING
            if status is Status.FAILURE:
                self.reset()
                return Status.FAILURE
            self._cursor += 1
        self.reset()
        return Status.SUCCESS

    def reset(self) -> None:
        self._cursor = 0
        for child in self.children:
            child.reset()

    @property
    def cursor(self) -> int:
        return self._cursor


class Fallback(BTNode):
    def __init__(self, children: list[BTNode], name: str = "fallback"):
        self.children = children
        self.name = name
        self._cursor = 0

    def tick(self, bb) -> Status:
        while self._cursor < len(self.children):
            status = self.children[self._cursor].tick(bb)
            if status is Status.RUNNING:
                return Status.RUNNING
            if status is Status.SUCCESS:
                self.reset()
                return Status.SUCCESS
            self._cursor += 1
        self.reset()
        return Status.FAILURE

    def reset(self) -> None:
        self._cursor = 0
        for child in self.children:
            child.reset()


class Action(BTNode):
    def __init__(self, fn, name: str = "action"):
        self._fn = fn
        self.name = name

    def tick(self, bb) -> Status:
        return self._fn(bb)


class Condition(BTNode):
    """Leaf wrapping a read-only predicate; must not mutate the blackboard."""

    def __init__(self, fn, name: str = "condition"):
        self._fn = fn
        self.name = name

    def tick(self, bb) -> Status:
        return Status.SUCCESS if self._fn(bb) else Status.FAILURE


def tick(tree: BTNode, bb) -> Status:
    return tree.tick(bb)


def obstacle_guard(roi_flag: bool) -> Status:
    """Corridor-clear condition: a raised flag fails the active follow so
    the surrounding fallback replans."""
    return Status.FAILURE if roi_flag else Status.SUCCESS


# ---------------------------------------------------------------------------
# mission plan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Waypoint:
    geo: GeoPoint
    sampling: tuple[int, int] | None = None  # (module, motor)
    hold_s: float = 0.0


@dataclass(frozen=True)
class MissionPlan:
    waypoints: tuple[Waypoint, ...]

    def __post_init__(self):
        assigned = [w.sampling for w in self.waypoints if w.sampling is not None]
        if len(assigned) > 24:
            raise DuplicateMotorAssignment("more sampling assignments than motors")
        if len(set(assigned)) != len(assigned):
            dupes = {a for a in assigned if assigned.count(a) > 1}
            raise DuplicateMotorAssignment(f"motor(s) assigned twice: {sorted(dupes)}")

    @classmethod
    def from_dict(cls, doc: dict) -> "MissionPlan":
        wps = []
        for w in doc["waypoints"]:
            sampling = None
            if w.get("module") is not None and w.get("motor") is not None:
                module = w["module"]
                if isinstance(module, str):
                    module = "ABCDEF".index(module.upper())
                sampling = (int(module), int(w["motor"]))
            wps.append(
                Waypoint(
                    geo=GeoPoint(float(w["lat"]), float(w["lon"])),
                    sampling=sampling,
                    hold_s=float(w.get("hold_s", 0.0)),
                )
            )
        return cls(waypoints=tuple(wps))


@dataclass(frozen=True)
class ControllerParams:
    lookahead: float = 2.0
    k_heading: float = 1.5
    v_cruise: float = 1.0
    arrival_radius: float = 0.08
    wp_hit_threshold: float = 0.10
    slow_radius: float = 3.0
    v_floor: float = 0.12

    def __post_init__(self):
        if self.lookahead <= 0 or self.arrival_radius <= 0:
            raise ValueError("lookahead and arrival radius must be positive")


@dataclass(frozen=True)
class ControllerOutput:
    cmd: VelocityCommand
    arrived: bool
    index: int  # progress index along the trajectory


def follow_controller(
    pose: tuple[float, float, float],
    traj: Trajectory,
    params: ControllerParams,
    from_index: int = 0,
) -> ControllerOutput:
    """Pure pursuit toward the path point one lookahead ahead of the nearest
    trajectory point; speed tapers near the end and zeroes on arrival."""
    pts = traj.poses[:, :2]
    if len(pts) == 0:
        raise ValueError("trajectory is empty")
    x, y, theta = pose
    end = pts[-1]
    dist_to_end = math.hypot(end[0] - x, end[1] - y)
    if dist_to_end <= params.arrival_radius:
        return ControllerOutput(VelocityCommand(0.0, 0.0), True, len(pts) - 1)

    window = pts[from_index:]
    nearest = from_index + int(
        np.argmin(np.hypot(window[:, 0] - x, window[:, 1] - y))
    )
    target = pts[-1]
    travelled = 0.0
    for i in range(nearest, len(pts) - 1):
        travelled += math.hypot(*(pts[i + 1] - pts[i]))
        if travelled >= params.lookahead:
            target = pts[i + 1]
            break
    heading_err = normalize_heading(math.atan2(target[1] - y, target[0] - x) - theta)
    w_z = params.k_heading * heading_err
    v = params.v_cruise * min(1.0, dist_to_end / params.slow_radius)
    if abs(heading_err) > math.pi / 3:
        v = min(v, params.v_floor)  # turn toward the path before committing
    v = max(v, params.v_floor)
    return ControllerOutput(VelocityCommand(v, w_z), False, nearest)


def arbitrate(
    mode: Mode,
    auto_cmd: VelocityCommand,
    manual_cmd: VelocityCommand,
    estop: bool,
    vehicle: VehicleParams,
) -> VelocityCommand:
    """E-stop forces zero; otherwise the mode picks the source, clamped to
    the vehicle limits."""
    if estop or mode is Mode.ESTOPPED:
        return VelocityCommand(0.0, 0.0)
    cmd = manual_cmd if mode is Mode.MANUAL else auto_cmd
    return cmd.clamped(vehicle)


def waypoint_metrics(errors_m: list[float], hit_threshold: float = 0.10) -> dict:
    """Score per-waypoint final position errors.

    precision = share of waypoints at or under the hit threshold; mean and
    max run over all attempted waypoints.
    """
    if not errors_m:
        raise EmptyLog("no waypoint records")
    hits = sum(1 for e in errors_m if e <= hit_threshold)
    return {
        "precision_pct": 100.0 * hits / len(errors_m),
        "mean_err_m": float(np.mean(errors_m)),
        "max_err_m": float(np.max(errors_m)),
        "hit_threshold_m": hit_threshold,
        "n_waypoints": len(errors_m),
    }


# ---------------------------------------------------------------------------
# blackboard and leaves
# ---------------------------------------------------------------------------


@dataclass
class Blackboard:
    """Shared state the tree leaves read and write each tick."""

    grid: OccupancyGrid
    frame: LocalFrame
    planner_params: PlannerParams
    controller_params: ControllerParams
    sampler: SamplerState
    dfield: np.ndarray | None = None
    t: float = 0.0
    est_pose: tuple[float, float, float] = (0.0, 0.0, 0.0)
    true_pose: tuple[float, float, float] = (0.0, 0.0, 0.0)  # metrics tap only
    roi_flag: bool = False
    replan_enabled: bool = True
    auto_cmd: VelocityCommand = VelocityCommand(0.0, 0.0)
    active_traj: Trajectory | None = None
    follow_index: int = 0
    sampler_events: list = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    waypoint_errors: list[float] = field(default_factory=list)
    sample_records: list[dict] = field(default_factory=list)
    sample_retry_timeout_s: float = 30.0

    def log(self, kind: str, **data) -> None:
        self.events.append({"t": self.t, "kind": kind, **data})


def _plan_to(bb: Blackboard, target_xy: tuple[float, float], wp_index: int, kind: str) -> Status:
    start = bb.est_pose
    goal = (target_xy[0], target_xy[1], 0.0)
    try:
        traj = hybrid_astar(bb.grid, start, goal, bb.planner_params, bb.dfield)
    except (errors.NoPath, errors.StartOccupied, errors.GoalOccupied) as exc:
        bb.log("plan_failed", waypoint=wp_index, reason=type(exc).__name__)
        return Status.FAILURE
    # snap the tail onto the exact waypoint so the follower homes to it
    # rather than to the planner's goal tolerance
    tail = np.array([[target_xy[0], target_xy[1], traj.poses[-1, 2]]])
    if math.hypot(*(traj.poses[-1, :2] - tail[0, :2])) > 1e-9:
        poses = np.vstack([traj.poses, tail])
        traj = Trajectory(
            poses=poses,
            curvatures=np.append(traj.curvatures, 0.0),
            total_cost=traj.total_cost,
        )
    bb.active_traj = traj
    bb.follow_index = 0
    bb.log(kind, waypoint=wp_index, path_len=traj.length, cost=traj.total_cost)
    return Status.SUCCESS


class PlanPath(Action):
    def __init__(self, wp_index: int, target_xy: tuple[float, float], kind: str = "plan"):
        self.wp_index = wp_index
        self.target_xy = target_xy
        self.name = f"{kind}[{wp_index}]"
        self._kind = kind

    def tick(self, bb: Blackboard) -> Status:
        if self._kind == "replan" and not bb.replan_enabled:
            bb.log("replan_disabled", waypoint=self.wp_index)
            return Status.FAILURE
        return _plan_to(bb, self.target_xy, self.wp_index, self._kind)


class FollowPath(Action):
    """Drive the active trajectory; fails on a raised corridor flag.

    The post-replan instance starts disarmed and arms once the corridor has
    cleared, so the flag that caused the replan doesn't instantly fail the
    recovery it triggered.
    """

    def __init__(self, wp_index: int, rearm_on_clear: bool = False):
        self.wp_index = wp_index
        self.rearm_on_clear = rearm_on_clear
        self._armed = not rearm_on_clear
        self.name = f"follow[{wp_index}]"

    def reset(self) -> None:
        self._armed = not self.rearm_on_clear

    def tick(self, bb: Blackboard) -> Status:
        if bb.active_traj is None:
            return Status.FAILURE
        if not bb.roi_flag:
            self._armed = True
        if self._armed and obstacle_guard(bb.roi_flag) is Status.FAILURE:
            bb.log("obstacle_trigger", waypoint=self.wp_index)
            bb.auto_cmd = VelocityCommand(0.0, 0.0)
            return Status.FAILURE
        out = follow_controller(
            bb.est_pose, bb.active_traj, bb.controller_params, bb.follow_index
        )
        bb.follow_index = out.index
        bb.auto_cmd = out.cmd
        if out.arrived:
            err = math.hypot(
                bb.true_pose[0] - bb.active_traj.poses[-1, 0],
                bb.true_pose[1] - bb.active_traj.poses[-1, 1],
            )
            bb.waypoint_errors.append(err)
            bb.log("waypoint_arrived", waypoint=self.wp_index, true_error_m=err)
            return Status.SUCCESS
        return Status.RUNNING


class CollectSample(Action):
    def __init__(self, wp_index: int, module: int, motor: int):
        self.wp_index = wp_index
        self.module = module
        self.motor = motor
        self.name = f"collect[{motor_label(module, motor)}]"
        self._started_at: float | None = None
        self._sent = False
        self._t_start: float | None = None

    def reset(self) -> None:
        self._started_at = None
        self._sent = False
        self._t_start = None

    def tick(self, bb: Blackboard) -> Status:
        bb.auto_cmd = VelocityCommand(0.0, 0.0)  # hold position while sampling
        if self._started_at is None:
            self._started_at = bb.t
        if not self._sent:
            try:
                apply_command(
                    bb.sampler, MotorCommand(self.module, self.motor, MotorAction.FORWARD)
                )
            except ExpanderUnresponsive:
                bb.log("sample_command_dropped", waypoint=self.wp_index,
                       module=self.module, motor=self.motor)
                if bb.t - self._started_at > bb.sample_retry_timeout_s:
                    return Status.FAILURE
                return Status.RUNNING  # bus recovery will restore the expander
            self._sent = True
            self._t_start = bb.t
            bb.log("sample_started", waypoint=self.wp_index,
                   module=self.module, motor=self.motor)
        for ev in bb.sampler_events:
            if ev.module != self.module or ev.motor != self.motor:
                continue
            if ev.kind == "cycle_complete":
                self._record(bb, ev)
                return Status.SUCCESS
            if ev.kind == "switch_timeout":
                bb.log("sample_switch_timeout", waypoint=self.wp_index,
                       module=self.module, motor=self.motor)
                return Status.FAILURE
        return Status.RUNNING

    def _record(self, bb: Blackboard, ev) -> None:
        geo = local_to_geo(bb.frame, bb.est_pose[0], bb.est_pose[1])
        for s in bb.sampler.motor_syringes(self.module, self.motor):
            bb.sample_records.append(
                {
                    "label": s.label,
                    "volume_ml": s.volume_ml,
                    "t_start": self._t_start,
                    "t_end": ev.t,
                    "fill_time_s": ev.data["duration_s"],
                    "lat": geo.lat,
                    "lon": geo.lon,
                    "waypoint": self.wp_index,
                }
            )
        bb.log("sample_complete", waypoint=self.wp_index,
               module=self.module, motor=self.motor, duration_s=ev.data["duration_s"])


class Hold(Action):
    def __init__(self, wp_index: int, hold_s: float):
        self.wp_index = wp_index
        self.hold_s = hold_s
        self.name = f"hold[{wp_index}]"
        self._until: float | None = None

    def reset(self) -> None:
        self._until = None

    def tick(self, bb: Blackboard) -> Status:
        bb.auto_cmd = VelocityCommand(0.0, 0.0)
        if self._until is None:
            self._until = bb.t + self.hold_s
        return Status.SUCCESS if bb.t >= self._until else Status.RUNNING


class ReportStatus(Action):
    def __init__(self, wp_index: int):
        self.wp_index = wp_index
        self.name = f"report[{wp_index}]"

    def tick(self, bb: Blackboard) -> Status:
        bb.log("waypoint_done", waypoint=self.wp_index)
        return Status.SUCCESS


def build_mission_tree(plan: MissionPlan, frame: LocalFrame) -> Sequence:
    """Root sequence over waypoint subtrees (see module docstring)."""
    subtrees: list[BTNode] = []
    for i, wp in enumerate(plan.waypoints):
        target = geo_to_local(frame, wp.geo)
        children: list[BTNode] = [
            PlanPath(i, target),
            Fallback(
                [
                    FollowPath(i),
                    Sequence(
                        [PlanPath(i, target, kind="replan"),
                         FollowPath(i, rearm_on_clear=True)],
                        name=f"recover[{i}]",
                    ),
                ],
                name=f"drive[{i}]",
            ),
        ]
        if wp.sampling is not None:
            children.append(CollectSample(i, *wp.sampling))
        if wp.hold_s > 0:
            children.append(Hold(i, wp.hold_s))
        children.append(ReportStatus(i))
        subtrees.append(Sequence(children, name=f"waypoint[{i}]"))
    return Sequence(subtrees, name="mission")


# ---------------------------------------------------------------------------
# executor
# ---------------------------------------------------------------------------


@dataclass
class MissionState:
    mode: Mode = Mode.AUTO
    status: Status = Status.RUNNING
    manual_cmd: VelocityCommand = VelocityCommand(0.0, 0.0)
    estop: bool = False


class MissionExecutor:
    """Drives the tree on the simulation clock and arbitrates command
    sources.  Manual mode and e-stop pause the tree without losing mission
    progress."""

    def __init__(self, plan: MissionPlan, bb: Blackboard):
        self.plan = plan
        self.bb = bb
        self.tree = build_mission_tree(plan, bb.frame)
        self.state = MissionState()

    @property
    def current_wp(self) -> int:
        return self.tree.cursor

    def set_mode(self, mode: Mode) -> None:
        if self.state.estop and mode is not Mode.ESTOPPED:
            return  # disengage the latch first
        self.state.mode = mode
        self.bb.log("mode", mode=mode.value)

    def set_estop(self, engage: bool) -> None:
        self.state.estop = engage
        emergency_stop(self.bb.sampler, engage)
        if engage:
            self.state.mode = Mode.ESTOPPED
        elif self.state.mode is Mode.ESTOPPED:
            self.state.mode = Mode.MANUAL
        self.bb.log("estop", engage=engage)

    def tick(self) -> Status:
        if self.state.status is not Status.RUNNING:
            return self.state.status
        if self.state.mode is not Mode.AUTO:
            self.bb.auto_cmd = VelocityCommand(0.0, 0.0)
            return Status.RUNNING
        result = self.tree.tick(self.bb)
        if result is not Status.RUNNING:
            self.state.status = result
            self.bb.log("mission_end", status=result.value)
        return self.state.status

    def command(self, vehicle: VehicleParams) -> VelocityCommand:
        return arbitrate(
            self.state.mode, self.bb.auto_cmd, self.state.manual_cmd,
            self.state.estop, vehicle,
        )
