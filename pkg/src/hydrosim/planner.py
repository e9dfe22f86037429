"""Global planning: hybrid A* over (x, y, heading) with motion primitives.

Successors integrate the differential-thrust kinematic model (steering angle
-> heading rate v/L * tan(delta)); each step is scored by a composite of
obstacle distance, squared curvature, and squared heading change.  Two
scoring modes exist for the distance term:

- AS_WRITTEN:   cost += w_d * d            (d = distance to nearest obstacle)
- CLEARANCE_PENALTY: cost += w_d * max(0, d_safe - d)

AS_WRITTEN rewards hugging obstacles when minimized literally, so
CLEARANCE_PENALTY is the default; AS_WRITTEN is retained for fidelity tests.

Planning calls are synchronous and reentrant over read-only grids.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import ndimage

from .errors import AllOccupied, GoalOccupied, NoPath, StartOccupied
from .localization import normalize_heading
from .worldmap import OccupancyGrid


class ClearanceMode(Enum):
    AS_WRITTEN = "as_written"
    CLEARANCE_PENALTY = "clearance_penalty"


@dataclass(frozen=True)
class PlannerParams:
    """Weights, motion primitives, and termination tolerances.

    `steer_set` holds forward steering angles only; reverse primitives are
    not generated.  `L` defaults to the thruster separation of the vehicle
    it plans for.
    """

    w_d: float = 1.0
    w_kappa: float = 10.0
    w_s: float = 1.0
    steer_set: tuple[float, ...] = (0.0, 0.15, -0.15, 0.3, -0.3)
    step_length: float = 0.5
    v: float = 1.0
    L: float = 0.8
    heading_bins: int = 36
    goal_xy_tol: float = 0.5
    goal_theta_tol: float = math.pi
    clearance_mode: ClearanceMode = ClearanceMode.CLEARANCE_PENALTY
    d_safe: float = 3.0
    footprint_radius: float = 0.8
    max_expansions: int = 500_000

    def __post_init__(self):
        if min(self.w_d, self.w_kappa, self.w_s) < 0:
            raise ValueError("cost weights must be >= 0")
        if self.step_length <= 0:
            raise ValueError("step_length must be > 0")
        if self.heading_bins < 8:
            raise ValueError("heading_bins must be >= 8")
        if any(abs(d) >= math.pi / 2 for d in self.steer_set):
            raise ValueError("steering angles must satisfy |delta| < pi/2")

    @property
    def max_curvature(self) -> float:
        return max(abs(math.tan(d)) for d in self.steer_set) / self.L


@dataclass(frozen=True)
class Trajectory:
    """Ordered poses with per-segment curvature and the accumulated cost."""

    poses: np.ndarray  # (N, 3) of x, y, heading
    curvatures: np.ndarray  # (N-1,)
    total_cost: float

    def __len__(self) -> int:
        return len(self.poses)

    @property
    def length(self) -> float:
        if len(self.poses) < 2:
            return 0.0
        return float(np.sum(np.hypot(*np.diff(self.poses[:, :2], axis=0).T)))

    def heading_change_sum(self) -> float:
        """Total turning along the polyline: summed |heading change|
        between consecutive chords."""
        return segment_heading_change_sum(self.poses[:, :2])


def segment_heading_change_sum(points: np.ndarray) -> float:
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        return 0.0
    seg = np.diff(pts, axis=0)
    headings = np.arctan2(seg[:, 1], seg[:, 0])
    d = np.diff(headings)
    return float(np.sum(np.abs((d + math.pi) % (2 * math.pi) - math.pi)))


# ---------------------------------------------------------------------------
# distance field
# ---------------------------------------------------------------------------


def distance_field(grid: OccupancyGrid) -> np.ndarray:
    """Exact per-cell Euclidean distance to the nearest blocked cell, meters.

    Blocked cells read 0.  A grid with no obstacles reads the grid diagonal
    everywhere (the "no obstacle anywhere" sentinel).
    """
    blocked = grid.occupied_mask()
    if blocked.all():
        raise AllOccupied("no free cell in grid")
    cap = math.hypot(grid.width, grid.height) * grid.resolution
    if not blocked.any():
        return np.full((grid.height, grid.width), cap)
    dist = ndimage.distance_transform_edt(~blocked) * grid.resolution
    return np.minimum(dist, cap)


# ---------------------------------------------------------------------------
# primitives and cost
# ---------------------------------------------------------------------------


def successors(
    pose: tuple[float, float, float], params: PlannerParams
) -> list[tuple[tuple[float, float, float], float, float]]:
    """Expand one pose through every steering primitive.

    Integration is a single Euler step of the kinematic model over
    dt = step_length / v: position advances along the heading at the start
    of the segment, heading advances by v/L * tan(delta) * dt.
    Returns (pose', curvature, heading_change) per primitive.
    """
    x, y, theta = pose
    ds = params.step_length
    out = []
    for delta in params.steer_set:
        kappa = math.tan(delta) / params.L
        dtheta = ds * kappa  # (v/L) tan(delta) * (ds/v)
        nxt = (
            x + ds * math.cos(theta),
            y + ds * math.sin(theta),
            normalize_heading(theta + dtheta),
        )
        out.append((nxt, kappa, dtheta))
    return out


def step_cost(d: float, kappa: float, dtheta: float, params: PlannerParams) -> float:
    """Composite per-step cost; `d` is the obstacle distance at the state."""
    if d < 0:
        raise ValueError("obstacle distance must be >= 0")
    if params.clearance_mode is ClearanceMode.AS_WRITTEN:
        d_term = params.w_d * d
    else:
        d_term = params.w_d * max(0.0, params.d_safe - d)
    return d_term + params.w_kappa * kappa**2 + params.w_s * dtheta**2


# ---------------------------------------------------------------------------
# collision model
# ---------------------------------------------------------------------------


def footprint_blocked(grid: OccupancyGrid, x: float, y: float, radius: float) -> bool:
    """Disk footprint test: the containing cell plus every cell whose center
    lies within `radius` of the point must be Free."""
    col, row = grid.world_to_cell(x, y)
    if grid.is_blocked(col, row):
        return True
    if radius <= 0:
        return False
    span = int(math.ceil(radius / grid.resolution)) + 1
    res = grid.resolution
    for dr in range(-span, span + 1):
        for dc in range(-span, span + 1):
            cc, rr = col + dc, row + dr
            cx = grid.origin.x + (cc + 0.5) * res
            cy = grid.origin.y + (rr + 0.5) * res
            if (cx - x) ** 2 + (cy - y) ** 2 <= radius**2 and grid.is_blocked(cc, rr):
                return True
    return False


def segment_blocked(
    grid: OccupancyGrid,
    p0: tuple[float, float],
    p1: tuple[float, float],
    radius: float,
) -> bool:
    """Check footprints along p0->p1 at spacing <= half a cell (endpoint
    included, start pose assumed already checked)."""
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    dist = math.hypot(dx, dy)
    steps = max(1, int(math.ceil(dist / (0.5 * grid.resolution))))
    for k in range(1, steps + 1):
        t = k / steps
        if footprint_blocked(grid, p0[0] + t * dx, p0[1] + t * dy, radius):
            return True
    return False


def goal_reached(
    pose: tuple[float, float, float], goal: tuple[float, float, float], params: PlannerParams
) -> bool:
    if math.hypot(pose[0] - goal[0], pose[1] - goal[1]) > params.goal_xy_tol:
        return False
    return abs(normalize_heading(pose[2] - goal[2])) <= params.goal_theta_tol


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


def _state_key(
    pose: tuple[float, float, float], grid: OccupancyGrid, bins: int
) -> tuple[int, int, int]:
    col, row = grid.world_to_cell(pose[0], pose[1])
    # heading bins are centered on multiples of the bin width so headings
    # sitting exactly on a multiple don't flap between bins
    hbin = int(round(pose[2] / (2 * math.pi / bins))) % bins
    return col, row, hbin


def hybrid_astar(
    grid: OccupancyGrid,
    start: tuple[float, float, float],
    goal: tuple[float, float, float],
    params: PlannerParams | None = None,
    dfield: np.ndarray | None = None,
) -> Trajectory:
    """Search for a kinematically feasible, collision-free trajectory.

    Expands motion primitives best-first on f = g + h with h the Euclidean
    distance to the goal; the closed set is discretized to (cell, heading
    bin).  Ties on f break toward smaller h, then FIFO, which pins the
    expansion order and makes results deterministic.

    Raises StartOccupied / GoalOccupied for blocked endpoints and NoPath
    when the open set (or the expansion budget) is exhausted.
    """
    if params is None:
        params = PlannerParams()
    r = params.footprint_radius
    if footprint_blocked(grid, start[0], start[1], r):
        raise StartOccupied(f"start {start[:2]} blocked")
    if footprint_blocked(grid, goal[0], goal[1], r):
        raise GoalOccupied(f"goal {goal[:2]} blocked")

    start = (start[0], start[1], normalize_heading(start[2]))
    goal = (goal[0], goal[1], normalize_heading(goal[2]))
    if goal_reached(start, goal, params):
        return Trajectory(
            poses=np.array([start]), curvatures=np.zeros(0), total_cost=0.0
        )
    if dfield is None:
        dfield = distance_field(grid)

    def h(pose) -> float:
        return math.hypot(pose[0] - goal[0], pose[1] - goal[1])

    # node records: (x, y, theta, g, parent_index, kappa_of_arriving_step)
    nodes: list[tuple[float, float, float, float, int, float]] = [
        (start[0], start[1], start[2], 0.0, -1, 0.0)
    ]
    h0 = h(start)
    heap: list[tuple[float, float, int, int]] = [(h0, h0, 0, 0)]
    counter = 1
    closed: set[tuple[int, int, int]] = set()
    best_g: dict[tuple[int, int, int], float] = {
        _state_key(start, grid, params.heading_bins): 0.0
    }
    expansions = 0

    while heap:
        _, _, _, idx = heapq.heappop(heap)
        x, y, theta, g, _, _ = nodes[idx]
        key = _state_key((x, y, theta), grid, params.heading_bins)
        if key in closed:
            continue
        closed.add(key)
        if goal_reached((x, y, theta), goal, params):
            return _reconstruct(nodes, idx)
        expansions += 1
        if expansions > params.max_expansions:
            raise NoPath("expansion budget exhausted")
        for (nxt, kappa, dtheta) in successors((x, y, theta), params):
            col, row = grid.world_to_cell(nxt[0], nxt[1])
            if not grid.in_bounds(col, row):
                continue
            if segment_blocked(grid, (x, y), nxt[:2], r):
                continue
            g2 = g + step_cost(float(dfield[row, col]), kappa, dtheta, params)
            key2 = _state_key(nxt, grid, params.heading_bins)
            if key2 in closed:
                continue
            if best_g.get(key2, math.inf) <= g2:
                continue
            best_g[key2] = g2
            nodes.append((nxt[0], nxt[1], nxt[2], g2, idx, kappa))
            h2 = h(nxt)
            heapq.heappush(heap, (g2 + h2, h2, counter, len(nodes) - 1))
            counter += 1
    raise NoPath("open set exhausted")


def _reconstruct(nodes, idx: int) -> Trajectory:
    poses = []
    kappas = []
    total = nodes[idx][3]
    while idx != -1:
        x, y, theta, _, parent, kappa = nodes[idx]
        poses.append((x, y, theta))
        if parent != -1:
            kappas.append(kappa)
        idx = parent
    poses.reverse()
    kappas.reverse()
    return Trajectory(
        poses=np.array(poses), curvatures=np.array(kappas), total_cost=float(total)
    )


# ---------------------------------------------------------------------------
# smoothing
# ---------------------------------------------------------------------------


def smooth(
    traj: Trajectory,
    grid: OccupancyGrid,
    iterations: int = 20,
    alpha: float = 0.2,
    footprint_radius: float = 0.8,
) -> Trajectory:
    """Midpoint relaxation of interior points with endpoints fixed.

    Each iteration is accepted only if the relaxed path stays collision-free
    and does not increase the summed heading change; the first rejected
    iteration returns the original input unchanged (safety clamp), so the
    output is either the input or a strictly smoother valid path.
    """
    if len(traj.poses) < 3 or iterations <= 0:
        return traj
    pts = traj.poses[:, :2].copy()
    theta0, theta1 = traj.poses[0, 2], traj.poses[-1, 2]
    turn = segment_heading_change_sum(pts)
    for _ in range(iterations):
        relaxed = pts.copy()
        relaxed[1:-1] += alpha * (pts[:-2] + pts[2:] - 2.0 * pts[1:-1])
        collides = any(
            segment_blocked(grid, tuple(relaxed[i]), tuple(relaxed[i + 1]), footprint_radius)
            for i in range(len(relaxed) - 1)
        )
        if collides:
            return traj
        relaxed_turn = segment_heading_change_sum(relaxed)
        if relaxed_turn > turn + 1e-12:
            break
        pts, turn = relaxed, relaxed_turn
    if np.array_equal(pts, traj.poses[:, :2]):
        return traj
    return _rebuild(pts, theta0, theta1, traj.total_cost)


def _rebuild(pts: np.ndarray, theta0: float, theta1: float, cost: float) -> Trajectory:
    n = len(pts)
    headings = np.empty(n)
    headings[0], headings[-1] = theta0, theta1
    for i in range(1, n - 1):
        d = pts[i + 1] - pts[i - 1]
        headings[i] = math.atan2(d[1], d[0])
    seg = np.diff(pts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    dth = np.array([normalize_heading(headings[i + 1] - headings[i]) for i in range(n - 1)])
    kappas = np.divide(dth, seg_len, out=np.zeros_like(dth), where=seg_len > 1e-12)
    poses = np.column_stack([pts, headings])
    return Trajectory(poses=poses, curvatures=kappas, total_cost=cost)
