"""Ground-truth hull dynamics, thrust mixing, and simulated range sensors.

The command path mirrors the onboard stack: a body velocity command is mixed
into left/right thruster speeds (differential drive over the thruster
separation B), each thruster relaxes toward its target with a first-order
lag, and the hull integrates as a unicycle with additive world-frame
disturbances (slow sinusoidal drift plus white noise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import PoseOutOfBounds
from .localization import normalize_heading
from .worldmap import OccupancyGrid

LIDAR_RANGE_MAX = 12.0
LIDAR_RANGE_MIN = 0.12
ROI_SENSE_MIN = 0.5
ROI_SENSE_MAX = 10.0


@dataclass(frozen=True)
class VehicleParams:
    B: float = 0.8  # thruster separation, m
    v_max: float = 2.0
    w_max: float = 1.5
    thrust_lag_tau: float = 0.4
    pwm_neutral: float = 1500.0
    pwm_min: float = 1000.0
    pwm_max: float = 2000.0

    def __post_init__(self):
        if self.B <= 0 or self.v_max <= 0:
            raise ValueError("B and v_max must be positive")
        if not (self.pwm_min < self.pwm_neutral < self.pwm_max):
            raise ValueError("PWM endpoints must bracket neutral")


@dataclass(frozen=True)
class VelocityCommand:
    v_x: float = 0.0
    w_z: float = 0.0

    def clamped(self, params: VehicleParams) -> "VelocityCommand":
        return VelocityCommand(
            v_x=min(max(self.v_x, -params.v_max), params.v_max),
            w_z=min(max(self.w_z, -params.w_max), params.w_max),
        )


@dataclass(frozen=True)
class DisturbanceModel:
    """Slow drift + white noise, both as world-frame velocities.

    Drift is sinusoidal per axis with phases drawn once per run from the
    seeded stream; white noise is zero-mean Gaussian per step.
    """

    drift_amp: float = 0.0  # m/s
    drift_period: float = 60.0  # s
    white_sigma: float = 0.0  # m/s
    heading_white_sigma: float = 0.0  # rad/s
    phase_x: float = 0.0
    phase_y: float = 0.0

    def __post_init__(self):
        if self.drift_amp < 0 or self.white_sigma < 0 or self.heading_white_sigma < 0:
            raise ValueError("disturbance amplitudes must be >= 0")

    def with_phases(self, rng: np.random.Generator) -> "DisturbanceModel":
        return replace(
            self,
            phase_x=float(rng.uniform(0, 2 * math.pi)),
            phase_y=float(rng.uniform(0, 2 * math.pi)),
        )

    def drift(self, t: float) -> tuple[float, float]:
        if self.drift_amp == 0.0:
            return 0.0, 0.0
        w = 2 * math.pi / self.drift_period
        return (
            self.drift_amp * math.sin(w * t + self.phase_x),
            self.drift_amp * math.sin(w * t + self.phase_y),
        )


@dataclass(frozen=True)
class TrueState:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0
    v_l_actual: float = 0.0
    v_r_actual: float = 0.0
    t: float = 0.0

    @property
    def pose(self) -> tuple[float, float, float]:
        return self.x, self.y, self.theta

    @property
    def body_speed(self) -> float:
        return 0.5 * (self.v_l_actual + self.v_r_actual)


# ---------------------------------------------------------------------------
# mixing and PWM
# ---------------------------------------------------------------------------


def mix(cmd: VelocityCommand, B: float) -> tuple[float, float]:
    """v_l = v_x - w_z*B/2, v_r = v_x + w_z*B/2."""
    if B <= 0:
        raise ValueError("B must be > 0")
    half = 0.5 * cmd.w_z * B
    return cmd.v_x - half, cmd.v_x + half


def unmix(v_l: float, v_r: float, B: float) -> VelocityCommand:
    """Exact inverse of mix."""
    if B <= 0:
        raise ValueError("B must be > 0")
    return VelocityCommand(v_x=0.5 * (v_l + v_r), w_z=(v_r - v_l) / B)


def pwm_map(v: float, params: VehicleParams) -> float:
    """Linear speed -> ESC pulse width: neutral at 0, the PWM endpoints at
    +/- v_max; out-of-range speeds clamp."""
    v = min(max(v, -params.v_max), params.v_max)
    if v >= 0:
        return params.pwm_neutral + (v / params.v_max) * (params.pwm_max - params.pwm_neutral)
    return params.pwm_neutral + (v / params.v_max) * (params.pwm_neutral - params.pwm_min)


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------


def step_dynamics(
    s: TrueState,
    target: tuple[float, float],
    params: VehicleParams,
    dist: DisturbanceModel,
    dt: float,
    rng: np.random.Generator | None = None,
) -> TrueState:
    """Advance ground truth by one step.

    Thruster speeds relax toward their targets with the first-order lag
    (exact discrete form, immediate for tau ~ 0); the hull then integrates
    a unicycle on the actual speeds plus disturbance velocities.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if params.thrust_lag_tau < 1e-9:
        v_l, v_r = target
    else:
        k = 1.0 - math.exp(-dt / params.thrust_lag_tau)
        v_l = s.v_l_actual + (target[0] - s.v_l_actual) * k
        v_r = s.v_r_actual + (target[1] - s.v_r_actual) * k

    body = unmix(v_l, v_r, params.B)
    drift_x, drift_y = dist.drift(s.t)
    noise_x = noise_y = noise_w = 0.0
    if rng is not None and (dist.white_sigma > 0 or dist.heading_white_sigma > 0):
        noise_x = float(rng.normal(0.0, dist.white_sigma)) if dist.white_sigma > 0 else 0.0
        noise_y = float(rng.normal(0.0, dist.white_sigma)) if dist.white_sigma > 0 else 0.0
        if dist.heading_white_sigma > 0:
            noise_w = float(rng.normal(0.0, dist.heading_white_sigma))

    x = s.x + (body.v_x * math.cos(s.theta) + drift_x + noise_x) * dt
    y = s.y + (body.v_x * math.sin(s.theta) + drift_y + noise_y) * dt
    theta = normalize_heading(s.theta + (body.w_z + noise_w) * dt)
    return TrueState(x=x, y=y, theta=theta, v_l_actual=v_l, v_r_actual=v_r, t=s.t + dt)


# ---------------------------------------------------------------------------
# range sensors
# ---------------------------------------------------------------------------


def _cast_ray(
    grid: OccupancyGrid, x: float, y: float, heading: float, r_max: float
) -> float:
    """DDA traversal from (x, y) along `heading`; returns hit distance or
    r_max when nothing blocks within range."""
    col, row = grid.world_to_cell(x, y)
    if grid.is_blocked(col, row):
        return 0.0
    dx, dy = math.cos(heading), math.sin(heading)
    res = grid.resolution
    step_c = 1 if dx > 0 else -1
    step_r = 1 if dy > 0 else -1
    # parametric distance to the next vertical/horizontal cell boundary
    if dx != 0:
        next_vx = grid.origin.x + (col + (1 if dx > 0 else 0)) * res
        t_max_x = (next_vx - x) / dx
        t_dx = res / abs(dx)
    else:
        t_max_x, t_dx = math.inf, math.inf
    if dy != 0:
        next_hy = grid.origin.y + (row + (1 if dy > 0 else 0)) * res
        t_max_y = (next_hy - y) / dy
        t_dy = res / abs(dy)
    else:
        t_max_y, t_dy = math.inf, math.inf

    while True:
        if t_max_x < t_max_y:
            t = t_max_x
            t_max_x += t_dx
            col += step_c
        else:
            t = t_max_y
            t_max_y += t_dy
            row += step_r
        if t > r_max:
            return r_max
        if not grid.in_bounds(col, row):
            return r_max
        if grid.is_blocked(col, row):
            return t


def raycast_lidar(
    pose: tuple[float, float, float],
    grid: OccupancyGrid,
    n_beams: int = 360,
    r_max: float = LIDAR_RANGE_MAX,
    r_min: float = LIDAR_RANGE_MIN,
) -> np.ndarray:
    """Planar scan: `n_beams` evenly spaced rays starting at the vehicle
    heading.  Misses read the r_max sentinel; near hits clamp to r_min."""
    x, y, theta = pose
    col, row = grid.world_to_cell(x, y)
    if not grid.in_bounds(col, row):
        raise PoseOutOfBounds(f"pose {pose[:2]} outside grid")
    ranges = np.empty(n_beams)
    for i in range(n_beams):
        heading = theta + 2 * math.pi * i / n_beams
        ranges[i] = max(_cast_ray(grid, x, y, heading, r_max), r_min)
    return ranges


def roi_obstacle(
    pose: tuple[float, float, float],
    grid: OccupancyGrid,
    roi_halfwidth: float = 1.0,
    threshold: float = 3.0,
    n_beams: int = 41,
) -> dict:
    """Forward corridor check, the trigger for replanning.

    Casts a fan ahead of the vehicle and keeps hits whose lateral offset
    stays inside the corridor half-width and whose forward depth is within
    the sensing span; returns {flag, min_range} with min_range capped at the
    sensing maximum and clamped to the sensing minimum.
    """
    if not (ROI_SENSE_MIN <= threshold <= ROI_SENSE_MAX):
        raise ValueError("threshold must lie within the sensing span")
    x, y, theta = pose
    col, row = grid.world_to_cell(x, y)
    if not grid.in_bounds(col, row):
        raise PoseOutOfBounds(f"pose {pose[:2]} outside grid")
    half_angle = math.atan2(roi_halfwidth, ROI_SENSE_MIN)
    min_range = ROI_SENSE_MAX
    for i in range(n_beams):
        rel = -half_angle + 2 * half_angle * i / (n_beams - 1)
        r = _cast_ray(grid, x, y, theta + rel, ROI_SENSE_MAX + roi_halfwidth)
        lateral = abs(r * math.sin(rel))
        forward = r * math.cos(rel)
        if r >= ROI_SENSE_MAX + roi_halfwidth or lateral > roi_halfwidth:
            continue
        if forward <= ROI_SENSE_MAX:
            min_range = min(min_range, max(r, ROI_SENSE_MIN))
    return {"flag": bool(min_range < threshold), "min_range": float(min_range)}
