"""Electrical load, battery state of charge, solar input, and endurance."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NonPositivePower

SAMPLER_MOTOR_COUNT = 24


@dataclass(frozen=True)
class LoadProfile:
    """Average draw per subsystem, watts.  The sampler term is per motor and
    scaled by its duty cycle across the mission."""

    thrusters_w: float = 1800.0
    computer_w: float = 25.0
    mcu_w: float = 3.3
    sensors_comms_w: float = 4.65
    sampler_motor_w: float = 20.4
    sampler_duty: float = 0.10

    def __post_init__(self):
        values = (
            self.thrusters_w, self.computer_w, self.mcu_w,
            self.sensors_comms_w, self.sampler_motor_w,
        )
        if min(values) < 0 or not (0.0 <= self.sampler_duty <= 1.0):
            raise ValueError("loads must be >= 0 and duty within [0, 1]")


@dataclass(frozen=True)
class PowerParams:
    usable_energy_wh: float = 1920.0
    v_full: float = 26.8
    v_empty: float = 24.0
    solar_peak_w: float = 100.0  # two 50 W panels

    def __post_init__(self):
        if self.usable_energy_wh <= 0:
            raise ValueError("usable energy must be positive")
        if self.v_full <= self.v_empty:
            raise ValueError("v_full must exceed v_empty")


@dataclass(frozen=True)
class PowerState:
    soc_wh: float
    v: float
    i: float
    depleted: bool = False

    @classmethod
    def full(cls, params: PowerParams) -> "PowerState":
        return cls(soc_wh=params.usable_energy_wh, v=params.v_full, i=0.0)


def total_power(p: LoadProfile) -> float:
    """Sum of the continuous loads plus the duty-cycled sampler bank."""
    return (
        p.thrusters_w
        + p.computer_w
        + p.mcu_w
        + p.sensors_comms_w
        + SAMPLER_MOTOR_COUNT * p.sampler_motor_w * p.sampler_duty
    )


def endurance_hours(usable_energy_wh: float, power_w: float) -> float:
    """Theoretical runtime at constant draw: E / P."""
    if power_w <= 0:
        raise NonPositivePower(f"power must be > 0, got {power_w}")
    return usable_energy_wh / power_w


def step_power(
    s: PowerState, profile: LoadProfile, params: PowerParams, solar_w: float, dt: float
) -> PowerState:
    """Integrate one step: SoC falls by net load, clamped to [0, E_use];
    terminal voltage is affine in SoC and current follows P = V*I.
    `depleted` latches the instant SoC reaches zero."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    net_w = total_power(profile) - solar_w
    soc = s.soc_wh - net_w * dt / 3600.0
    soc = min(max(soc, 0.0), params.usable_energy_wh)
    frac = soc / params.usable_energy_wh
    v = params.v_empty + (params.v_full - params.v_empty) * frac
    return PowerState(soc_wh=soc, v=v, i=net_w / v, depleted=soc <= 0.0)
