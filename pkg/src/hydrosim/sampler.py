"""State machine of the 6-module x 4-motor x 3-syringe sampling system.

Each motor drives three syringes through one aspiration cycle abstracted to
a travel fraction in [0, 1]: travel advances at 1/(nominal_cycle * drag),
unsealed syringe volume tracks travel (so the fill rate is the nominal flow
divided by the same drag factor), and the syringes seal when the cycle
completes at the home switch.  Sealed syringes flagged as leaking drain at
the fault model's leak rate until measured.

Faults are events, not errors: switch failures time the motor out, expander
failures freeze their motor until a bus recovery pass, leaks drain volume.
The state is owned by the simulation loop; commands arrive through a
serialized queue (one I2C bus) and `status_report` is a read-only snapshot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import EStopLatched, ExpanderUnresponsive, OutOfRange
from . import fielddata

_MODULE_LETTERS = "ABCDEF"


class MotorAction(IntEnum):
    STOP = 0
    FORWARD = 1
    REVERSE = 2


@dataclass(frozen=True)
class SamplerParams:
    n_modules: int = 6
    motors_per_module: int = 4
    syringes_per_motor: int = 3
    capacity_ml: float = 45.0
    nominal_cycle_s: float = 90.0
    motor_torque_nm: float = 0.45
    gear_stages: tuple[float, ...] = (4.0, 3.0)
    max_travel_time_s: float = 300.0

    def __post_init__(self):
        if self.capacity_ml <= 0 or self.nominal_cycle_s <= 0:
            raise ValueError("capacity and cycle time must be positive")
        if self.max_travel_time_s <= self.nominal_cycle_s:
            raise ValueError("travel timeout must exceed the nominal cycle")

    @property
    def gear_ratio(self) -> float:
        return math.prod(self.gear_stages)

    @property
    def q_nominal_ml_s(self) -> float:
        """Average flow per syringe over one nominal cycle."""
        return self.capacity_ml / self.nominal_cycle_s

    @property
    def n_motors(self) -> int:
        return self.n_modules * self.motors_per_module

    @property
    def n_syringes(self) -> int:
        return self.n_motors * self.syringes_per_motor


def output_torque(params: SamplerParams) -> float:
    """Lead-screw torque after the reduction stages."""
    return params.gear_ratio * params.motor_torque_nm


def syringe_label(module: int, motor: int, syringe: int) -> str:
    return f"{_MODULE_LETTERS[module]}{motor + 1}_S{syringe + 1}"


def motor_label(module: int, motor: int) -> str:
    return f"{_MODULE_LETTERS[module]}{motor + 1}"


# ---------------------------------------------------------------------------
# wire encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MotorCommand:
    module: int
    motor: int
    action: MotorAction

    def __post_init__(self):
        if not (0 <= self.module <= 5 and 0 <= self.motor <= 3):
            raise OutOfRange(f"module/motor index out of range: {self.module},{self.motor}")


def encode_motor_command(c: MotorCommand) -> bytes:
    return bytes([c.module, c.motor, int(c.action)])


def decode_motor_command(data: bytes) -> MotorCommand:
    if len(data) != 3:
        raise OutOfRange(f"motor command must be 3 bytes, got {len(data)}")
    module, motor, action = data
    if module > 5 or motor > 3 or action > 2:
        raise OutOfRange(f"invalid motor command bytes {list(data)}")
    return MotorCommand(module=module, motor=motor, action=MotorAction(action))


# ---------------------------------------------------------------------------
# fault model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FaultModel:
    """Per-cycle fault injection.  The all-zero default disables every fault.

    drag_mu/drag_sigma parameterize a lognormal multiplier on cycle time;
    leak_prob marks syringes (per cycle) that drain at leak_rate once
    sealed; switch_fail_prob suppresses the home switch for a cycle;
    expander_fail_prob is per minute per expander.
    """

    leak_prob: float = 0.0
    leak_rate_ml_s: float = 0.0
    switch_fail_prob: float = 0.0
    drag_mu: float = 0.0
    drag_sigma: float = 0.0
    expander_fail_prob_per_min: float = 0.0

    def __post_init__(self):
        for p in (self.leak_prob, self.switch_fail_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")
        if self.drag_sigma < 0 or self.leak_rate_ml_s < 0:
            raise ValueError("rates must be >= 0")

    @property
    def drag_enabled(self) -> bool:
        return self.drag_mu != 0.0 or self.drag_sigma != 0.0

    @classmethod
    def calibrated(cls, params: SamplerParams | None = None) -> "FaultModel":
        """Fault model fitted to the bundled field campaign.

        Drag is lognormal-fitted to the eight observed group fill times
        relative to the nominal cycle; leaks are binary (probability 0.20)
        and drain a full syringe well inside the post-seal settle window.
        """
        if params is None:
            params = SamplerParams()
        mu, sigma = fit_drag_lognormal(fielddata.group_fill_times(), params.nominal_cycle_s)
        return cls(
            leak_prob=0.20,
            leak_rate_ml_s=0.5,
            drag_mu=mu,
            drag_sigma=sigma,
        )


def fit_drag_lognormal(times_s: list[float], nominal_s: float) -> tuple[float, float]:
    """Moment fit of log(observed cycle / nominal cycle)."""
    logs = np.log(np.asarray(times_s, dtype=float) / nominal_s)
    return float(logs.mean()), float(logs.std(ddof=1))


# ---------------------------------------------------------------------------
# state
# ---------------------------------------------------------------------------


@dataclass
class MotorState:
    action: MotorAction = MotorAction.STOP
    travel: float = 0.0  # cycle progress, 0 = home
    home_switch: bool = True
    elapsed_in_cycle: float = 0.0
    cycle_time: float | None = None  # nominal * drag once the cycle is live
    cycle_started_at: float | None = None
    switch_failed: bool = False
    needs_init: bool = False  # drag/leak draws happen on the first step


@dataclass
class SyringeState:
    label: str
    volume_ml: float = 0.0
    sealed: bool = False
    leaking: bool = False
    sealed_at: float | None = None


@dataclass
class SamplerEvent:
    kind: str
    t: float
    module: int = -1
    motor: int = -1
    data: dict = field(default_factory=dict)


@dataclass
class SamplerState:
    params: SamplerParams = field(default_factory=SamplerParams)
    t: float = 0.0
    estop: bool = False
    motors: list[MotorState] = None
    syringes: list[SyringeState] = None
    expander_ok: np.ndarray = None  # (n_modules, motors_per_module) bool
    dropped_commands: list[MotorCommand] = field(default_factory=list)

    def __post_init__(self):
        p = self.params
        if self.motors is None:
            self.motors = [MotorState() for _ in range(p.n_motors)]
        if self.syringes is None:
            self.syringes = [
                SyringeState(label=syringe_label(m, k, s))
                for m in range(p.n_modules)
                for k in range(p.motors_per_module)
                for s in range(p.syringes_per_motor)
            ]
        if self.expander_ok is None:
            self.expander_ok = np.ones((p.n_modules, p.motors_per_module), dtype=bool)

    # -- indexing ------------------------------------------------------------

    def motor(self, module: int, motor: int) -> MotorState:
        return self.motors[module * self.params.motors_per_module + motor]

    def motor_syringes(self, module: int, motor: int) -> list[SyringeState]:
        spm = self.params.syringes_per_motor
        base = (module * self.params.motors_per_module + motor) * spm
        return self.syringes[base : base + spm]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def apply_command(state: SamplerState, cmd: MotorCommand) -> None:
    """Route one motor command; mutates state in place.

    Raises EStopLatched while the latch is set and ExpanderUnresponsive when
    the target expander is down (the drop is recorded for bus recovery to
    report).
    """
    if state.estop:
        raise EStopLatched("commands rejected while e-stop is engaged")
    if not state.expander_ok[cmd.module, cmd.motor]:
        state.dropped_commands.append(cmd)
        raise ExpanderUnresponsive(
            f"expander {cmd.module}/{cmd.motor} unresponsive, command dropped"
        )
    m = state.motor(cmd.module, cmd.motor)
    if cmd.action is MotorAction.FORWARD:
        if m.cycle_time is None and m.travel == 0.0:
            m.elapsed_in_cycle = 0.0
            m.needs_init = True
            m.cycle_started_at = state.t
        m.action = MotorAction.FORWARD
        m.home_switch = False
    elif cmd.action is MotorAction.REVERSE:
        m.action = MotorAction.REVERSE
        m.home_switch = False
    else:
        m.action = MotorAction.STOP


def emergency_stop(state: SamplerState, engage: bool) -> None:
    """Latch/unlatch the e-stop; engaging stops every motor in the same tick."""
    if engage:
        state.estop = True
        for m in state.motors:
            m.action = MotorAction.STOP
    else:
        state.estop = False


def bus_recovery(state: SamplerState) -> list[SamplerEvent]:
    """Reinitialize every unresponsive expander (idempotent).

    Motors that were frozen mid-cycle resume from their recorded travel on
    the next step; commands that were dropped while the expander was down
    are reported once.
    """
    events: list[SamplerEvent] = []
    for module in range(state.params.n_modules):
        for motor in range(state.params.motors_per_module):
            if not state.expander_ok[module, motor]:
                state.expander_ok[module, motor] = True
                events.append(
                    SamplerEvent("expander_reinitialized", state.t, module, motor)
                )
    for cmd in state.dropped_commands:
        events.append(
            SamplerEvent(
                "command_dropped", state.t, cmd.module, cmd.motor,
                {"action": int(cmd.action)},
            )
        )
    state.dropped_commands.clear()
    return events


def step_sampler(
    state: SamplerState,
    dt: float,
    faults: FaultModel | None = None,
    rng: np.random.Generator | None = None,
) -> list[SamplerEvent]:
    """Advance the sampler by `dt` seconds; returns the events raised.

    While the e-stop latch is set nothing moves, fills, or drains.  Cycle
    completion events carry the exact cycle duration, independent of the
    step size.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if faults is None:
        faults = FaultModel()
    p = state.params
    events: list[SamplerEvent] = []
    t_prev = state.t
    state.t = t_prev + dt
    if state.estop:
        return events

    if faults.expander_fail_prob_per_min > 0 and rng is not None:
        p_fail = faults.expander_fail_prob_per_min * dt / 60.0
        for module in range(p.n_modules):
            for motor in range(p.motors_per_module):
                if state.expander_ok[module, motor] and rng.random() < p_fail:
                    state.expander_ok[module, motor] = False
                    events.append(SamplerEvent("expander_failed", state.t, module, motor))

    for module in range(p.n_modules):
        for motor in range(p.motors_per_module):
            if not state.expander_ok[module, motor]:
                continue  # frozen until bus recovery
            m = state.motor(module, motor)
            if m.action is MotorAction.FORWARD:
                _step_forward(state, module, motor, m, dt, faults, rng, events)
            elif m.action is MotorAction.REVERSE:
                _step_reverse(state, module, motor, m, dt, events)

    if faults.leak_rate_ml_s > 0:
        for s in state.syringes:
            if s.sealed and s.leaking and s.volume_ml > 0:
                window = state.t - max(t_prev, s.sealed_at)
                if window > 0:
                    s.volume_ml = max(0.0, s.volume_ml - faults.leak_rate_ml_s * window)
    return events


def _step_forward(state, module, motor, m, dt, faults, rng, events):
    p = state.params
    if m.needs_init:
        m.needs_init = False
        drag = 1.0
        if faults.drag_enabled and rng is not None:
            drag = float(rng.lognormal(faults.drag_mu, faults.drag_sigma))
        m.cycle_time = p.nominal_cycle_s * drag
        m.switch_failed = (
            rng is not None
            and faults.switch_fail_prob > 0
            and rng.random() < faults.switch_fail_prob
        )
        for s in state.motor_syringes(module, motor):
            s.volume_ml = 0.0
            s.sealed = False
            s.sealed_at = None
            s.leaking = (
                rng is not None
                and faults.leak_prob > 0
                and rng.random() < faults.leak_prob
            )
        events.append(
            SamplerEvent(
                "cycle_started", m.cycle_started_at, module, motor,
                {"cycle_time_s": m.cycle_time},
            )
        )
    if m.cycle_time is None:
        return  # Forward issued mid-travel with no live cycle context

    m.elapsed_in_cycle += dt
    T = m.cycle_time
    if m.elapsed_in_cycle >= T:
        completed_at = m.cycle_started_at + T if m.cycle_started_at is not None else state.t
        for s in state.motor_syringes(module, motor):
            if not s.sealed:
                s.volume_ml = p.capacity_ml
                s.sealed = True
                s.sealed_at = completed_at
        if not m.switch_failed:
            m.travel = 0.0
            m.home_switch = True
            m.action = MotorAction.STOP
            m.elapsed_in_cycle = 0.0
            m.cycle_time = None
            events.append(
                SamplerEvent(
                    "cycle_complete", completed_at, module, motor,
                    {"duration_s": T},
                )
            )
        else:
            m.travel = 0.0  # physically home; the switch never reported it
            if m.elapsed_in_cycle >= p.max_travel_time_s:
                m.action = MotorAction.STOP
                m.elapsed_in_cycle = 0.0
                m.cycle_time = None
                events.append(
                    SamplerEvent(
                        "switch_timeout", state.t, module, motor,
                        {"timeout_s": p.max_travel_time_s, "duration_s": T},
                    )
                )
    else:
        m.travel = m.elapsed_in_cycle / T
        for s in state.motor_syringes(module, motor):
            if not s.sealed:
                s.volume_ml = p.capacity_ml * m.travel


def _step_reverse(state, module, motor, m, dt, events):
    p = state.params
    T = m.cycle_time if m.cycle_time is not None else p.nominal_cycle_s
    m.travel = max(0.0, m.travel - dt / T)
    for s in state.motor_syringes(module, motor):
        if not s.sealed:
            s.volume_ml = p.capacity_ml * m.travel
    if m.travel == 0.0:
        m.action = MotorAction.STOP
        m.elapsed_in_cycle = 0.0
        m.cycle_time = None
        if not m.switch_failed:
            m.home_switch = True
        events.append(SamplerEvent("returned_home", state.t, module, motor))


def status_report(state: SamplerState) -> dict:
    """Read-only snapshot: per-motor activity plus the e-stop latch."""
    p = state.params
    motors = []
    for module in range(p.n_modules):
        for motor in range(p.motors_per_module):
            m = state.motor(module, motor)
            motors.append(
                {
                    "module": module,
                    "motor": motor,
                    "label": motor_label(module, motor),
                    "action": int(m.action),
                    "home": m.home_switch,
                    "travel": round(m.travel, 6),
                }
            )
    return {
        "estop": state.estop,
        "motors": motors,
        "dropped_commands": len(state.dropped_commands),
    }


def motor_activity_bitmap(state: SamplerState) -> int:
    """Bit i set when motor i (module*4 + motor) is not stopped."""
    bits = 0
    for i, m in enumerate(state.motors):
        if m.action is not MotorAction.STOP:
            bits |= 1 << i
    return bits


# ---------------------------------------------------------------------------
# Monte-Carlo cycle harness
# ---------------------------------------------------------------------------


def monte_carlo_cycles(
    n_cycles: int,
    params: SamplerParams | None = None,
    faults: FaultModel | None = None,
    seed: int = 0,
    settle_s: float = 120.0,
    dt: float = 2.0,
) -> dict:
    """Run `n_cycles` fill cycles (24 motors per batch) under the fault
    model and report mean fill time and mean measured volume.

    Volumes are read after a post-completion settle window, the stand-in for
    shore-side measurement, so sealed leaks have drained by then.
    """
    if params is None:
        params = SamplerParams()
    if faults is None:
        faults = FaultModel()
    rng = np.random.default_rng(seed)
    fill_times: list[float] = []
    volumes: list[float] = []
    remaining = n_cycles
    while remaining > 0:
        state = SamplerState(params=params)
        batch = min(remaining, params.n_motors)
        targets = [
            (i // params.motors_per_module, i % params.motors_per_module)
            for i in range(batch)
        ]
        for module, motor in targets:
            apply_command(state, MotorCommand(module, motor, MotorAction.FORWARD))
        done: dict[tuple[int, int], float] = {}
        guard = params.max_travel_time_s * 4 + settle_s
        settle_until = None
        while state.t < guard:
            for ev in step_sampler(state, dt, faults, rng):
                if ev.kind == "cycle_complete":
                    done[(ev.module, ev.motor)] = ev.data["duration_s"]
            if len(done) == batch:
                if settle_until is None:
                    settle_until = state.t + settle_s
                elif state.t >= settle_until:
                    break
        for module, motor in targets:
            fill_times.append(done[(module, motor)])
            for s in state.motor_syringes(module, motor):
                volumes.append(s.volume_ml)
        remaining -= batch
    return {
        "n_cycles": n_cycles,
        "mean_fill_time_s": float(np.mean(fill_times)),
        "mean_volume_ml": float(np.mean(volumes)),
        "fill_times": fill_times,
        "volumes": volumes,
    }
