"""Encoder-free odometry: EKF over [x, y, heading, speed].

Inertial samples drive the time update through a unicycle motion model
(forward Euler); GNSS position fixes drive the measurement update with the
standard gain/mean/covariance recursion.  Keeping forward speed in the state
lets acceleration integrate without wheel encoders.

Functions are state-in/state-out; the caller owns sequencing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteInput, SingularInnovation

# Default continuous-time process noise (per second), tuned on the synthetic
# fusion run; diagonal over [x, y, heading, speed].
DEFAULT_PROCESS_NOISE = np.diag([1e-4, 1e-4, 1e-5, 1e-3])

_H_POS = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])


def normalize_heading(theta: float) -> float:
    """Wrap an angle to (-pi, pi]; -pi maps to +pi.

    Angles already in range pass through bit-identically.
    """
    if not math.isfinite(theta):
        raise NonFiniteInput("heading is not finite")
    if -math.pi < theta <= math.pi:
        return theta
    m = math.fmod(theta + math.pi, 2.0 * math.pi)
    if m <= 0.0:
        m += 2.0 * math.pi
    return m - math.pi


@dataclass(frozen=True)
class ImuSample:
    yaw_rate: float  # rad/s
    forward_accel: float  # m/s^2
    dt: float  # s

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")


@dataclass(frozen=True)
class GnssFix:
    z: np.ndarray  # (2,) position in the local frame, meters
    R: np.ndarray  # (2, 2) measurement covariance


@dataclass(frozen=True)
class StateEstimate:
    """Mean [x, y, heading, speed] with 4x4 covariance."""

    mean: np.ndarray
    P: np.ndarray

    @classmethod
    def initial(
        cls, x: float = 0.0, y: float = 0.0, theta: float = 0.0, v: float = 0.0,
        P: np.ndarray | None = None,
    ) -> "StateEstimate":
        if P is None:
            P = np.diag([1.0, 1.0, 0.1, 0.5])
        return cls(mean=np.array([x, y, theta, v], dtype=float), P=np.array(P, dtype=float))

    @property
    def pose(self) -> tuple[float, float, float]:
        return float(self.mean[0]), float(self.mean[1]), float(self.mean[2])


def _check_finite(*arrays) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFiniteInput("non-finite value in estimator input")


def _symmetrize(P: np.ndarray) -> np.ndarray:
    return 0.5 * (P + P.T)


def predict(est: StateEstimate, u: ImuSample, Q: np.ndarray | None = None) -> StateEstimate:
    """Time update: propagate mean by the unicycle model, covariance by its
    Jacobian, and accumulate Q*dt of process noise.

    Discretization is forward Euler; at the simulator's step sizes the
    integration error is negligible (checked against a fine-step oracle).
    """
    if Q is None:
        Q = DEFAULT_PROCESS_NOISE
    _check_finite(est.mean, est.P, [u.yaw_rate, u.forward_accel, u.dt], Q)
    x, y, theta, v = est.mean
    dt = u.dt
    mean = np.array(
        [
            x + v * math.cos(theta) * dt,
            y + v * math.sin(theta) * dt,
            normalize_heading(theta + u.yaw_rate * dt),
            v + u.forward_accel * dt,
        ]
    )
    F = np.array(
        [
            [1.0, 0.0, -v * math.sin(theta) * dt, math.cos(theta) * dt],
            [0.0, 1.0, v * math.cos(theta) * dt, math.sin(theta) * dt],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    P = _symmetrize(F @ est.P @ F.T + np.asarray(Q, dtype=float) * dt)
    return StateEstimate(mean=mean, P=P)


def update_gnss(est: StateEstimate, fix: GnssFix) -> StateEstimate:
    """Measurement update with a position-only observation.

    Gain K = P H^T (H P H^T + R)^-1, mean += K (z - h(mean)); the covariance
    is propagated in Joseph form, which equals (I - K H) P for this optimal
    gain but stays positive semidefinite under floating-point rounding.
    """
    z = np.asarray(fix.z, dtype=float).reshape(2)
    R = np.asarray(fix.R, dtype=float).reshape(2, 2)
    _check_finite(est.mean, est.P, z, R)
    H = _H_POS
    P = est.P
    S = H @ P @ H.T + R
    if not np.all(np.isfinite(S)) or np.linalg.cond(S) > 1e14:
        raise SingularInnovation("innovation covariance is not invertible")
    K = np.linalg.solve(S.T, (P @ H.T).T).T  # P H^T S^-1
    innovation = z - est.mean[:2]
    mean = est.mean + K @ innovation
    mean[2] = normalize_heading(mean[2])
    IKH = np.eye(4) - K @ H
    P_post = _symmetrize(IKH @ P @ IKH.T + K @ R @ K.T)
    return StateEstimate(mean=mean, P=P_post)


def update_heading(est: StateEstimate, theta_meas: float, sigma: float) -> StateEstimate:
    """Optional absolute-heading correction (simulated AHRS); off by default
    in scenarios.  Scalar measurement on the heading component."""
    _check_finite(est.mean, est.P, [theta_meas, sigma])
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    P = est.P
    S = P[2, 2] + sigma**2
    if S <= 0 or not math.isfinite(S):
        raise SingularInnovation("heading innovation variance is not invertible")
    K = P[:, 2] / S
    innovation = normalize_heading(theta_meas - est.mean[2])
    mean = est.mean + K * innovation
    mean[2] = normalize_heading(mean[2])
    IKH = np.eye(4)
    IKH[:, 2] -= K
    P_post = _symmetrize(IKH @ P @ IKH.T + np.outer(K, K) * sigma**2)
    return StateEstimate(mean=mean, P=P_post)
