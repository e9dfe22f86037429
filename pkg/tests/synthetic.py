"""Shared synthetic runs used by unit tests and the acceptance suite."""

from __future__ import annotations

import math

import numpy as np

from hydrosim import localization as loc


def fusion_rmse(
    seed: int,
    duration: float = 200.0,
    dt: float = 0.02,
    gnss_period: float = 1.0,
    gnss_sigma: float = 0.3,
    yaw_sigma: float = 0.01,
    accel_sigma: float = 0.05,
) -> dict[str, float]:
    """Run one seeded truth/sensor rollout and score three position
    estimators over it:

    - fused: EKF with IMU prediction and GNSS correction
    - dead_reckoning: the same EKF with the corrections withheld
    - gnss_only: raw fixes scored at fix instants

    Returns position RMSEs in meters.
    """
    rng = np.random.default_rng(seed)
    n = int(round(duration / dt))
    gnss_every = int(round(gnss_period / dt))

    truth = np.array([0.0, 0.0, 0.0, 1.0])  # x, y, theta, v
    fused = loc.StateEstimate.initial(v=1.0)
    dead = loc.StateEstimate.initial(v=1.0)
    R = np.eye(2) * gnss_sigma**2

    sq_fused = 0.0
    sq_dead = 0.0
    sq_gnss = 0.0
    n_gnss = 0

    for k in range(1, n + 1):
        t = k * dt
        yaw_rate = 0.2 * math.sin(2 * math.pi * t / 40.0)
        accel = 0.05 * math.sin(2 * math.pi * t / 30.0)

        x, y, theta, v = truth
        truth = np.array(
            [
                x + v * math.cos(theta) * dt,
                y + v * math.sin(theta) * dt,
                theta + yaw_rate * dt,
                v + accel * dt,
            ]
        )

        imu = loc.ImuSample(
            yaw_rate=yaw_rate + rng.normal(0.0, yaw_sigma),
            forward_accel=accel + rng.normal(0.0, accel_sigma),
            dt=dt,
        )
        fused = loc.predict(fused, imu)
        dead = loc.predict(dead, imu)

        if k % gnss_every == 0:
            z = truth[:2] + rng.normal(0.0, gnss_sigma, size=2)
            fused = loc.update_gnss(fused, loc.GnssFix(z=z, R=R))
            sq_gnss += float(np.sum((z - truth[:2]) ** 2))
            n_gnss += 1

        sq_fused += float(np.sum((fused.mean[:2] - truth[:2]) ** 2))
        sq_dead += float(np.sum((dead.mean[:2] - truth[:2]) ** 2))

    return {
        "fused": math.sqrt(sq_fused / n),
        "dead_reckoning": math.sqrt(sq_dead / n),
        "gnss_only": math.sqrt(sq_gnss / max(n_gnss, 1)),
    }


def mean_fusion_rmse(seeds: range) -> dict[str, float]:
    totals = {"fused": 0.0, "dead_reckoning": 0.0, "gnss_only": 0.0}
    for seed in seeds:
        r = fusion_rmse(seed)
        for k in totals:
            totals[k] += r[k]
    return {k: v / len(seeds) for k, v in totals.items()}
