from __future__ import annotations

import math

import numpy as np
import pytest

from hydrosim import localization as loc
from hydrosim.errors import NonFiniteInput, SingularInnovation

from .synthetic import fusion_rmse


def make_est(P=None, **kw):
    return loc.StateEstimate.initial(P=P, **kw)


# ---------------------------------------------------------------------------
# normalize_heading
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "theta,expected",
    [(3 * math.pi, math.pi), (-math.pi, math.pi), (0.3, 0.3), (math.pi, math.pi), (0.0, 0.0)],
)
def test_normalize_heading(theta, expected):
    out = loc.normalize_heading(theta)
    assert out == pytest.approx(expected, abs=1e-12)
    assert -math.pi < out <= math.pi


def test_normalize_heading_equivalence_mod_2pi():
    for theta in np.linspace(-20, 20, 101):
        out = loc.normalize_heading(float(theta))
        assert math.isclose(
            math.cos(out), math.cos(theta), abs_tol=1e-9
        ) and math.isclose(math.sin(out), math.sin(theta), abs_tol=1e-9)


# ---------------------------------------------------------------------------
# predict
# ---------------------------------------------------------------------------


def test_predict_stationary_grows_by_q():
    # zero prior covariance isolates the additive process-noise term
    Q = np.diag([1e-4, 1e-4, 1e-5, 1e-3])
    est = loc.StateEstimate(mean=np.zeros(4), P=np.zeros((4, 4)))
    out = loc.predict(est, loc.ImuSample(0.0, 0.0, dt=1.0), Q)
    assert np.array_equal(out.mean, est.mean)
    assert np.allclose(out.P, Q, atol=1e-18)


def test_predict_straight_line_exact():
    est = make_est(v=1.0)
    out = loc.predict(est, loc.ImuSample(0.0, 0.0, dt=2.0), np.zeros((4, 4)))
    assert out.mean[0] == 2.0
    assert out.mean[1] == 0.0


def test_predict_turn_single_euler_step():
    # documented forward-Euler order: x advances with the heading at the
    # start of the step
    est = make_est(v=1.0)
    out = loc.predict(est, loc.ImuSample(math.pi / 2, 0.0, dt=1.0), np.zeros((4, 4)))
    assert out.mean[2] == pytest.approx(math.pi / 2, abs=1e-12)
    assert out.mean[0] == pytest.approx(1.0, abs=1e-12)


def test_predict_fine_substeps_match_analytic_arc():
    # 1000 substeps over the same quarter-turn arc must land within 0.05 m
    # of the closed-form endpoint (2/pi, 2/pi).
    est = make_est(v=1.0)
    n = 1000
    for _ in range(n):
        est = loc.predict(est, loc.ImuSample(math.pi / 2, 0.0, dt=1.0 / n), np.zeros((4, 4)))
    assert est.mean[0] == pytest.approx(2 / math.pi, abs=0.05)
    assert est.mean[1] == pytest.approx(2 / math.pi, abs=0.05)
    assert est.mean[2] == pytest.approx(math.pi / 2, abs=1e-9)


def test_predict_rejects_non_finite():
    with pytest.raises(NonFiniteInput):
        loc.predict(make_est(), loc.ImuSample(float("nan"), 0.0, dt=0.1))


def test_predict_bit_reproducible():
    def run():
        est = make_est(v=0.7, theta=0.4)
        for k in range(200):
            est = loc.predict(est, loc.ImuSample(0.05, 0.01, dt=0.02), np.zeros((4, 4)))
        return est

    a, b = run(), run()
    assert a.mean.tobytes() == b.mean.tobytes()
    assert a.P.tobytes() == b.P.tobytes()


# ---------------------------------------------------------------------------
# update
# ---------------------------------------------------------------------------


def test_update_perfect_measurement_limit():
    est = make_est()
    fix = loc.GnssFix(z=np.array([5.0, 7.0]), R=np.eye(2) * 1e-12)
    out = loc.update_gnss(est, fix)
    assert out.mean[0] == pytest.approx(5.0, abs=1e-6)
    assert out.mean[1] == pytest.approx(7.0, abs=1e-6)


def test_update_scalar_gain_oracle():
    # hand evaluation of the gain recursion: P=1, R=1, H=1 -> K=0.5 and the
    # posterior mean is the prior/measurement average
    est = loc.StateEstimate(mean=np.array([2.0, 0.0, 0.0, 0.0]), P=np.eye(4))
    fix = loc.GnssFix(z=np.array([4.0, 0.0]), R=np.eye(2))
    out = loc.update_gnss(est, fix)
    assert out.mean[0] == pytest.approx(3.0, abs=1e-9)  # K = 0.5
    assert out.P[0, 0] == pytest.approx(0.5, abs=1e-9)


def test_update_zero_innovation_keeps_mean_shrinks_p():
    est = make_est(x=1.0, y=-2.0)
    fix = loc.GnssFix(z=np.array([1.0, -2.0]), R=np.eye(2) * 0.25)
    out = loc.update_gnss(est, fix)
    assert np.allclose(out.mean, est.mean, atol=1e-12)
    assert np.trace(out.P[:2, :2]) < np.trace(est.P[:2, :2])


def test_update_singular_innovation():
    est = loc.StateEstimate(mean=np.zeros(4), P=np.zeros((4, 4)))
    fix = loc.GnssFix(z=np.zeros(2), R=np.zeros((2, 2)))
    with pytest.raises(SingularInnovation):
        loc.update_gnss(est, fix)


def test_update_never_grows_position_trace():
    rng = np.random.default_rng(7)
    est = make_est()
    for _ in range(200):
        A = rng.normal(size=(2, 2))
        fix = loc.GnssFix(z=rng.normal(size=2) * 5, R=A @ A.T + 1e-6 * np.eye(2))
        before = np.trace(est.P[:2, :2])
        est = loc.update_gnss(est, fix)
        assert np.trace(est.P[:2, :2]) <= before + 1e-12


# ---------------------------------------------------------------------------
# covariance health across random op sequences (full 1e5 in acceptance)
# ---------------------------------------------------------------------------


def random_op_sequence(seed: int, ops: int) -> loc.StateEstimate:
    rng = np.random.default_rng(seed)
    est = make_est()
    for _ in range(ops):
        if rng.random() < 0.7:
            est = loc.predict(
                est,
                loc.ImuSample(rng.normal(0, 0.5), rng.normal(0, 0.5), dt=float(rng.uniform(0.005, 0.1))),
            )
        else:
            A = rng.normal(size=(2, 2))
            est = loc.update_gnss(
                est, loc.GnssFix(z=rng.normal(size=2) * 10, R=A @ A.T + 1e-6 * np.eye(2))
            )
        assert np.abs(est.P - est.P.T).max() < 1e-9
        assert np.linalg.eigvalsh(est.P).min() >= -1e-9
    return est


def test_covariance_stays_symmetric_psd():
    random_op_sequence(seed=42, ops=2000)


def test_fused_beats_baselines_single_seed():
    r = fusion_rmse(seed=1)
    assert r["fused"] < r["gnss_only"]
    assert r["fused"] < r["dead_reckoning"]
