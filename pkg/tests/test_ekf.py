import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from secnav.ekf import (
    DEFAULT_P0,
    BeliefState,
    FilterConfig,
    gain,
    jacobian_f,
    joseph_update,
    predict,
    run_filter,
    simulate_truth,
    transition,
    update,
)
from secnav.errors import SingularInnovation
from secnav.geometry import Point2
from secnav.motion import ControlInput, EntityState, MotionParams, step

from simruns import random_unclamped_state, straight_filter_run

P = MotionParams()


def fd_jacobian(mean, u, params, h=1e-6):
    J = np.empty((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        d = transition(mean + e, u, params) - transition(mean - e, u, params)
        d[3] = math.remainder(d[3], 2 * math.pi)
        J[:, j] = d / (2 * h)
    return J


def is_psd(M, floor=-1e-9):
    return np.allclose(M, M.T) and np.linalg.eigvalsh(M).min() >= floor


def random_psd(rng, scale=1.0):
    A = rng.normal(size=(4, 4)) * scale
    return A @ A.T


# -- Jacobian ------------------------------------------------------------------------


def test_jacobian_heading_zero_on_ramp():
    # speed on the acceleration ramp, heading 0, no turn: identity plus the
    # speed column into x and the heading column into y
    u = ControlInput(8.0, 0.0)
    F = jacobian_f([0.0, 0.0, 2.0, 0.0], u, P)
    v1 = 2.0 + P.accel_limit * P.dt
    expected = np.eye(4)
    expected[0, 2] = P.dt
    expected[1, 3] = v1 * P.dt
    assert F == pytest.approx(expected, abs=1e-15)


def test_jacobian_at_setpoint_holds_speed():
    # speed already at the command: the clamp, not the ramp, sets v', so the
    # speed column vanishes and only the heading coupling remains
    F = jacobian_f([3.0, 4.0, 2.0, 0.0], ControlInput(2.0, 0.0), P)
    expected = np.eye(4)
    expected[2, 2] = 0.0
    expected[1, 3] = 2.0 * P.dt
    assert F == pytest.approx(expected, abs=1e-15)
    assert F == pytest.approx(fd_jacobian(np.array([3.0, 4.0, 2.0, 0.0]), ControlInput(2.0, 0.0), P), abs=1e-4)


def test_jacobian_speed_row_zero_at_v_max():
    F = jacobian_f([0.0, 0.0, P.v_max, 0.4], ControlInput(P.v_max + 5, 0.0), P)
    assert np.all(F[2] == 0.0)
    assert F[0, 2] == 0.0 and F[1, 2] == 0.0


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(0)
    for _ in range(200):
        mean, u = random_unclamped_state(rng)
        assert np.max(np.abs(jacobian_f(mean, u, P) - fd_jacobian(mean, u, P))) < 1e-4


def test_transition_matches_motion_step():
    rng = np.random.default_rng(1)
    for _ in range(100):
        mean, u = random_unclamped_state(rng)
        s = step(EntityState.from_vector(mean), u, P)
        assert transition(mean, u, P) == pytest.approx(s.as_vector(), abs=1e-12)


# -- predict -------------------------------------------------------------------------


def test_predict_certain_state_stays_certain():
    s = EntityState(Point2(1.0, 2.0), 3.0, 0.5)
    u = ControlInput(4.0, 0.2)
    cfg = FilterConfig(Q=np.zeros((4, 4)))
    b = predict(BeliefState(s.as_vector(), np.zeros((4, 4))), u, P, cfg)
    assert b.mean == pytest.approx(step(s, u, P).as_vector(), abs=1e-12)
    assert np.all(b.cov == 0.0)


def test_predict_identity_propagation():
    cfg = FilterConfig()
    sigma2 = 0.7
    b = predict(BeliefState([0.0, 0.0, 0.0, 0.0], sigma2 * np.eye(4)), ControlInput(0.0, 0.0), P, cfg)
    # at rest the speed is held by the clamp, so F = diag(1, 1, 0, 1)
    assert b.cov == pytest.approx(sigma2 * np.diag([1.0, 1.0, 0.0, 1.0]) + cfg.Q)


@given(st.integers(0, 2**32 - 1))
def test_predict_covariance_is_f_p_ft_plus_q(seed):
    rng = np.random.default_rng(seed)
    cfg = FilterConfig()
    mean, u = random_unclamped_state(rng)
    P0 = random_psd(rng)
    F = jacobian_f(mean, u, P)
    assert predict(BeliefState(mean, P0), u, P, cfg).cov == pytest.approx(F @ P0 @ F.T + cfg.Q, abs=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_predict_keeps_psd_and_adds_q(seed):
    rng = np.random.default_rng(seed)
    cfg = FilterConfig()
    mean = np.array([*rng.uniform(-50, 50, 2), rng.uniform(0, 10), rng.uniform(-math.pi, math.pi)])
    u = ControlInput(rng.uniform(0, 12), rng.uniform(-1, 1))
    b = predict(BeliefState(mean, random_psd(rng)), u, P, cfg)
    assert np.trace(b.cov) >= np.trace(cfg.Q)
    assert is_psd(b.cov)
    assert -math.pi <= b.mean[3] < math.pi


# -- update --------------------------------------------------------------------------


def test_scalar_kalman_algebra():
    cfg = FilterConfig(H=[[1.0, 0.0, 0.0, 0.0]], R=[[1.0]])
    b = BeliefState([5.0, 0.0, 0.0, 0.0], np.eye(4))
    post = update(b, [7.0], cfg)
    assert post.mean[0] == pytest.approx(6.0)
    assert post.cov[0, 0] == pytest.approx(0.5)


def test_uninformative_measurement_leaves_prior():
    cfg = FilterConfig(R=1e12 * np.eye(3))
    b = BeliefState([1.0, 2.0, 3.0, 0.1], DEFAULT_P0)
    post = update(b, [50.0, -50.0, 9.0], cfg)
    assert post.mean == pytest.approx(b.mean, abs=1e-9)
    assert post.cov == pytest.approx(b.cov, abs=1e-9)


def test_uninformative_prior_follows_measurement():
    cfg = FilterConfig(R=1e-6 * np.eye(3))
    b = BeliefState([1.0, 2.0, 3.0, 0.1], 1e6 * np.eye(4))
    post = update(b, [4.0, -5.0, 6.0], cfg)
    assert post.mean[:3] == pytest.approx([4.0, -5.0, 6.0], abs=1e-6)


def test_singular_innovation_raises():
    cfg = FilterConfig(R=np.eye(3))
    huge = BeliefState([0, 0, 0, 0], np.diag([1e14, 1.0, 1.0, 1.0]))
    with pytest.raises(SingularInnovation):
        update(huge, [0.0, 0.0, 0.0], cfg)
    nan = BeliefState([0, 0, 0, 0], np.full((4, 4), np.nan))
    with pytest.raises(SingularInnovation):
        update(nan, [0.0, 0.0, 0.0], cfg)


@given(st.integers(0, 2**32 - 1))
def test_joseph_form_matches_at_optimal_gain(seed):
    rng = np.random.default_rng(seed)
    cfg = FilterConfig(R=random_psd(rng, 0.3)[:3, :3] + 0.01 * np.eye(3))
    Pm = random_psd(rng)
    K, _ = gain(Pm, cfg)
    short = (np.eye(4) - K @ cfg.H) @ Pm
    assert np.max(np.abs(short - joseph_update(Pm, K, cfg))) < 1e-8


@given(st.integers(0, 2**32 - 1))
def test_update_keeps_psd(seed):
    rng = np.random.default_rng(seed)
    b = BeliefState(rng.normal(size=4), random_psd(rng))
    post = update(b, rng.normal(size=3), FilterConfig())
    assert is_psd(post.cov)
    assert np.trace(post.cov) <= np.trace(b.cov) + 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        FilterConfig(Q=np.eye(3))
    with pytest.raises(ValueError):
        FilterConfig(R=-np.eye(3))
    with pytest.raises(ValueError):
        FilterConfig(R=np.zeros((3, 3)))
    with pytest.raises(ValueError):
        FilterConfig(Q=np.triu(np.ones((4, 4))))


# -- run_filter ----------------------------------------------------------------------


def test_noiseless_filter_tracks_truth():
    s0 = EntityState(Point2(0.0, 0.0), 0.0, 0.0)
    controls = [ControlInput(4.0, 0.3 * math.sin(k / 7)) for k in range(120)]
    truth = simulate_truth(s0, controls, P)
    z = [s.as_vector()[:3] for s in truth]
    est = run_filter(BeliefState.from_state(s0), controls, z, P, FilterConfig())
    for b, s in zip(est, truth):
        assert b.mean == pytest.approx(s.as_vector(), abs=1e-6)


def test_dropout_trace_pattern():
    # a slow ramp keeps the speed off every clamp, so no predict can erase
    # speed variance and the pattern is purely predict-grows, update-shrinks
    params = MotionParams(accel_limit=0.01)
    s0 = EntityState(Point2(0.0, 0.0), 2.0, 0.0)
    controls = [ControlInput(8.0, 0.0)] * 40
    truth = simulate_truth(s0, controls, params)
    z = [s.as_vector()[:3] if k % 2 else None for k, s in enumerate(truth)]
    cfg = FilterConfig()
    b = BeliefState.from_state(s0)
    for u, zk in zip(controls, z):
        prior = predict(b, u, params, cfg)
        assert np.trace(prior.cov) > np.trace(b.cov)
        b = prior if zk is None else update(prior, zk, cfg)
        if zk is not None:
            assert np.trace(b.cov) < np.trace(prior.cov)
    est = run_filter(BeliefState.from_state(s0), controls, z, params, cfg)
    assert est[-1].cov == pytest.approx(b.cov)


def test_run_filter_alignment_checked():
    with pytest.raises(ValueError):
        run_filter(BeliefState([0, 0, 0, 0], np.eye(4)), [ControlInput(1.0, 0.0)], [], P, FilterConfig())


def test_filtered_beats_raw_on_a_few_seeds():
    for seed in range(5):
        filt, raw = straight_filter_run(seed, steps=200)
        assert filt < raw


def test_belief_state_clamps_negative_speed_for_state():
    b = BeliefState([0.0, 0.0, -0.01, 4.0], np.eye(4))
    assert b.as_state().velocity == 0.0
    assert -math.pi <= b.mean[3] < math.pi
