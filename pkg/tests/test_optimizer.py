import numpy as np
import pytest

from scwfprep.optimizer import AdamWState, Schedule, adamw_step


def test_first_step_hand_value():
    state = AdamWState.zeros(1)
    theta = np.zeros(1)
    grad = np.ones(1)
    new_state, new_theta = adamw_step(state, theta, grad, lr=0.03)
    expected = -0.03 / (1.0 + 1e-8)  # mhat = vhat = 1 after bias correction
    assert new_theta[0] == pytest.approx(expected, abs=1e-12)
    assert new_state.step == 1
    assert new_state.m[0] == pytest.approx(0.1)
    assert new_state.v[0] == pytest.approx(0.001)


def test_zero_gradient_fresh_state_leaves_theta():
    state = AdamWState.zeros(3)
    theta = np.array([0.4, -0.2, 1.0])
    _, new_theta = adamw_step(state, theta, np.zeros(3), lr=0.03)
    assert np.array_equal(new_theta, theta)


def test_zero_gradient_decays_moments():
    state = AdamWState(step=5, m=np.array([1.0]), v=np.array([2.0]))
    new_state, _ = adamw_step(state, np.zeros(1), np.zeros(1), lr=0.01)
    assert new_state.m[0] == pytest.approx(0.9)
    assert new_state.v[0] == pytest.approx(2 * 0.999)


def test_first_step_moves_against_gradient_sign():
    rng = np.random.default_rng(0)
    grad = rng.normal(size=16)
    grad[np.abs(grad) < 1e-3] = 1.0
    state = AdamWState.zeros(16)
    theta = rng.normal(size=16)
    _, new_theta = adamw_step(state, theta, grad, lr=0.01)
    assert np.all(np.sign(new_theta - theta) == -np.sign(grad))


def test_gradient_scale_invariance_in_steady_state():
    finals = []
    for scale in (1.0, 2.0):
        state = AdamWState.zeros(1)
        theta = np.zeros(1)
        for _ in range(500):
            state, theta = adamw_step(state, theta, np.array([scale]), lr=0.03)
        finals.append(theta[0])
    assert abs(finals[0] - finals[1]) <= 1e-3


def test_decoupled_weight_decay():
    state = AdamWState.zeros(2, weight_decay=0.1)
    theta = np.array([1.0, -2.0])
    _, new_theta = adamw_step(state, theta, np.zeros(2), lr=0.5)
    assert np.allclose(new_theta, theta - 0.5 * 0.1 * theta, atol=1e-15)


def test_step_is_pure():
    state = AdamWState.zeros(4)
    theta = np.ones(4)
    grad = np.full(4, 0.3)
    out1 = adamw_step(state, theta, grad, lr=0.02)
    out2 = adamw_step(state, theta, grad, lr=0.02)
    assert np.array_equal(out1[1], out2[1])
    assert np.array_equal(out1[0].m, out2[0].m)
    assert state.step == 0 and np.all(state.m == 0.0)
    assert np.all(theta == 1.0)


def test_shape_mismatch():
    state = AdamWState.zeros(3)
    with pytest.raises(ValueError):
        adamw_step(state, np.zeros(3), np.zeros(4), lr=0.01)
    with pytest.raises(ValueError):
        adamw_step(state, np.zeros(2), np.zeros(2), lr=0.01)


def test_lr_schedule_endpoints_and_midpoint():
    sched = Schedule(total_iters=10000)
    assert sched.lr_at(0) == 0.03
    assert sched.lr_at(10000) == 0.015
    assert sched.lr_at(5000) == pytest.approx(0.0225, abs=1e-15)


def test_lr_schedule_range_errors():
    sched = Schedule(total_iters=100)
    with pytest.raises(ValueError):
        sched.lr_at(-1)
    with pytest.raises(ValueError):
        sched.lr_at(101)


def test_eps_schedule_values():
    sched = Schedule()
    assert sched.eps_at(0) == 1.0
    assert sched.eps_at(999) == 1.0
    assert sched.eps_at(1000) == pytest.approx(0.7)
    assert sched.eps_at(3000) == pytest.approx(0.343, rel=1e-12)
    with pytest.raises(ValueError):
        sched.eps_at(-1)


def test_schedules_nonincreasing():
    sched = Schedule(total_iters=5000)
    lrs = [sched.lr_at(t) for t in range(0, 5001, 250)]
    epss = [sched.eps_at(t) for t in range(0, 12000, 500)]
    assert all(a >= b for a, b in zip(lrs, lrs[1:]))
    assert all(a >= b for a, b in zip(epss, epss[1:]))


def test_lr_shapes():
    const = Schedule(total_iters=10, lr_shape="constant")
    assert const.lr_at(0) == const.lr_at(10) == 0.03
    expo = Schedule(total_iters=10, lr_shape="exponential")
    assert expo.lr_at(0) == pytest.approx(0.03)
    assert expo.lr_at(10) == pytest.approx(0.015)
    assert expo.lr_at(5) == pytest.approx(np.sqrt(0.03 * 0.015))
    with pytest.raises(ValueError):
        Schedule(lr_shape="cosine")


def test_schedule_validation():
    with pytest.raises(ValueError):
        Schedule(total_iters=0)
    with pytest.raises(ValueError):
        Schedule(eps_every=0)
