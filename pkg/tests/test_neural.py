import json
import math

import numpy as np
import pytest

from uavma.errors import TrainingError, UsageError
from uavma.neural import (HALF_LOG_2PI, Adam, DenseNet, log_prob_of, sample_policy, squash_backward,
                          squash_sample)

trapezoid = getattr(np, "trapezoid", None) or np.trapz


def fd_check(f, x, grad, idx, h=1e-5):
    """Central differences of scalar ``f`` at flat indices ``idx`` of ``x``."""
    for i in idx:
        old = x.flat[i]
        x.flat[i] = old + h
        fp = f()
        x.flat[i] = old - h
        fm = f()
        x.flat[i] = old
        num = (fp - fm) / (2 * h)
        assert abs(num - grad.flat[i]) <= max(1e-5, 1e-3 * abs(num)), (i, num, grad.flat[i])


def test_zero_net_outputs_zero():
    net = DenseNet([3, 5, 2])
    for p in net.params:
        p[...] = 0.0
    assert np.all(net.forward(np.ones(3)) == 0.0)


def test_identity_layer():
    net = DenseNet([3, 3], params=[np.eye(3), np.zeros(3)])
    x = np.array([1.5, -2.0, 0.25])
    assert np.array_equal(net.forward(x), x)


def test_forward_matches_hand_rolled():
    rng = np.random.default_rng(1)
    net = DenseNet([4, 8, 2], rng, final_scale=1.0)
    x = rng.normal(size=4)
    w0, b0, w1, b1 = net.params
    hidden = [max(0.0, sum(x[i] * w0[i, j] for i in range(4)) + b0[j]) for j in range(8)]
    ref = [sum(hidden[j] * w1[j, k] for j in range(8)) + b1[k] for k in range(2)]
    assert np.allclose(net.forward(x), ref, rtol=0, atol=1e-12)


def test_shape_mismatch_and_order_errors():
    net = DenseNet([3, 4, 1])
    with pytest.raises(UsageError):
        net.backward(np.ones(1))
    with pytest.raises(UsageError):
        net.forward(np.ones(4))


def test_linear_closed_form_gradient():
    rng = np.random.default_rng(2)
    net = DenseNet([3, 2], rng, final_scale=1.0)
    x, y = rng.normal(size=3), rng.normal(size=2)
    out = net.forward(x)
    grads, _ = net.backward(2 * (out - y))
    w, b = net.params
    resid = 2 * (x @ w + b - y)
    assert np.allclose(grads[0], np.outer(x, resid))
    assert np.allclose(grads[1], resid)


def test_backward_matches_finite_differences():
    rng = np.random.default_rng(3)
    net = DenseNet([5, 16, 16, 3], rng, final_scale=1.0)
    x = rng.normal(size=(7, 5))
    target = rng.normal(size=(7, 3))

    def loss():
        return float(np.sum((net.forward(x) - target) ** 2 * 0.5))

    out = net.forward(x)
    grads, gin = net.backward(out - target)
    for p, g in zip(net.params, grads):
        fd_check(loss, p, g, rng.choice(p.size, min(p.size, 25), replace=False))
    fd_check(loss, x, gin, range(x.size))


def test_zero_upstream_gradient():
    net = DenseNet([3, 4, 2], np.random.default_rng(0))
    net.forward(np.ones(3))
    grads, gin = net.backward(np.zeros(2))
    assert all(np.all(g == 0) for g in grads) and np.all(gin == 0)


def test_net_serialization_bit_exact():
    net = DenseNet([3, 6, 2], np.random.default_rng(4))
    back = DenseNet.from_dict(json.loads(json.dumps(net.to_dict())))
    assert all(np.array_equal(a, b) for a, b in zip(net.params, back.params))
    assert np.array_equal(net.flat(), back.flat())


def test_zero_location_zero_noise():
    raw = np.array([0.3, -1.0])
    head = np.concatenate((np.zeros(2), raw))
    s = squash_sample(head, np.zeros(2))
    scale = np.log1p(np.exp(raw))
    assert np.all(s.action == 0.0)
    assert s.log_prob == pytest.approx(np.sum(-np.log(scale) - HALF_LOG_2PI), rel=1e-12)


def test_scale_clamp_keeps_log_prob_finite():
    head = np.array([0.7, -80.0])
    s = squash_sample(head, np.array([0.5]))
    assert s.action[0] == pytest.approx(np.tanh(0.7), abs=1e-8)
    assert np.isfinite(s.log_prob)
    assert s.log_prob == pytest.approx(-0.125 + 20 - HALF_LOG_2PI - math.log(1 - math.tanh(0.7 + math.exp(-20) * 0.5) ** 2))


@pytest.mark.parametrize("loc,raw", [(0.0, 0.0), (0.8, -0.5), (-1.5, 0.9)])
def test_squashed_density_integrates_to_one(loc, raw):
    a = np.linspace(-1 + 1e-9, 1 - 1e-9, 400_001)
    u = np.arctanh(a)
    head = np.broadcast_to(np.array([loc, raw]), (a.size, 2))
    logp, _ = log_prob_of(head, u[:, None])
    dens = np.exp(logp)
    assert trapezoid(dens, a) == pytest.approx(1.0, abs=1e-3)
    sigma = np.log1p(np.exp(raw))
    ref = np.exp(-0.5 * ((u - loc) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi)) / (1 - a * a)
    mid = slice(1000, -1000)
    assert np.allclose(dens[mid], ref[mid], rtol=1e-6)


def test_log_prob_of_agrees_with_sample():
    rng = np.random.default_rng(5)
    head, eps = rng.normal(size=(6, 4)), rng.normal(size=(6, 2))
    s = squash_sample(head, eps)
    lp, _ = log_prob_of(head, s.pre_tanh)
    assert np.allclose(lp, s.log_prob, rtol=1e-12, atol=1e-12)


def test_squash_backward_matches_finite_differences():
    rng = np.random.default_rng(6)
    head, eps = rng.normal(size=(5, 6)), rng.normal(size=(5, 3))
    wa, wl = rng.normal(size=(5, 3)), rng.normal(size=5)

    def f():
        s = squash_sample(head, eps)
        return float(np.sum(wa * s.action) + np.sum(wl * s.log_prob))

    g = squash_backward(squash_sample(head, eps), wa, wl)
    fd_check(f, head, g, range(head.size))


def test_log_prob_of_gradient():
    rng = np.random.default_rng(7)
    head, u = rng.normal(size=(4, 4)), rng.normal(size=(4, 2))
    w = rng.normal(size=4)

    def f():
        return float(np.sum(w * log_prob_of(head, u)[0]))

    g = log_prob_of(head, u)[1](w)
    fd_check(f, head, g, range(head.size))


def test_sample_policy_shapes():
    net = DenseNet([3, 8, 4], np.random.default_rng(0))
    s = sample_policy(net, np.ones(3), np.zeros(2))
    assert s.action.shape == (2,) and np.all(np.abs(s.action) <= 1) and np.isfinite(s.log_prob)


def test_adam_zero_gradient_noop():
    p = [np.array([1.0, -2.0])]
    Adam(1e-2).step(p, [np.zeros(2)])
    assert p[0].tolist() == [1.0, -2.0]


def test_adam_first_step_is_lr():
    p = [np.array([0.0])]
    opt = Adam(1e-3)
    opt.step(p, [np.array([1.0])])
    assert p[0][0] == pytest.approx(-1e-3, rel=1e-6)
    for _ in range(5):
        opt.step(p, [np.array([1.0])])
    assert p[0][0] == pytest.approx(-6e-3, rel=1e-5)


def test_adam_non_finite_raises():
    with pytest.raises(TrainingError):
        Adam().step([np.zeros(2)], [np.array([np.nan, 0.0])])


def test_adam_deterministic_and_serializable():
    rng = np.random.default_rng(8)
    grads = [rng.normal(size=(3, 2)) for _ in range(4)]
    p1, p2 = [np.ones((3, 2))], [np.ones((3, 2))]
    o1, o2 = Adam(0.01), Adam(0.01)
    for g in grads[:2]:
        o1.step(p1, [g])
        o2.step(p2, [g])
    o3 = Adam.from_dict(json.loads(json.dumps(o2.to_dict())), [(3, 2)])
    p3 = [p2[0].copy()]
    for g in grads[2:]:
        o1.step(p1, [g])
        o3.step(p3, [g])
    assert np.array_equal(p1[0], p3[0])
