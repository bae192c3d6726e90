import numpy as np
import pytest

import hidden_ou as ho

from conftest import A_STAR, B_STAR, SIGMA_STAR


def test_transition_small_h_limit(spec, theta_star):
    phi0, q0 = ho.exact_transition(spec, theta_star, 0.0)
    np.testing.assert_array_equal(phi0, np.eye(2))
    np.testing.assert_array_equal(q0, np.zeros((2, 2)))
    phi, q = ho.exact_transition(spec, theta_star, 1e-8)
    np.testing.assert_allclose(phi, np.eye(2), atol=2e-8)
    # leading order Q = BB' h
    bb_full = np.diag([0.3**2, 0.02**2]) * 1e-8
    np.testing.assert_allclose(q, bb_full, atol=1e-16)


def test_transition_noise_free(theta_star):
    spec = ho.scalar_family(theta1_box=((0.0, 0.1),), theta2_box=((0.1, 5.0), (0.0, 1.0)))
    theta = ho.ThetaPoint([0.0], [1.0, 0.0])
    phi, q = ho.exact_transition(spec, theta, 0.25)
    np.testing.assert_allclose(q, np.zeros((2, 2)), atol=1e-15)
    assert phi[0, 0] == pytest.approx(np.exp(-0.25), rel=1e-12)


def test_transition_ou_variance(spec, theta_star):
    _, q = ho.exact_transition(spec, theta_star, 0.1)
    expected = B_STAR**2 * (1 - np.exp(-2 * A_STAR * 0.1)) / (2 * A_STAR)
    assert q[0, 0] == pytest.approx(expected, rel=1e-10)


def test_same_seed_bitwise_identical(spec, theta_star):
    sch = ho.SamplingScheme(n=500, h=0.01)
    p1 = ho.simulate_path(spec, theta_star, sch, seed=123)
    p2 = ho.simulate_path(spec, theta_star, sch, seed=123)
    np.testing.assert_array_equal(p1.y, p2.y)
    np.testing.assert_array_equal(p1.x_truth, p2.x_truth)
    p3 = ho.simulate_path(spec, theta_star, sch, seed=124)
    assert not np.array_equal(p3.y, p1.y)


def test_noise_free_flow_is_exact():
    spec = ho.scalar_family(theta1_box=((0.0, 0.1),), theta2_box=((0.1, 5.0), (0.0, 1.0)))
    theta = ho.ThetaPoint([0.0], [1.0, 0.0])
    sch = ho.SamplingScheme(n=1000, h=1e-3)
    path = ho.simulate_path(spec, theta, sch, init=(np.array([1.0]), np.array([0.0])),
                            seed=0)
    assert path.x_truth[-1, 0] == pytest.approx(np.exp(-1.0), rel=1e-12)
    # Y_t = int_0^t X ds = 1 - e^-t for X0 = 1, a = 1
    assert path.y[-1, 0] == pytest.approx(1 - np.exp(-1.0), rel=1e-10)


def test_long_run_stationary_variance(spec, theta_star):
    sch = ho.SamplingScheme(n=10_000, h=0.01)
    start = 500  # t = 5
    vals = []
    for seed in range(10):
        path = ho.simulate_path(spec, theta_star, sch, seed=seed)
        vals.append(np.var(path.x_truth[start:, 0]))
    target = B_STAR**2 / (2 * A_STAR)
    assert np.mean(vals) == pytest.approx(target, rel=0.10)


def test_one_step_moments(spec, theta_star):
    h = 0.05
    phi, q = ho.exact_transition(spec, theta_star, h)
    z0 = np.array([0.1, 0.2])
    rng = np.random.default_rng(77)
    reps = 10_000
    from hidden_ou.linalg import psd_sqrt_factor
    steps = phi @ z0 + (rng.standard_normal((reps, 2)) @ psd_sqrt_factor(q).T)
    mean = steps.mean(axis=0)
    cov = np.cov(steps.T)
    se_mean = np.sqrt(np.diag(q) / reps)
    assert np.all(np.abs(mean - phi @ z0) < 5 * se_mean)
    for i in range(2):
        for j in range(2):
            se = np.sqrt((q[i, i] * q[j, j] + q[i, j] ** 2) / reps)
            assert abs(cov[i, j] - q[i, j]) < 5 * se


def test_y_increment_variance_small_h_law(spec, theta_star):
    # Var(dY)/h = Sigma + c^2 Var(X) h + o(h): deviation shrinks linearly in h
    sigma2 = SIGMA_STAR**2
    devs = {}
    for h, seed in ((1e-2, 1), (1e-3, 2)):
        sch = ho.SamplingScheme(n=20_000, h=h)
        path = ho.simulate_path(spec, theta_star, sch, init="stationary-x", seed=seed)
        dev = abs(np.var(path.increments()[:, 0], ddof=1) / h - sigma2)
        devs[h] = dev
        assert dev < 2.0 * (B_STAR**2 / (2 * A_STAR)) * h
    assert devs[1e-3] < devs[1e-2]


def test_euler_fallback_close_to_exact():
    spec = ho.scalar_family(theta1_box=((0.0, 0.1),), theta2_box=((0.1, 5.0), (0.0, 1.0)))
    theta = ho.ThetaPoint([0.0], [1.0, 0.0])
    sch = ho.SamplingScheme(n=1000, h=1e-3)
    init = (np.array([1.0]), np.array([0.0]))
    exact = ho.simulate_path(spec, theta, sch, init=init, seed=0, method="exact")
    euler = ho.simulate_path(spec, theta, sch, init=init, seed=0, method="euler")
    assert abs(euler.x_truth[-1, 0] - exact.x_truth[-1, 0]) < 5e-4


def test_stationary_x_init_matches_lyapunov(spec, theta_star):
    v = ho.stationary_x_cov(spec, theta_star)[0, 0]
    assert v == pytest.approx(B_STAR**2 / (2 * A_STAR), rel=1e-12)
    sch = ho.SamplingScheme(n=1, h=0.01)
    draws = np.array([ho.simulate_path(spec, theta_star, sch, init="stationary-x",
                                       seed=s).x_truth[0, 0] for s in range(2000)])
    se = v * np.sqrt(2.0 / 2000)
    assert abs(np.var(draws, ddof=1) - v) < 5 * se
    assert abs(np.mean(draws)) < 5 * np.sqrt(v / 2000)


def test_increments_shape(spec, theta_star):
    sch = ho.SamplingScheme(n=50, h=0.01)
    path = ho.simulate_path(spec, theta_star, sch, seed=5)
    dy = path.increments()
    assert dy.shape == (50, 1)
    np.testing.assert_allclose(path.y[0], 0.0)
    np.testing.assert_allclose(np.cumsum(dy[:, 0]), path.y[1:, 0] - path.y[0, 0],
                               atol=1e-12)
