import dataclasses
from functools import partial

import numpy as np
import pytest

import hidden_ou as ho
from hidden_ou.errors import ConfigurationError, DomainError
from hidden_ou.model import _const_map, theta_grid


def test_scalar_family_eval(spec):
    co = ho.eval_coeffs(spec, ho.ThetaPoint([0.02], [1.5, 0.3]))
    assert co.a[0, 0] == 1.5
    assert co.b[0, 0] == 0.3
    assert co.c[0, 0] == 1.0
    assert co.sigma[0, 0] == 0.02
    assert co.Sigma[0, 0] == pytest.approx(0.0004, abs=0)


def test_constant_model_zero_dim_theta2():
    a = np.array([[2.0]])
    spec = ho.ModelSpec(d1=1, d2=1, m1=1, m2=0,
                        coeff_a=partial(_const_map, a),
                        coeff_b=partial(_const_map, np.array([[0.5]])),
                        coeff_c=partial(_const_map, np.array([[1.0]])),
                        coeff_sigma=lambda t1: np.array([[t1[0]]]),
                        theta1_box=np.zeros((1, 2)) + [0.01, 1.0],
                        theta2_box=np.zeros((0, 2)))
    co = ho.eval_coeffs(spec, ho.ThetaPoint([0.1], []))
    assert co.a[0, 0] == 2.0 and co.b[0, 0] == 0.5


def test_diagonal_family_eval():
    spec = ho.diagonal_family(2)
    co = ho.eval_coeffs(spec, ho.ThetaPoint([1.0, 1.0], [1.0, 2.0, 0.5, 0.7]))
    np.testing.assert_allclose(co.a, np.diag([1.0, 2.0]))
    np.testing.assert_allclose(co.b, np.diag([0.5, 0.7]))
    np.testing.assert_allclose(co.c, np.eye(2))


def test_dimension_mismatch_rejected():
    spec = ho.scalar_family()
    bad = dataclasses.replace(spec, coeff_a=partial(_const_map, np.eye(2)))
    with pytest.raises(ConfigurationError, match="coeff_a"):
        ho.eval_coeffs(bad, ho.ThetaPoint([0.02], [1.5, 0.3]))


def test_sigma_derivatives_linear_map(spec):
    theta = ho.ThetaPoint([0.02], [1.5, 0.3])
    d1 = ho.coeff_derivatives(spec, theta, order=1)
    assert d1.dsigma[0, 0, 0] == pytest.approx(1.0, abs=1e-9)
    # Sigma = theta1^2: dSigma = 2 theta1, d2Sigma = 2
    assert d1.dSigma[0, 0, 0] == pytest.approx(0.04, abs=1e-6)
    d2 = ho.coeff_derivatives(spec, theta, order=2)
    assert d2.dSigma[0, 0, 0, 0] == pytest.approx(2.0, abs=1e-6)


def test_a_derivatives_scalar_family(spec):
    theta = ho.ThetaPoint([0.02], [1.5, 0.3])
    d1 = ho.coeff_derivatives(spec, theta, order=1)
    np.testing.assert_allclose(d1.da[:, 0, 0], [1.0, 0.0], atol=1e-9)
    d2 = ho.coeff_derivatives(spec, theta, order=2)
    np.testing.assert_allclose(d2.da, 0.0, atol=1e-6)
    # symmetry in the two parameter indices
    np.testing.assert_allclose(d2.da, np.swapaxes(d2.da, 0, 1), atol=0)


def test_fd_matches_registered_analytic(spec):
    theta = ho.ThetaPoint([0.02], [1.5, 0.3])
    with_analytic = ho.coeff_derivatives(spec, theta, order=1)
    plain = dataclasses.replace(spec, analytic_derivatives={})
    fd = ho.coeff_derivatives(plain, theta, order=1)
    for name in ("da", "db", "dc", "dsigma"):
        a = getattr(with_analytic, name)
        f = getattr(fd, name)
        np.testing.assert_allclose(f, a, rtol=1e-5, atol=1e-9)


def test_fd_near_boundary_rejected(spec):
    edge = ho.ThetaPoint([spec.theta1_box[0, 0]], [1.5, 0.3])
    with pytest.raises(DomainError):
        ho.coeff_derivatives(spec, edge, order=1)


def test_stability_region_scalar(spec):
    report = ho.check_stability_region(spec, samples=1000, seed=0)
    assert report.ok
    assert report.min_real_eig_a > 0
    assert report.min_eig_bb > 0
    assert report.min_eig_Sigma > 0


def test_stability_region_flags_bad_box():
    spec = ho.scalar_family(theta2_box=((-1.0, 5.0), (0.02, 1.0)))
    report = ho.check_stability_region(spec, samples=500, seed=1)
    assert not report.ok


def test_scheme_validation():
    with pytest.raises(ConfigurationError):
        ho.SamplingScheme(n=100, h=2.0)
    with pytest.raises(ConfigurationError):
        ho.SamplingScheme(n=0, h=0.1)
    sch = ho.SamplingScheme(n=10, h=1.0)
    assert sch.t_n == pytest.approx(10.0)
    np.testing.assert_allclose(sch.times(), np.arange(11.0))


def test_contains_and_clip(spec):
    inside = ho.ThetaPoint([0.02], [1.5, 0.3])
    outside = ho.ThetaPoint([0.02], [99.0, 0.3])
    assert spec.contains(inside)
    assert not spec.contains(outside)
    clipped = spec.clip(outside)
    assert clipped.theta2[0] == spec.theta2_box[0, 1]


def test_param_names(spec):
    assert spec.param_names() == ("sigma", "a", "b")


def test_theta_grid_is_interior(spec):
    pts = theta_grid(spec.theta2_box)
    assert len(pts) == 9
    for p in pts:
        assert np.all(p > spec.theta2_box[:, 0])
        assert np.all(p < spec.theta2_box[:, 1])
