"""Asymptotic information matrices and standardized-error transforms.

The stage-one estimator is sqrt(n)-consistent with limiting covariance
inv(gamma1); the stage-two estimator is sqrt(t_n)-consistent with limiting
covariance inv(gamma2).  gamma2 is the curvature at the truth of the
population objective limit: gamma2[i,j] = int_0^inf Tr[(d_i g)' Sigma*^-1
(d_j g) Sigma*^-1] ds for the mean-prediction mismatch kernel g(s; theta2),
with parameter derivatives taken by central differences.  For the scalar
model a closed form in (a, alpha) and their gradients is used instead.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .errors import ConfigurationError, NumericError
from .estimate import _MismatchKernel
from .linalg import sqrtm_spd, symmetrize
from .model import ModelSpec, SamplingScheme, ThetaPoint, coeff_derivatives, eval_coeffs
from .riccati import solve_are

Array = np.ndarray

PD_EIG_REL = 1e-10


def gamma1(spec: ModelSpec, theta1_star) -> Array:
    """Stage-one information: 1/2 v v' with v_j = Tr(Sigma*^-1 d_j Sigma)."""
    theta1_star = np.atleast_1d(np.asarray(theta1_star, dtype=float))
    theta = ThetaPoint(theta1_star, 0.5 * (spec.theta2_box[:, 0] + spec.theta2_box[:, 1]))
    co = eval_coeffs(spec, theta)
    d = coeff_derivatives(spec, theta, order=1)
    sinv = np.linalg.inv(co.Sigma)
    v = np.array([float(np.trace(sinv @ d.dSigma[j])) for j in range(spec.m1)])
    return 0.5 * np.outer(v, v)


def _is_pd(m: Array) -> bool:
    if m.size == 0:
        return False
    w = np.linalg.eigvalsh(symmetrize(m))
    return bool(w.min() > PD_EIG_REL * max(np.trace(m), 0.0))


def _alpha_scalar_closed_form(spec: ModelSpec, theta1_star: Array, theta2: Array) -> float:
    co = eval_coeffs(spec, ThetaPoint(theta1_star, theta2))
    a = float(co.a[0, 0])
    num = float((co.b[0, 0] * co.c[0, 0]) ** 2) / float(co.Sigma[0, 0])
    return float(np.sqrt(a * a + num))


def gamma2_closed_form_1d(spec: ModelSpec, theta_star: ThetaPoint,
                          fd_step: float = 1e-6) -> Array:
    """Scalar-model information from the gradients of the mean-reversion rate a
    and the closed-loop rate alpha = sqrt(a^2 + b^2 c^2 / Sigma) at the truth."""
    if spec.d1 != 1 or spec.d2 != 1:
        raise ConfigurationError("closed form requires d1 = d2 = 1")
    d = coeff_derivatives(spec, theta_star, order=1)
    da = d.da[:, 0, 0]
    t2 = theta_star.theta2
    steps = fd_step * np.maximum(1.0, np.abs(t2))
    dal = np.empty(spec.m2)
    for i in range(spec.m2):
        e = np.zeros_like(t2)
        e[i] = steps[i]
        dal[i] = (_alpha_scalar_closed_form(spec, theta_star.theta1, t2 + e)
                  - _alpha_scalar_closed_form(spec, theta_star.theta1, t2 - e)) / (2 * steps[i])
    sol = solve_are(spec, theta_star, want_minus=False)
    al = float(sol.alpha[0, 0])
    a = float(eval_coeffs(spec, theta_star).a[0, 0])
    return (np.outer(dal, dal) / (2.0 * al) + np.outer(da, da) / (2.0 * a)
            - (np.outer(dal, da) + np.outer(da, dal)) / (al + a))


def gamma2_quadrature(spec: ModelSpec, theta_star: ThetaPoint,
                      t_max: float | None = None, fd_step: float = 1e-5) -> Array:
    """General-model information by adaptive quadrature of the differentiated
    mismatch kernel, truncated where the exponentially decaying integrand is
    negligible."""
    t2 = theta_star.theta2
    steps = fd_step * (1.0 + np.abs(t2))
    kernels = []
    for i in range(spec.m2):
        e = np.zeros_like(t2)
        e[i] = steps[i]
        kp = _MismatchKernel.build(spec, t2 + e, theta_star)
        km = _MismatchKernel.build(spec, t2 - e, theta_star)
        kernels.append((kp, km, 2.0 * steps[i]))
    if not kernels:
        return np.zeros((0, 0))
    rho = min(min(kp.rho, km.rho) for kp, km, _ in kernels)
    horizon = t_max if t_max is not None else 30.0 / rho
    sinv = kernels[0][0].sigma_star_inv

    def integrand(s: float) -> Array:
        dg = [(kp.g(s) - km.g(s)) / w for kp, km, w in kernels]
        out = np.empty((spec.m2, spec.m2))
        for i in range(spec.m2):
            wi = sinv @ dg[i] @ sinv
            for j in range(i, spec.m2):
                out[i, j] = out[j, i] = float(np.sum(wi * dg[j]))
        return out

    val, err, info = scipy.integrate.quad_vec(integrand, 0.0, horizon, epsabs=1e-11,
                                              epsrel=1e-9, full_output=True)
    if not info.success:
        raise NumericError("quadrature for the information matrix did not converge")
    return symmetrize(val)


def gamma2(spec: ModelSpec, theta_star: ThetaPoint, method: str = "auto",
           t_max: float | None = None) -> Array:
    """Stage-two information matrix; "auto" picks the scalar closed form when
    d1 = d2 = 1 and quadrature otherwise."""
    if method == "auto":
        method = "closed_form" if spec.d1 == spec.d2 == 1 else "quadrature"
    if method == "closed_form":
        return gamma2_closed_form_1d(spec, theta_star)
    if method == "quadrature":
        return gamma2_quadrature(spec, theta_star, t_max=t_max)
    raise ConfigurationError(f"unknown gamma2 method {method!r}")


@dataclass(frozen=True)
class AsymptoticInfo:
    """Information matrices with the theoretical standard errors they imply at
    a given sampling scheme: se1 = sqrt(diag(inv(gamma1))/n),
    se2 = sqrt(diag(inv(gamma2))/t_n)."""

    gamma1: Array
    gamma2: Array
    se1: Array
    se2: Array
    pd_flag1: bool
    pd_flag2: bool


def evaluate_info(spec: ModelSpec, theta_star: ThetaPoint, scheme: SamplingScheme,
                  gamma2_method: str = "auto") -> AsymptoticInfo:
    g1 = gamma1(spec, theta_star.theta1)
    g2 = gamma2(spec, theta_star, method=gamma2_method)
    pd1 = _is_pd(g1)
    pd2 = _is_pd(g2)
    se1 = np.sqrt(np.diag(np.linalg.inv(g1)) / scheme.n) if pd1 else np.full(spec.m1, np.nan)
    se2 = np.sqrt(np.diag(np.linalg.inv(g2)) / scheme.t_n) if pd2 else np.full(spec.m2, np.nan)
    return AsymptoticInfo(gamma1=g1, gamma2=g2, se1=se1, se2=se2,
                          pd_flag1=pd1, pd_flag2=pd2)


def standardized_errors(estimates: Array, theta_star, gamma: Array, rate: float) -> Array:
    """Map replication estimates to z_r = rate * gamma^(1/2) (theta_hat_r - theta*),
    which is asymptotically standard normal per coordinate."""
    estimates = np.atleast_2d(np.asarray(estimates, dtype=float))
    theta_star = np.atleast_1d(np.asarray(theta_star, dtype=float))
    gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
    if not _is_pd(gamma):
        raise NumericError("information matrix is not positive definite")
    root = sqrtm_spd(gamma)
    return rate * (estimates - theta_star) @ root
