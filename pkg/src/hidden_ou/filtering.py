"""Conditional-mean filters for the latent state.

``run_discrete_filter`` evaluates the stationary-gain filter driven by
observation increments,

    m_i = exp(-alpha h) m_{i-1} + exp(-alpha h) gamma_plus c' Sigma^-1 (Y_i - Y_{i-1}),

which equals the convolution sum
exp(-alpha t_i) m0 + sum_j exp(-alpha (t_i - t_{j-1})) gamma_plus c' Sigma^-1 dY_j
at every index.  ``run_continuous_reference`` integrates the exact
conditional-mean/covariance pair (time-varying gain) on a dense grid for
validation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import filter_path_scalar, reference_filter_scalar
from .errors import ConfigurationError, NumericError
from .linalg import ar1_path, expm
from .model import ModelSpec, ThetaPoint, eval_coeffs
from .riccati import RiccatiSolution, _csc_matrix, riccati_rk4_step, solve_are
from .simulate import ObservationPath

Array = np.ndarray


@dataclass(frozen=True)
class FilterKernel:
    """Per-parameter filter constants: decay = exp(-alpha h) and
    gain = decay @ gamma_plus c' Sigma^-1, computed once per (theta, h)."""

    decay: Array
    gain: Array
    alpha: Array
    gamma_plus: Array
    c: Array
    sigma_inv: Array
    h: float

    @classmethod
    def from_parts(cls, alpha: Array, gamma_plus: Array, c: Array, Sigma: Array,
                   h: float) -> "FilterKernel":
        if h <= 0:
            raise ConfigurationError(f"h must be positive, got {h!r}")
        alpha = np.atleast_2d(np.asarray(alpha, dtype=float))
        gamma_plus = np.atleast_2d(np.asarray(gamma_plus, dtype=float))
        c = np.atleast_2d(np.asarray(c, dtype=float))
        Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
        if alpha.shape == (1, 1):
            decay = np.array([[np.exp(-alpha[0, 0] * h)]])
        else:
            decay = expm(-alpha, h)
        sigma_inv = np.linalg.inv(Sigma)
        gain = decay @ gamma_plus @ c.T @ sigma_inv
        return cls(decay=decay, gain=gain, alpha=alpha, gamma_plus=gamma_plus,
                   c=c, sigma_inv=sigma_inv, h=h)

    @classmethod
    def from_model(cls, spec: ModelSpec, theta: ThetaPoint, h: float,
                   solution: RiccatiSolution | None = None) -> "FilterKernel":
        co = eval_coeffs(spec, theta)
        if solution is None:
            solution = solve_are(spec, theta, want_minus=False)
        return cls.from_parts(solution.alpha, solution.gamma_plus, co.c, co.Sigma, h)

    @property
    def is_scalar(self) -> bool:
        return self.decay.shape == (1, 1) and self.c.shape == (1, 1)


def filter_step(kernel: FilterKernel, m_prev: Array, dy: Array) -> Array:
    """Advance the filter one observation increment."""
    return kernel.decay @ np.atleast_1d(m_prev) + kernel.gain @ np.atleast_1d(dy)


@dataclass(frozen=True)
class FilterPath:
    """Filter states m_0..m_n for one path and one parameter point.

    burn_in is metadata: the estimator excludes the first burn_in terms, the
    filter itself always runs from index 0.
    """

    m_hat: Array
    theta: ThetaPoint
    m0: Array
    burn_in: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.m_hat)):
            raise NumericError("filter produced non-finite states")


def run_discrete_filter(path: ObservationPath, spec: ModelSpec, theta: ThetaPoint,
                        m0=0.0, burn_in: int = 0,
                        kernel: FilterKernel | None = None) -> FilterPath:
    """Run the stationary-gain filter along a path.

    ``theta`` carries both the dynamics parameters and the noise-scale
    parameter used for the gain (pass the estimated or the true one,
    whichever the analysis calls for).
    """
    if kernel is None:
        kernel = FilterKernel.from_model(spec, theta, path.scheme.h)
    m0_vec = np.full(spec.d1, float(m0)) if np.ndim(m0) == 0 else np.asarray(m0, dtype=float)
    dy = path.increments()
    if kernel.is_scalar:
        m = filter_path_scalar(np.ascontiguousarray(dy[:, 0]), kernel.decay[0, 0],
                               kernel.gain[0, 0], m0_vec[0])[:, None]
    else:
        m = ar1_path(kernel.decay, m0_vec, dy @ kernel.gain.T)
    return FilterPath(m_hat=m, theta=theta, m0=m0_vec, burn_in=burn_in)


def run_continuous_reference(times: Array, y: Array, spec: ModelSpec, theta: ThetaPoint,
                             m0=0.0, gamma0: Array | float = 0.0) -> tuple[Array, Array]:
    """Integrate the exact conditional mean and covariance on a dense grid.

    The mean follows an Euler scheme driven by the supplied dense observations;
    the covariance follows the Riccati ODE under classical Runge-Kutta (the
    same stepper as ``integrate_riccati_ode``).  Returns (m, gamma) arrays of
    shapes (k+1, d1) and (k+1, d1, d1).  A covariance update of norm above 1
    in a single step means the grid is too coarse and raises ``NumericError``.
    """
    times = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    k = len(times) - 1
    if y.shape[0] != k + 1:
        raise ConfigurationError("times and y must have equal length")
    dts = np.diff(times)
    dt = float(dts[0])
    if k < 1 or not np.allclose(dts, dt, rtol=1e-8, atol=0):
        raise ConfigurationError("reference filter requires an equidistant dense grid")

    co = eval_coeffs(spec, theta)
    bb = co.b @ co.b.T
    csc = _csc_matrix(co.c, co.Sigma)
    sigma_inv = np.linalg.inv(co.Sigma)
    m0_vec = np.full(spec.d1, float(m0)) if np.ndim(m0) == 0 else np.asarray(m0, dtype=float)
    g0 = np.atleast_2d(np.asarray(gamma0, dtype=float)) * np.eye(spec.d1) \
        if np.ndim(gamma0) == 0 else np.asarray(gamma0, dtype=float)

    dy = np.diff(y, axis=0)
    if spec.d1 == 1 and spec.d2 == 1:
        m, g = reference_filter_scalar(np.ascontiguousarray(dy[:, 0]), dt, co.a[0, 0],
                                       bb[0, 0], csc[0, 0], co.c[0, 0],
                                       sigma_inv[0, 0], m0_vec[0], g0[0, 0])
        if not np.all(np.isfinite(g)) or np.max(np.abs(np.diff(g))) > 1.0:
            raise NumericError("dense grid too coarse for the covariance update")
        if not np.all(np.isfinite(m)):
            raise NumericError("reference filter produced non-finite states")
        return m[:, None], g[:, None, None]

    m = np.empty((k + 1, spec.d1))
    gam = np.empty((k + 1, spec.d1, spec.d1))
    m[0] = m0_vec
    gam[0] = g0
    cur_m = m0_vec.copy()
    cur_g = g0.copy()
    gain_base = co.c.T @ sigma_inv
    for i in range(k):
        gain = cur_g @ gain_base
        cur_m = cur_m + (-co.a @ cur_m) * dt + gain @ (dy[i] - (co.c @ cur_m) * dt)
        new_g = riccati_rk4_step(cur_g, dt, co.a, bb, csc)
        if np.linalg.norm(new_g - cur_g) > 1.0:
            raise NumericError("dense grid too coarse for the covariance update")
        cur_g = new_g
        m[i + 1] = cur_m
        gam[i + 1] = cur_g
    if not np.all(np.isfinite(m)):
        raise NumericError("reference filter produced non-finite states")
    return m, gam
