"""Hot-loop kernels for the scalar (d1 = d2 = 1) model.

Numba compiles these when available; otherwise the pure-Python definitions run
as-is (same arithmetic, just slower).  Every kernel is deterministic for fixed
inputs, which the Monte Carlo harness relies on.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        def wrap(f):
            return f
        return wrap(args[0]) if args and callable(args[0]) else wrap

    HAS_NUMBA = False


@njit(cache=True)
def h2_objective_scalar(dy, decay, gain, c, sigma_inv, h, m0, burn_in):
    """Quadratic quasi-likelihood for the dynamics parameters, fused with the
    stationary-gain filter recursion m_i = decay * m_{i-1} + gain * dy_i."""
    m = m0
    acc = 0.0
    for i in range(dy.shape[0]):
        if i >= burn_in:
            cm = c * m
            acc += -h * sigma_inv * cm * cm + 2.0 * cm * sigma_inv * dy[i]
        m = decay * m + gain * dy[i]
    return 0.5 * acc


@njit(cache=True)
def filter_path_scalar(dy, decay, gain, m0):
    """Stationary-gain filter states m_0..m_n for scalar observations."""
    n = dy.shape[0]
    out = np.empty(n + 1)
    out[0] = m0
    m = m0
    for i in range(n):
        m = decay * m + gain * dy[i]
        out[i + 1] = m
    return out


@njit(cache=True)
def reference_filter_scalar(dy, dt, a, bb, csc, c, sigma_inv, m0, gamma0):
    """Euler scheme for the conditional mean coupled with RK4 for the
    conditional covariance, on a dense grid with increments dy of size dt.

    Returns (m, gamma) arrays of length n+1.
    """
    n = dy.shape[0]
    m_out = np.empty(n + 1)
    g_out = np.empty(n + 1)
    m = m0
    g = gamma0
    m_out[0] = m
    g_out[0] = g
    for i in range(n):
        gain = g * c * sigma_inv
        m = m + (-a * m) * dt + gain * (dy[i] - c * m * dt)
        k1 = -2.0 * a * g - g * g * csc + bb
        g2 = g + 0.5 * dt * k1
        k2 = -2.0 * a * g2 - g2 * g2 * csc + bb
        g3 = g + 0.5 * dt * k2
        k3 = -2.0 * a * g3 - g3 * g3 * csc + bb
        g4 = g + dt * k3
        k4 = -2.0 * a * g4 - g4 * g4 * csc + bb
        g = g + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        m_out[i + 1] = m
        g_out[i + 1] = g
    return m_out, g_out
