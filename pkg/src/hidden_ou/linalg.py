"""Shared dense-matrix kernels: matrix exponential, noise-covariance integrals,
invariant-subspace extraction, and linear-recursion helpers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.signal import lfilter

from .errors import AssumptionError, NumericError

Array = np.ndarray


def symmetrize(m: Array) -> Array:
    return 0.5 * (m + m.T)


def expm(a: Array, t: float = 1.0) -> Array:
    """exp(A t) by scaling-and-squaring with a Pade core; exp(A*0) = I exactly."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)) or not np.isfinite(t):
        raise NumericError("expm requires finite entries")
    if t == 0.0:
        return np.eye(a.shape[0])
    return scipy.linalg.expm(a * t)


def gramian(a: Array, b: Array, h: float) -> Array:
    """Q(h) = int_0^h exp(As) BB' exp(A's) ds.

    Computed from one exponential of the block matrix [[-A, BB'], [0, A']],
    whose top-right block against exp(A'h) yields the integral exactly (to
    expm accuracy); no quadrature is involved.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if h < 0:
        raise NumericError(f"gramian requires h >= 0, got {h!r}")
    d = a.shape[0]
    if h == 0.0:
        return np.zeros((d, d))
    bb = b @ b.T
    blk = np.zeros((2 * d, 2 * d))
    blk[:d, :d] = -a
    blk[:d, d:] = bb
    blk[d:, d:] = a.T
    e = expm(blk, h)
    return symmetrize(e[d:, d:].T @ e[:d, d:])


@dataclass(frozen=True)
class SpectralSplit:
    """Real bases of the invariant subspaces for eigenvalues with positive and
    negative real part, plus the smallest |Re lambda| over the spectrum."""

    pos_basis: Array
    neg_basis: Array
    min_abs_real: float


def spectral_split(h_matrix: Array, tol: float | None = None) -> SpectralSplit:
    """Split R^(2d) into the stable/antistable invariant subspaces of H.

    Bases come from ordered real Schur decompositions (negative-real-part block
    leading), so complex-conjugate eigenpairs yield real basis vectors and
    multiple eigenvalues are handled robustly.  An eigenvalue within ``tol`` of
    the imaginary axis (default 1e-8 * ||H||_F) means the split is ill-defined
    and raises ``AssumptionError``.
    """
    h = np.asarray(h_matrix, dtype=float)
    if not np.all(np.isfinite(h)):
        raise NumericError("spectral_split requires finite entries")
    if tol is None:
        tol = 1e-8 * np.linalg.norm(h)
    eigvals = np.linalg.eigvals(h)
    min_abs_real = float(np.min(np.abs(eigvals.real)))
    if min_abs_real <= tol:
        raise AssumptionError(
            "spectral gap assumption violated: an eigenvalue lies within "
            f"{tol:.3g} of the imaginary axis (min |Re lambda| = {min_abs_real:.3g})")
    _, z_neg, k_neg = scipy.linalg.schur(h, output="real", sort="lhp")
    _, z_pos, k_pos = scipy.linalg.schur(h, output="real", sort="rhp")
    if k_neg + k_pos != h.shape[0]:
        raise AssumptionError("spectral split does not cover the full space")
    return SpectralSplit(pos_basis=z_pos[:, :k_pos], neg_basis=z_neg[:, :k_neg],
                         min_abs_real=min_abs_real)


def psd_sqrt_factor(q: Array, floor_rel: float = 1e-12) -> Array:
    """Factor L with LL' = Q for symmetric PSD Q, tolerant of rounding.

    Eigenvalues in [-floor_rel * ||Q||, 0) are clipped to zero; anything more
    negative raises ``NumericError``.
    """
    q = symmetrize(np.asarray(q, dtype=float))
    w, v = np.linalg.eigh(q)
    floor = -floor_rel * max(np.linalg.norm(q), 1e-300)
    if np.any(w < floor):
        raise NumericError(
            f"matrix is not positive semidefinite (min eigenvalue {w.min():.3g})")
    w = np.clip(w, 0.0, None)
    return v * np.sqrt(w)


def sqrtm_spd(m: Array) -> Array:
    """Unique symmetric PSD square root via eigendecomposition."""
    m = symmetrize(np.asarray(m, dtype=float))
    w, v = np.linalg.eigh(m)
    if np.any(w < -1e-12 * max(abs(w).max(), 1.0)):
        raise NumericError("sqrtm_spd requires a positive semidefinite matrix")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def stationary_cov(a: Array, bb: Array) -> Array:
    """Solve a V + V a' = bb' for the stationary covariance of the latent OU state."""
    return symmetrize(scipy.linalg.solve_continuous_lyapunov(np.asarray(a, float),
                                                             np.asarray(bb, float)))


_AR1_COND_LIMIT = 1e8


def ar1_path(f: Array, x0: Array, inputs: Array) -> Array:
    """Run x_{i+1} = F x_i + u_i for i = 0..n-1 and return the (n+1, d) path.

    Diagonalizable F is handled by eigendecomposition plus one scalar linear
    filter per eigencoordinate; a defective or ill-conditioned eigenbasis falls
    back to the explicit loop.  The branch depends only on F, so results are
    reproducible for fixed inputs.
    """
    f = np.asarray(f, dtype=float)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    u = np.asarray(inputs, dtype=float)
    n, d = u.shape
    lam, vec = np.linalg.eig(f)
    use_eig = np.linalg.cond(vec) < _AR1_COND_LIMIT
    if use_eig:
        x0t = np.linalg.solve(vec, x0.astype(complex))
        ut = np.linalg.solve(vec, u.T.astype(complex)).T
        xt = np.empty((n, d), dtype=complex)
        for k in range(d):
            xt[:, k] = lfilter([1.0 + 0j], [1.0 + 0j, -lam[k]], ut[:, k],
                               zi=[lam[k] * x0t[k]])[0]
        out = np.vstack([x0, (xt @ vec.T).real])
    else:
        out = np.empty((n + 1, d))
        out[0] = x0
        cur = x0
        for i in range(n):
            cur = f @ cur + u[i]
            out[i + 1] = cur
    return out
