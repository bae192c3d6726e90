"""Stationary filter covariance: maximal/minimal solutions of the algebraic
Riccati equation, the closed-loop matrix alpha, and the Riccati ODE.

The equation solved is

    -a g - g a' - g (c' Sigma^-1 c) g + b b' = 0,

whose maximal solution gamma_plus is the steady-state covariance of the
conditional-mean filter.  gamma_plus is read off the invariant subspace of the
block matrix H = [[a', c'Sigma^-1 c], [b b', -a]] spanned by its
positive-real-part eigenvalues: stacking a basis as (X1; X2) gives
gamma_plus = X2 X1^-1.  The minimal solution gamma_minus comes from the
negative-real-part subspace the same way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (AssumptionError, DomainError, InstabilityError, NumericError,
                     SubspaceDegenerateError)
from .linalg import spectral_split, symmetrize
from .model import ModelSpec, ThetaPoint, eval_coeffs

Array = np.ndarray

BLOWUP_NORM = 1e6


@dataclass(frozen=True)
class RiccatiSolution:
    """Stationary solutions and closed-loop matrix for one parameter point.

    gamma_plus is symmetric positive definite and gamma_minus symmetric
    negative definite whenever the stability and controllability assumptions
    hold; alpha = a + gamma_plus c'Sigma^-1 c has eigenvalues with positive
    real part (the positive-real-part spectrum of the block matrix H).
    min_spectral_gap is the distance of the spectrum of H from the imaginary
    axis.
    """

    gamma_plus: Array
    gamma_minus: Array | None
    alpha: Array
    hamiltonian: Array
    min_spectral_gap: float


def build_hamiltonian(a: Array, bb: Array, csc: Array) -> Array:
    d = a.shape[0]
    h = np.zeros((2 * d, 2 * d))
    h[:d, :d] = a.T
    h[:d, d:] = csc
    h[d:, :d] = bb
    h[d:, d:] = -a
    return h


def are_residual(gamma: Array, a: Array, bb: Array, csc: Array) -> float:
    """Frobenius norm of -a g - g a' - g csc g + bb at g = gamma."""
    r = -a @ gamma - gamma @ a.T - gamma @ csc @ gamma + bb
    return float(np.linalg.norm(r))


def _csc_matrix(c: Array, Sigma: Array) -> Array:
    """c' Sigma^-1 c via a Cholesky solve."""
    try:
        cho = scipy.linalg.cho_factor(Sigma, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise DomainError("Sigma is not positive definite") from exc
    return symmetrize(c.T @ scipy.linalg.cho_solve(cho, c))


def _solve_from_basis(basis: Array, d1: int, which: str) -> Array:
    x1 = basis[:d1, :]
    x2 = basis[d1:, :]
    cond = np.linalg.cond(x1)
    if not np.isfinite(cond) or cond > 1e12:
        raise SubspaceDegenerateError(
            f"subspace degenerate: X1 for the {which} solution is singular "
            f"(condition number {cond:.3g})")
    return symmetrize(np.linalg.solve(x1.T, x2.T).T)


def solve_are(spec: ModelSpec, theta: ThetaPoint, *, tol: float | None = None,
              want_minus: bool = True, method: str = "auto") -> RiccatiSolution:
    """Solve the stationary Riccati equation at theta.

    ``method``: "auto" uses an exact scalar path for d1 = 1 (the block matrix
    has the simple spectrum +/- alpha there) and the ordered-Schur subspace
    construction otherwise; "schur" forces the general path.
    """
    co = eval_coeffs(spec, theta)
    bb = co.b @ co.b.T
    csc = _csc_matrix(co.c, co.Sigma)
    h = build_hamiltonian(co.a, bb, csc)
    if tol is None:
        tol = 1e-8 * np.linalg.norm(h)

    if method == "auto" and spec.d1 == 1:
        a = co.a[0, 0]
        bb_s = bb[0, 0]
        csc_s = csc[0, 0]
        alpha = math.sqrt(a * a + bb_s * csc_s)
        if alpha <= tol:
            raise AssumptionError(
                "spectral gap assumption violated: the closed-loop rate "
                f"{alpha:.3g} is within {tol:.3g} of zero")
        gamma_plus = np.array([[bb_s / (a + alpha)]])
        gamma_minus = None
        if want_minus:
            if csc_s == 0.0:
                raise SubspaceDegenerateError(
                    "subspace degenerate: the minimal solution does not exist for c = 0")
            gamma_minus = np.array([[-(a + alpha) / csc_s]])
        alpha_mat = np.array([[a]]) + gamma_plus * csc_s
        return RiccatiSolution(gamma_plus=gamma_plus, gamma_minus=gamma_minus,
                               alpha=alpha_mat, hamiltonian=h, min_spectral_gap=alpha)

    split = spectral_split(h, tol=tol)
    if split.pos_basis.shape[1] != spec.d1:
        raise AssumptionError(
            f"expected {spec.d1} eigenvalues in the right half-plane, "
            f"found {split.pos_basis.shape[1]}")
    gamma_plus = _solve_from_basis(split.pos_basis, spec.d1, "maximal")
    gamma_minus = _solve_from_basis(split.neg_basis, spec.d1, "minimal") if want_minus else None
    alpha = co.a + gamma_plus @ csc
    sol = RiccatiSolution(gamma_plus=gamma_plus, gamma_minus=gamma_minus, alpha=alpha,
                          hamiltonian=h, min_spectral_gap=split.min_abs_real)
    resid = are_residual(gamma_plus, co.a, bb, csc)
    if resid > 1e-9 * (1.0 + np.linalg.norm(bb)):
        raise NumericError(f"Riccati residual too large: {resid:.3g}")
    return sol


@dataclass(frozen=True)
class ControllabilityReport:
    """Numerical rank of [G, a'G, ..., a'^(d1) G] with G = c' Sigma c."""

    rank: int
    d1: int
    singular_values: Array

    @property
    def full_rank(self) -> bool:
        return self.rank == self.d1


def check_controllability(spec: ModelSpec, theta: ThetaPoint) -> ControllabilityReport:
    """Rank diagnostic for the pair (a', c'Sigma c); full row rank is required
    for the Riccati equation to have the maximal/minimal solution structure."""
    co = eval_coeffs(spec, theta)
    g = symmetrize(co.c.T @ co.Sigma @ co.c)
    blocks = [g]
    cur = g
    for _ in range(spec.d1):
        cur = co.a.T @ cur
        blocks.append(cur)
    m = np.hstack(blocks)
    sv = np.linalg.svd(m, compute_uv=False)
    rank = int(np.linalg.matrix_rank(m))
    return ControllabilityReport(rank=rank, d1=spec.d1, singular_values=sv)


def _riccati_rhs(g: Array, a: Array, bb: Array, csc: Array) -> Array:
    return -a @ g - g @ a.T - g @ csc @ g + bb


def riccati_rk4_step(g: Array, dt: float, a: Array, bb: Array, csc: Array) -> Array:
    """One classical Runge-Kutta step of the Riccati ODE, re-symmetrized."""
    k1 = _riccati_rhs(g, a, bb, csc)
    k2 = _riccati_rhs(g + 0.5 * dt * k1, a, bb, csc)
    k3 = _riccati_rhs(g + 0.5 * dt * k2, a, bb, csc)
    k4 = _riccati_rhs(g + dt * k3, a, bb, csc)
    return symmetrize(g + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))


def integrate_riccati_ode(spec: ModelSpec, theta: ThetaPoint, gamma0: Array,
                          t_final: float, dt: float | None = None) -> tuple[Array, Array]:
    """Integrate dg/dt = -a g - g a' - g c'Sigma^-1 c g + bb' from gamma0.

    Returns (times, gammas) with gammas[k] the symmetric iterate at times[k].
    The default step is 1e-2 / ||alpha||; trajectories exceeding norm 1e6 raise
    ``InstabilityError`` (bad gamma0 or step size).
    """
    co = eval_coeffs(spec, theta)
    bb = co.b @ co.b.T
    csc = _csc_matrix(co.c, co.Sigma)
    g = symmetrize(np.asarray(gamma0, dtype=float))
    if np.linalg.norm(g - g.T) > 1e-8 * (1 + np.linalg.norm(g)):
        raise NumericError("gamma0 must be symmetric")
    if np.min(np.linalg.eigvalsh(g)) < -1e-10 * (1 + np.linalg.norm(g)):
        raise NumericError("gamma0 must be positive semidefinite")
    if dt is None:
        sol = solve_are(spec, theta, want_minus=False)
        dt = 1e-2 / max(np.linalg.norm(sol.alpha), 1e-12)
    n_steps = max(1, int(math.ceil(t_final / dt)))
    dt = t_final / n_steps
    times = np.arange(n_steps + 1) * dt
    gammas = np.empty((n_steps + 1,) + g.shape)
    gammas[0] = g
    for k in range(n_steps):
        g = riccati_rk4_step(g, dt, co.a, bb, csc)
        if not np.all(np.isfinite(g)) or np.linalg.norm(g) > BLOWUP_NORM:
            raise InstabilityError(
                f"Riccati trajectory blew up at t = {times[k + 1]:.4g}; "
                "reduce dt or change gamma0")
        gammas[k + 1] = g
    return times, gammas
