"""Parametric state-space model: a hidden Ornstein-Uhlenbeck process driving an
observed diffusion.

The model is

    dX_t = -a(theta2) X_t dt + b(theta2) dW^1_t      (latent, d1-dimensional)
    dY_t =  c(theta2) X_t dt + sigma(theta1) dW^2_t  (observed, d2-dimensional)

with independent Wiener processes W^1, W^2.  ``ModelSpec`` bundles the four
coefficient maps with closed parameter boxes for theta1 and theta2.  The maps
must keep a(theta2) stable (eigenvalues with positive real part) and
b b', Sigma = sigma sigma' positive definite over the boxes; ``check_stability_region``
verifies this numerically on sampled box points.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigurationError, DomainError

Array = np.ndarray
CoeffMap = Callable[[Array], Array]

FD_STEP_ORDER1 = 1e-6
FD_STEP_ORDER2 = 1e-4


def _as_vector(x, name: str) -> Array:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ConfigurationError(f"{name} must be a vector, got shape {v.shape}")
    return v


def _as_box(box, name: str) -> Array:
    b = np.asarray(box, dtype=float).reshape(-1, 2)
    if np.any(b[:, 0] > b[:, 1]):
        raise ConfigurationError(f"{name} has an interval with lower bound above upper bound")
    return b


@dataclass(frozen=True)
class ThetaPoint:
    """A parameter point (theta1, theta2), stored as 1-D float arrays."""

    theta1: Array
    theta2: Array

    def __post_init__(self):
        object.__setattr__(self, "theta1", _as_vector(self.theta1, "theta1"))
        object.__setattr__(self, "theta2", _as_vector(self.theta2, "theta2"))


@dataclass(frozen=True)
class SamplingScheme:
    """Equidistant observation grid: n increments of size h, horizon t_n = n*h."""

    n: int
    h: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigurationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        # Step sizes above 1 are outside the sampling regime the estimators assume.
        if not (0.0 < self.h <= 1.0):
            raise ConfigurationError(f"h must satisfy 0 < h <= 1, got {self.h!r}")

    @property
    def t_n(self) -> float:
        return self.n * self.h

    def times(self) -> Array:
        return np.arange(self.n + 1) * self.h


@dataclass(frozen=True)
class Coefficients:
    """Coefficient matrices at a fixed parameter point. Sigma = sigma sigma'."""

    a: Array
    b: Array
    c: Array
    sigma: Array
    Sigma: Array


@dataclass(frozen=True)
class ModelSpec:
    """Dimensions, coefficient maps, and parameter boxes of the state-space model.

    Coefficient maps take the corresponding 1-D theta array and return a dense
    matrix: a, b are d1 x d1, c is d2 x d1, sigma is d2 x d2.  The maps must be
    evaluable on the closed boxes (and slightly beyond, for finite differences).

    ``analytic_derivatives`` optionally registers first derivatives, keyed by
    "a", "b", "c", "sigma"; each callable returns the (m, rows, cols) tensor of
    partials and takes precedence over finite differences.

    Instances are immutable and safe to share across worker processes.
    """

    d1: int
    d2: int
    m1: int
    m2: int
    coeff_a: CoeffMap
    coeff_b: CoeffMap
    coeff_c: CoeffMap
    coeff_sigma: CoeffMap
    theta1_box: Array
    theta2_box: Array
    sigma_is_diagonal: bool = False
    theta1_names: tuple[str, ...] | None = None
    theta2_names: tuple[str, ...] | None = None
    analytic_derivatives: Mapping[str, Callable[[Array], Array]] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("d1", "d2", "m1", "m2"):
            v = getattr(self, name)
            if int(v) != v or v < 0 or (name in ("d1", "d2") and v < 1):
                raise ConfigurationError(f"{name} must be a valid dimension, got {v!r}")
            object.__setattr__(self, name, int(v))
        object.__setattr__(self, "theta1_box", _as_box(self.theta1_box, "theta1_box"))
        object.__setattr__(self, "theta2_box", _as_box(self.theta2_box, "theta2_box"))
        if self.theta1_box.shape[0] != self.m1:
            raise ConfigurationError("theta1_box must have one interval per theta1 coordinate")
        if self.theta2_box.shape[0] != self.m2:
            raise ConfigurationError("theta2_box must have one interval per theta2 coordinate")
        for names, m, label in ((self.theta1_names, self.m1, "theta1_names"),
                                (self.theta2_names, self.m2, "theta2_names")):
            if names is not None and len(names) != m:
                raise ConfigurationError(f"{label} must have length {m}")

    def param_names(self) -> tuple[str, ...]:
        n1 = self.theta1_names or tuple(f"theta1_{i + 1}" for i in range(self.m1))
        n2 = self.theta2_names or tuple(f"theta2_{i + 1}" for i in range(self.m2))
        return tuple(n1) + tuple(n2)

    def contains(self, theta: ThetaPoint, atol: float = 0.0) -> bool:
        ok1 = np.all(theta.theta1 >= self.theta1_box[:, 0] - atol) and np.all(
            theta.theta1 <= self.theta1_box[:, 1] + atol)
        ok2 = np.all(theta.theta2 >= self.theta2_box[:, 0] - atol) and np.all(
            theta.theta2 <= self.theta2_box[:, 1] + atol)
        return bool(ok1 and ok2)

    def clip(self, theta: ThetaPoint) -> ThetaPoint:
        """Project a point onto the closed boxes (boundary iterates are legal)."""
        t1 = np.clip(theta.theta1, self.theta1_box[:, 0], self.theta1_box[:, 1])
        t2 = np.clip(theta.theta2, self.theta2_box[:, 0], self.theta2_box[:, 1])
        return ThetaPoint(t1, t2)


def _check_shape(m: Array, shape: tuple[int, int], what: str) -> Array:
    m = np.asarray(m, dtype=float)
    if m.shape != shape:
        raise ConfigurationError(f"{what} returned shape {m.shape}, expected {shape}")
    return m


def eval_coeffs(spec: ModelSpec, theta: ThetaPoint) -> Coefficients:
    """Evaluate (a, b, c, sigma) at theta and form Sigma = sigma sigma'."""
    a = _check_shape(spec.coeff_a(theta.theta2), (spec.d1, spec.d1), "coeff_a")
    b = _check_shape(spec.coeff_b(theta.theta2), (spec.d1, spec.d1), "coeff_b")
    c = _check_shape(spec.coeff_c(theta.theta2), (spec.d2, spec.d1), "coeff_c")
    sigma = _check_shape(spec.coeff_sigma(theta.theta1), (spec.d2, spec.d2), "coeff_sigma")
    return Coefficients(a=a, b=b, c=c, sigma=sigma, Sigma=sigma @ sigma.T)


@dataclass(frozen=True)
class CoeffDerivatives:
    """First (order=1) or second (order=2) parameter derivatives of the maps.

    Order 1 shapes: da/db (m2, d1, d1), dc (m2, d2, d1), dsigma/dSigma (m1, d2, d2).
    Order 2 prepends a second parameter axis; tensors are symmetric in the two
    parameter indices.
    """

    order: int
    da: Array
    db: Array
    dc: Array
    dsigma: Array
    dSigma: Array


def _require_interior(theta: Array, box: Array, step: Array, what: str) -> None:
    lo, hi = box[:, 0], box[:, 1]
    if np.any(theta - step < lo) or np.any(theta + step > hi):
        raise DomainError(
            f"{what} is within one finite-difference step of its box boundary; "
            "move the point inside or register analytic derivatives")


def _fd1(f: CoeffMap, theta: Array, steps: Array) -> Array:
    out = []
    for i, eps in enumerate(steps):
        e = np.zeros_like(theta)
        e[i] = eps
        out.append((np.asarray(f(theta + e), float) - np.asarray(f(theta - e), float)) / (2 * eps))
    base = np.asarray(f(theta), float)
    if not out:
        return np.zeros((0,) + base.shape)
    return np.stack(out)


def _fd2(f: CoeffMap, theta: Array, steps: Array) -> Array:
    base = np.asarray(f(theta), float)
    m = len(theta)
    out = np.zeros((m, m) + base.shape)
    for i in range(m):
        ei = np.zeros_like(theta)
        ei[i] = steps[i]
        out[i, i] = (np.asarray(f(theta + ei), float) - 2 * base
                     + np.asarray(f(theta - ei), float)) / steps[i] ** 2
        for j in range(i + 1, m):
            ej = np.zeros_like(theta)
            ej[j] = steps[j]
            mixed = (np.asarray(f(theta + ei + ej), float) - np.asarray(f(theta + ei - ej), float)
                     - np.asarray(f(theta - ei + ej), float)
                     + np.asarray(f(theta - ei - ej), float)) / (4 * steps[i] * steps[j])
            out[i, j] = mixed
            out[j, i] = mixed
    return out


def coeff_derivatives(spec: ModelSpec, theta: ThetaPoint, order: int = 1) -> CoeffDerivatives:
    """Differentiate the coefficient maps at theta.

    Central differences with step eps*max(1, |theta_i|) (eps = 1e-6 for order 1,
    1e-4 for order 2); registered analytic first derivatives take precedence.
    The point must be interior to the boxes by at least the step.
    """
    if order not in (1, 2):
        raise ConfigurationError(f"order must be 1 or 2, got {order!r}")
    eps = FD_STEP_ORDER1 if order == 1 else FD_STEP_ORDER2
    s1 = eps * np.maximum(1.0, np.abs(theta.theta1))
    s2 = eps * np.maximum(1.0, np.abs(theta.theta2))
    _require_interior(theta.theta1, spec.theta1_box, s1, "theta1")
    _require_interior(theta.theta2, spec.theta2_box, s2, "theta2")

    fd = _fd1 if order == 1 else _fd2
    reg = spec.analytic_derivatives if order == 1 else {}

    da = np.asarray(reg["a"](theta.theta2), float) if "a" in reg else fd(spec.coeff_a, theta.theta2, s2)
    db = np.asarray(reg["b"](theta.theta2), float) if "b" in reg else fd(spec.coeff_b, theta.theta2, s2)
    dc = np.asarray(reg["c"](theta.theta2), float) if "c" in reg else fd(spec.coeff_c, theta.theta2, s2)
    dsig = (np.asarray(reg["sigma"](theta.theta1), float) if "sigma" in reg
            else fd(spec.coeff_sigma, theta.theta1, s1))

    sigma = np.asarray(spec.coeff_sigma(theta.theta1), float)
    if order == 1:
        first = dsig @ sigma.T
        dSigma = first + first.transpose(0, 2, 1)
    else:
        d1sig = _fd1(spec.coeff_sigma, theta.theta1,
                     FD_STEP_ORDER1 * np.maximum(1.0, np.abs(theta.theta1)))
        first = dsig @ sigma.T
        cross = np.einsum("iab,jcb->ijac", d1sig, d1sig)
        dSigma = first + first.transpose(0, 1, 3, 2) + cross + cross.transpose(0, 1, 3, 2)
    return CoeffDerivatives(order=order, da=da, db=db, dc=dc, dsigma=dsig, dSigma=dSigma)


@dataclass(frozen=True)
class StabilityReport:
    """Minimum eigenvalue statistics of a, bb', Sigma over sampled box points."""

    min_real_eig_a: float
    min_eig_bb: float
    min_eig_Sigma: float
    samples: int

    @property
    def ok(self) -> bool:
        return self.min_real_eig_a > 0 and self.min_eig_bb > 0 and self.min_eig_Sigma > 0


def check_stability_region(spec: ModelSpec, samples: int = 1000, seed: int = 0) -> StabilityReport:
    """Sample the boxes and report the worst-case stability/definiteness margins."""
    rng = np.random.default_rng(seed)
    lo1, hi1 = spec.theta1_box[:, 0], spec.theta1_box[:, 1]
    lo2, hi2 = spec.theta2_box[:, 0], spec.theta2_box[:, 1]
    min_a = np.inf
    min_bb = np.inf
    min_S = np.inf
    for _ in range(samples):
        t1 = lo1 + (hi1 - lo1) * rng.random(spec.m1)
        t2 = lo2 + (hi2 - lo2) * rng.random(spec.m2)
        co = eval_coeffs(spec, ThetaPoint(t1, t2))
        min_a = min(min_a, float(np.min(np.linalg.eigvals(co.a).real)))
        min_bb = min(min_bb, float(np.min(np.linalg.eigvalsh(co.b @ co.b.T))))
        min_S = min(min_S, float(np.min(np.linalg.eigvalsh(co.Sigma))))
    return StabilityReport(min_real_eig_a=min_a, min_eig_bb=min_bb, min_eig_Sigma=min_S,
                           samples=samples)


# ---------------------------------------------------------------------------
# Built-in coefficient families.  All map functions are module-level so that
# specs remain picklable for multiprocessing.

def _scalar_a(theta2):
    return np.array([[theta2[0]]])


def _scalar_b(theta2):
    return np.array([[theta2[1]]])


def _scalar_sigma(theta1):
    return np.array([[theta1[0]]])


def _const_map(value, _theta):
    return value


def _scalar_da(_theta2):
    return np.array([[[1.0]], [[0.0]]])


def _scalar_db(_theta2):
    return np.array([[[0.0]], [[1.0]]])


def _zero_tensor(shape, _theta):
    return np.zeros(shape)


def _scalar_dsigma(_theta1):
    return np.array([[[1.0]]])


def scalar_family(theta1_box=((0.005, 0.1),),
                  theta2_box=((0.1, 5.0), (0.02, 1.0)),
                  c: float = 1.0) -> ModelSpec:
    """One-dimensional family a = theta2[0], b = theta2[1], sigma = theta1[0], c fixed.

    This is the canonical simulation-study model; closed forms exist for the
    stationary filter gain and both information matrices.
    """
    c_mat = np.array([[float(c)]])
    return ModelSpec(
        d1=1, d2=1, m1=1, m2=2,
        coeff_a=_scalar_a, coeff_b=_scalar_b,
        coeff_c=partial(_const_map, c_mat), coeff_sigma=_scalar_sigma,
        theta1_box=theta1_box, theta2_box=theta2_box,
        sigma_is_diagonal=True,
        theta1_names=("sigma",), theta2_names=("a", "b"),
        analytic_derivatives={
            "a": _scalar_da, "b": _scalar_db,
            "c": partial(_zero_tensor, (2, 1, 1)), "sigma": _scalar_dsigma,
        },
    )


def _diag_a(d, theta2):
    return np.diag(theta2[:d])


def _diag_b(d, theta2):
    return np.diag(theta2[d:])


def _diag_sigma(theta1):
    return np.diag(theta1)


def _diag_da(d, _theta2):
    out = np.zeros((2 * d, d, d))
    for i in range(d):
        out[i, i, i] = 1.0
    return out


def _diag_db(d, _theta2):
    out = np.zeros((2 * d, d, d))
    for i in range(d):
        out[d + i, i, i] = 1.0
    return out


def _diag_dsigma(d, _theta1):
    out = np.zeros((d, d, d))
    for i in range(d):
        out[i, i, i] = 1.0
    return out


def diagonal_family(d: int = 2,
                    theta1_box=None,
                    theta2_box=None) -> ModelSpec:
    """Decoupled d-dimensional family: a, b, sigma diagonal in theta, c = I."""
    if theta1_box is None:
        theta1_box = [(0.005, 2.0)] * d
    if theta2_box is None:
        theta2_box = [(0.1, 5.0)] * d + [(0.02, 2.0)] * d
    names_a = tuple(f"a{i + 1}" for i in range(d))
    names_b = tuple(f"b{i + 1}" for i in range(d))
    return ModelSpec(
        d1=d, d2=d, m1=d, m2=2 * d,
        coeff_a=partial(_diag_a, d), coeff_b=partial(_diag_b, d),
        coeff_c=partial(_const_map, np.eye(d)), coeff_sigma=_diag_sigma,
        theta1_box=theta1_box, theta2_box=theta2_box,
        sigma_is_diagonal=True,
        theta1_names=tuple(f"sigma{i + 1}" for i in range(d)),
        theta2_names=names_a + names_b,
        analytic_derivatives={
            "a": partial(_diag_da, d), "b": partial(_diag_db, d),
            "c": partial(_zero_tensor, (2 * d, d, d)), "sigma": partial(_diag_dsigma, d),
        },
    )


FAMILIES: dict[str, Callable[..., ModelSpec]] = {
    "scalar": scalar_family,
    "diagonal": diagonal_family,
}


def theta_grid(box: Array, points_per_axis: int = 3, fracs=None) -> list[Array]:
    """Interior grid over a box, used for multistart and diagnostics scans."""
    if fracs is None:
        fracs = np.linspace(0.25, 0.75, points_per_axis)
    axes = [box[i, 0] + (box[i, 1] - box[i, 0]) * np.asarray(fracs) for i in range(box.shape[0])]
    return [np.array(p) for p in itertools.product(*axes)]
