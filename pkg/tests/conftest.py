"""Shared fixtures: the canonical scalar simulation-study model.

True parameters (a, b, sigma) = (1.5, 0.3, 0.02) with c = 1 give closed forms
    alpha  = sqrt(a^2 + b^2 c^2 / sigma^2)          = 15.074813431681335
    gamma+ = sigma^2 a (sqrt(1 + b^2c^2/(sigma^2 a^2)) - 1) / c^2
           = 0.005429925372672535
used as oracles throughout.
"""
import numpy as np
import pytest

import hidden_ou as ho

SIGMA_STAR = 0.02
A_STAR = 1.5
B_STAR = 0.3

ALPHA_STAR = np.sqrt(A_STAR**2 + B_STAR**2 / SIGMA_STAR**2)
GAMMA_PLUS_STAR = SIGMA_STAR**2 * A_STAR * (np.sqrt(1 + B_STAR**2 / (SIGMA_STAR**2 * A_STAR**2)) - 1)


@pytest.fixture(scope="session")
def spec():
    return ho.scalar_family()


@pytest.fixture(scope="session")
def theta_star():
    return ho.ThetaPoint([SIGMA_STAR], [A_STAR, B_STAR])


@pytest.fixture(scope="session")
def unit_spec():
    """Scalar family with boxes admitting a = b = sigma = 1."""
    return ho.scalar_family(theta1_box=((0.2, 2.0),), theta2_box=((0.2, 2.0), (0.0, 2.0)))


def make_path(y, h, theta=None):
    """Wrap explicit observations into an ObservationPath for objective tests."""
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    theta = theta or ho.ThetaPoint([SIGMA_STAR], [A_STAR, B_STAR])
    return ho.ObservationPath(scheme=ho.SamplingScheme(n=y.shape[0] - 1, h=h),
                              y=y, x_truth=None, seed=0, theta_true=theta)
