"""Information matrices and the standard errors they imply.

For the canonical model at (a, b, sigma) = (1.5, 0.3, 0.02) with t_n = 100 the
stage-two standard errors are 0.2115 for a and 0.01324 for b; the stage-one
standard error at n = 1e6 is sigma/sqrt(2n) = 1.41421e-5.  The general-model
quadrature route and the scalar closed form agree to ~1e-7.
"""
import numpy as np

import hidden_ou as ho

spec = ho.scalar_family()
theta = ho.ThetaPoint(theta1=[0.02], theta2=[1.5, 0.3])
scheme = ho.SamplingScheme(n=1_000_000, h=1e-4)

info = ho.evaluate_info(spec, theta, scheme)
print("Gamma1 =", info.gamma1[0, 0], " (closed form 2/sigma^2 =", 2 / 0.02**2, ")")
print("se(sigma) at n = 1e6:", info.se1[0])
print("Gamma2 =\n", info.gamma2)
print("se(a), se(b) at t_n = 100:", info.se2)

quad = ho.gamma2_quadrature(spec, theta)
print("quadrature route max deviation:", np.max(np.abs(quad - info.gamma2)))

# positive definiteness requires the gradients of a and of the closed-loop
# rate alpha to span the parameter space; more than two dynamics parameters
# cannot be identified in the scalar model
print("Gamma2 positive definite:", info.pd_flag2)

# whitening: rate * Gamma^(1/2) (theta_hat - theta*) is standard normal
rng = np.random.default_rng(0)
draws = theta.theta2 + rng.multivariate_normal(
    np.zeros(2), np.linalg.inv(info.gamma2) / scheme.t_n, size=5000)
z = ho.standardized_errors(draws, theta.theta2, info.gamma2, np.sqrt(scheme.t_n))
print("standardized draws: mean", z.mean(axis=0), " cov\n", np.cov(z.T))
