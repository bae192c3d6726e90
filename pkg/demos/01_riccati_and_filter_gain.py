"""Stationary filter covariance and gain for the canonical scalar model.

The latent state mean-reverts at rate a = 1.5 with noise b = 0.3 and is
observed through unit drift loading under noise sigma = 0.02.  The script
solves the stationary Riccati equation, checks it against the scalar closed
form, and shows the exponential convergence of the Riccati ODE from gamma = 0.
"""
import numpy as np

import hidden_ou as ho

spec = ho.scalar_family()
theta = ho.ThetaPoint(theta1=[0.02], theta2=[1.5, 0.3])

sol = ho.solve_are(spec, theta)
print("gamma+ =", sol.gamma_plus[0, 0])
print("gamma- =", sol.gamma_minus[0, 0])
print("alpha  =", sol.alpha[0, 0])
print("spectral gap of the 2x2 block matrix:", sol.min_spectral_gap)

a, b, sigma = 1.5, 0.3, 0.02
closed = sigma**2 * a * (np.sqrt(1 + b**2 / (sigma**2 * a**2)) - 1)
print("closed form gamma+ =", closed, " (difference:", sol.gamma_plus[0, 0] - closed, ")")

ctrl = ho.check_controllability(spec, theta)
print("controllability rank:", ctrl.rank, "of", ctrl.d1, "-> full rank:", ctrl.full_rank)

# transient: the time-varying covariance reaches gamma+ at rate 2*alpha
times, gammas = ho.integrate_riccati_ode(spec, theta, np.zeros((1, 1)), t_final=0.5)
dev = np.abs(gammas[:, 0, 0] - sol.gamma_plus[0, 0])
mask = (times >= 0.1) & (times <= 0.5)
slope = np.polyfit(times[mask], np.log(dev[mask]), 1)[0]
print(f"fitted log-deviation slope {slope:.2f} vs -2*alpha = {-2 * sol.alpha[0, 0]:.2f}")
