"""
Coverage probability as repulsion grows
=======================================

Single-tier downlink, Rayleigh fading, path loss r^(-4), no noise.
Coverage does not depend on the density in this setting, and it grows
with alpha: repulsive deployments keep interferers further from the
serving BS. alpha -> 0 recovers the Poisson value 1/(1 + tau).
"""

import math

import numpy as np

from ginicell import analytic as an
from ginicell.pointproc import GinibreModel, PoissonModel

lam = 1.0 / math.pi
theta_db = np.arange(-10, 21, 5)
thetas = 10.0 ** (theta_db / 10.0)

curves = {"ppp": an.coverage_curve(an.SingleTierScenario(PoissonModel(lam)), thetas)}
for alpha in (0.25, 0.5, 0.75, 1.0):
    curves[f"a={alpha}"] = an.coverage_curve(an.SingleTierScenario(GinibreModel(alpha, lam)), thetas)

print("theta_db " + " ".join(f"{k:>8}" for k in curves))
for i, x in enumerate(theta_db):
    print(f"{x:8.0f} " + " ".join(f"{c[i]:8.4f}" for c in curves.values()))

# noise lowers coverage; w_o is given relative to the transmit power
print("\nnoise at 0 dB, alpha = 1")
for w in (0.0, 0.1, 1.0):
    s = an.SingleTierScenario(GinibreModel(1.0, lam), power=1.0, noise=w)
    print(f"  w_o = {w:3.1f} p  ->  {an.coverage(s, 1.0):.4f}")
