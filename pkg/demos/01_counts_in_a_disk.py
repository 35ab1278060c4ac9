"""
Counting base stations in a disk
================================

The alpha-Ginibre process places fewer points in a disk than a Poisson
process of the same density would, in the variance sense. The count in
D_r is a sum of independent Bernoulli variables whose success
probabilities are the kernel eigenvalues, so both moments are exact.
"""

import math

import numpy as np

from ginicell import pointproc as pp

lam = 1.0 / math.pi
r = 2.0

# exact moments: the mean is lam*pi*r^2 for every alpha
print(f"{'alpha':>6} {'mean':>8} {'variance':>9} {'var/mean':>9}")
for alpha in (0.05, 0.25, 0.5, 1.0):
    st = pp.disk_count_statistics(pp.GinibreModel(alpha, lam), r)
    print(f"{alpha:6.2f} {st.mean:8.4f} {st.variance:9.4f} {st.variance / st.mean:9.4f}")

# the sampler agrees
model = pp.GinibreModel(0.5, lam)
counts = pp.sample_disk_counts(model, r, 50_000, seed=1)
print("\nsampled alpha=0.5:", f"mean {counts.mean():.4f}, variance {counts.var():.4f}")

# seen from a BS (reduced Palm), the neighbourhood is emptier
print("Palm mean count:", f"{pp.palm_disk_mean(model, r):.4f}",
      f"vs stationary {lam * math.pi * r * r:.4f}")

# one configuration, with approximate (uniform) angles for a picture
config = pp.sample_radial(model, pp.default_max_points(model, r), seed=3)
pts = pp.attach_uniform_angles(config, seed=4)
pts = pts[np.abs(pts) <= r]
print(f"\n{pts.size} points inside radius {r}:")
print(np.round(pts, 3))
