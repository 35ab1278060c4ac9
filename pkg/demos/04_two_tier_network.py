"""
A macro tier with small cells
=============================

Tier 1 is an alpha-Ginibre macro layer, tier 2 a Poisson layer of small
cells. Users attach by biased received power b*p*r^(-2 beta). Raising
the small-cell bias offloads users to tier 2; coverage is split by the
serving tier.
"""

import math

from ginicell import multitier as mt
from ginicell import simulate as sim
from ginicell.channel import PathLoss, TierConfig
from ginicell.pointproc import GinibreModel, PoissonModel

lam = 1.0 / math.pi


def scenario(bias2):
    macro = TierConfig(power=100.0, bias=1.0, antennas=4, served_users=4,
                       pathloss=PathLoss(2.0), deployment=GinibreModel(0.75, lam))
    small = TierConfig(power=1.0, bias=bias2, antennas=2, served_users=2,
                       pathloss=PathLoss(2.0), deployment=PoissonModel(2 * lam))
    return mt.TwoTierScenario(macro, small, theta1=1.0, theta2=1.0)


print(f"{'b2/b1':>6} {'assoc2':>7} {'total':>7} {'tier1':>7} {'tier2':>7}")
for bias2 in (1.0, 10.0, 100.0):
    scn = scenario(bias2)
    cov = mt.coverage_two_tier(scn)
    assoc = mt.association_probabilities(scn)
    print(f"{bias2:6.0f} {assoc.tier2_part:7.4f} {cov.total:7.4f} {cov.tier1_part:7.4f} {cov.tier2_part:7.4f}")

est = sim.estimate_coverage_two_tier(scenario(10.0), sim.McConfig(replications=30_000, master_seed=2))
print(f"\nsimulated at b2/b1 = 10: total {est.coverage:.4f} +- {est.half_width:.4f}, "
      f"parts {est.per_tier_coverage[0]:.4f} / {est.per_tier_coverage[1]:.4f}")
