import math

from ginicell.channel import PathLoss, TierConfig
from ginicell.multitier import TwoTierScenario
from ginicell.pointproc import GinibreModel, PoissonModel

LAM = 1.0 / math.pi


def two_tier(alpha=1.0, lam1=LAM, lam2=LAM, p1=1.0, p2=1.0, b1=1.0, b2=1.0, psi1=1, psi2=1,
             beta1=2.0, beta2=2.0, theta1=1.0, theta2=1.0, m1=None, m2=None):
    t1 = TierConfig(p1, b1, m1 or psi1, psi1, PathLoss(beta1), GinibreModel(alpha, lam1))
    t2 = TierConfig(p2, b2, m2 or psi2, psi2, PathLoss(beta2), PoissonModel(lam2))
    return TwoTierScenario(t1, t2, theta1, theta2)


ASYMMETRIC = dict(p1=100.0, p2=1.0, b1=1.0, b2=10.0, psi1=4, psi2=2)
