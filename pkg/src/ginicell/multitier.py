"""Two-tier coverage: alpha-Ginibre tier 1 overlaid with Poisson tier 2.

Each tier runs full SDMA (antennas equal served users, so the serving
link is Exp(1) and an interferer of tier k has Gamma(psi_k, 1) channel
power).  A user attaches to the BS with the largest ``b_k p_k l_k(r)``
and the network is interference limited.

Coverage splits by serving tier.  Writing ``t`` for the normalised
squared distance of the serving BS,

* tier 1 serves (``t = pi lam1 r^2 / alpha``): tier-2 BSs must avoid the
  disk of radius ``R_12(r)`` and interfere from outside it, which gives
  the factor ``exp(-C_12(t) (1 + tau_12))`` next to the single-tier
  alpha-Ginibre integrand;
* tier 2 serves (``t = pi lam2 r^2``): the Poisson tier contributes
  ``exp(-t (1 + tau))`` and the Ginibre tier, kept outside ``R_21(r)``,
  contributes the product ``M_21``.  Its factors have the same form as
  the single-tier ``J_i`` with lower limit ``C_21(t)`` and effective
  threshold ``theta_2 b_2 / b_1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import numerics
from .analytic import SeriesTruncation, tau, thinned_factor_series
from .channel import FadingModel, TierConfig
from .numerics import QuadratureSpec
from .pointproc import GinibreModel, PoissonModel

__all__ = [
    "TwoTierScenario",
    "TwoTierCoverage",
    "assoc_radius_1to2",
    "assoc_radius_2to1",
    "tau_12",
    "cross_terms",
    "M_alpha_21",
    "coverage_two_tier",
    "association_probabilities",
]


@dataclass(frozen=True)
class TwoTierScenario:
    """Tier 1 on an alpha-Ginibre process, tier 2 on a Poisson process, thresholds per tier.

    The simulator accepts any antenna count; the analytic functions call
    :meth:`check_full_sdma` first.
    """

    tier1: TierConfig
    tier2: TierConfig
    theta1: float
    theta2: float

    def __post_init__(self):
        if not isinstance(self.tier1.deployment, GinibreModel):
            raise TypeError("tier 1 must be deployed as a GinibreModel")
        if not isinstance(self.tier2.deployment, PoissonModel):
            raise TypeError("tier 2 must be deployed as a PoissonModel")
        if not (self.theta1 > 0 and self.theta2 > 0):
            raise ValueError("thresholds must be positive")

    @property
    def alpha(self) -> float:
        return self.tier1.deployment.alpha

    @property
    def lam1(self) -> float:
        return self.tier1.deployment.lam

    @property
    def lam2(self) -> float:
        return self.tier2.deployment.lam

    @property
    def beta1(self) -> float:
        return self.tier1.pathloss.beta

    @property
    def beta2(self) -> float:
        return self.tier2.pathloss.beta

    def check_full_sdma(self):
        """The analytic formula assumes antennas == served users in both tiers."""
        for k, tier in ((1, self.tier1), (2, self.tier2)):
            if tier.antennas != tier.served_users:
                raise ValueError(f"tier {k}: the two-tier formula needs antennas == served_users "
                                 "(other settings are supported by the simulator only)")

    def bp_ratio_21(self) -> float:
        """``b2 p2 / (b1 p1)``, built from the bias and power ratios separately."""
        return (self.tier2.bias / self.tier1.bias) * (self.tier2.power / self.tier1.power)

    def bp_ratio_12(self) -> float:
        return (self.tier1.bias / self.tier2.bias) * (self.tier1.power / self.tier2.power)


class TwoTierCoverage(NamedTuple):
    """Total coverage and its split by serving tier."""

    total: float
    tier1_part: float
    tier2_part: float


def assoc_radius_1to2(scn: TwoTierScenario, r):
    """Tier-2 exclusion radius when a tier-1 BS at distance ``r`` serves."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("distance must be positive")
    out = scn.bp_ratio_21() ** (1.0 / (2.0 * scn.beta2)) * r ** (scn.beta1 / scn.beta2)
    return float(out) if out.ndim == 0 else out


def assoc_radius_2to1(scn: TwoTierScenario, r):
    """Tier-1 exclusion radius when a tier-2 BS at distance ``r`` serves."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("distance must be positive")
    out = scn.bp_ratio_12() ** (1.0 / (2.0 * scn.beta1)) * r ** (scn.beta2 / scn.beta1)
    return float(out) if out.ndim == 0 else out


def _tau_scaled(theta, beta, shape, kappa, spec=None):
    # (theta^(1/beta)/beta) int_{1/theta}^inf [1 - (u/(u+kappa))^shape] u^(1/beta-1) du
    spec = spec or QuadratureSpec(relative_tolerance=1e-13, absolute_tolerance=1e-15,
                                  max_subdivisions=2000)
    lower = 1.0 / theta

    def integrand(u):
        return -np.expm1(-shape * np.log1p(kappa / u)) * u ** (-1.0 + 1.0 / beta)

    val = numerics.integrate_semi_infinite(integrand, lower, spec, scale=lower,
                                           algebraic_decay=2.0 - 1.0 / beta)
    return theta ** (1.0 / beta) / beta * val


def tau_12(scn: TwoTierScenario, theta: float, beta: float) -> float:
    """Tier-2 interference integral seen by a tier-1 user, with kernel ``(u/(u + b1/b2))^psi2``."""
    if not theta > 0 or not beta > 1:
        raise ValueError("need theta > 0 and beta > 1")
    return _tau_scaled(float(theta), float(beta), scn.tier2.served_users,
                       scn.tier1.bias / scn.tier2.bias)


def cross_terms(scn: TwoTierScenario, t: float):
    """``(C_12(t), C_21(t))``: the other tier's exclusion disk in its own normalised units."""
    if not t > 0:
        raise ValueError("t must be positive")
    alpha, lam1, lam2 = scn.alpha, scn.lam1, scn.lam2
    b1, b2 = scn.beta1, scn.beta2
    c12 = (math.pi * lam2 * scn.bp_ratio_21() ** (1.0 / b2)
           * (alpha * t / (math.pi * lam1)) ** (b1 / b2))
    c21 = (math.pi * lam1 / alpha * scn.bp_ratio_12() ** (1.0 / b1)
           * (t / (math.pi * lam2)) ** (b2 / b1))
    return c12, c21


def M_alpha_21(scn: TwoTierScenario, t: float, theta: float,
               trunc: Optional[SeriesTruncation] = None) -> float:
    """Ginibre-tier void-and-interference product seen by a tier-2 user at normalised distance ``t``."""
    return math.exp(_log_m21(scn, t, theta, trunc))


def _log_m21(scn, t, theta, trunc):
    scn.check_full_sdma()
    _, c21 = cross_terms(scn, t)
    theta_eff = theta * (scn.tier2.bias / scn.tier1.bias)
    return thinned_factor_series(scn.alpha, c21, theta_eff, scn.beta1,
                                 scn.tier1.served_users, trunc).log_m


def _tau_or_zero(theta, beta, shape):
    return tau(theta, beta, FadingModel.erlang(shape)) if theta > 0 else 0.0


def _tier1_part(scn, theta, trunc, spec):
    alpha = scn.alpha
    psi1 = scn.tier1.served_users
    rate12 = 1.0 + (tau_12(scn, theta, scn.beta2) if theta > 0 else 0.0)

    def integrand(ts):
        out = np.empty(len(ts))
        for k, t in enumerate(ts):
            t = float(t)
            c12, _ = cross_terms(scn, t)
            val = thinned_factor_series(alpha, t, theta, scn.beta1, psi1, trunc, with_s=True)
            out[k] = alpha * math.exp(val.log_m + val.log_s_scaled - c12 * rate12)
        return out

    decay = alpha * (1.0 + _tau_or_zero(theta, scn.beta1, psi1))
    cutoff = (alpha + math.log(alpha / (decay * spec.absolute_tolerance))) / decay
    return numerics.integrate_semi_infinite(integrand, 0.0, spec, cutoff=cutoff)


def _tier2_part(scn, theta, trunc, spec):
    rate2 = 1.0 + _tau_or_zero(theta, scn.beta2, scn.tier2.served_users)

    def integrand(ts):
        out = np.empty(len(ts))
        for k, t in enumerate(ts):
            t = float(t)
            out[k] = math.exp(_log_m21(scn, t, theta, trunc) - t * rate2)
        return out

    # M_21 <= 1
    cutoff = math.log(1.0 / (rate2 * spec.absolute_tolerance)) / rate2
    return numerics.integrate_semi_infinite(integrand, 0.0, spec, cutoff=cutoff)


def _parts(scn, theta1, theta2, trunc, spec):
    scn.check_full_sdma()
    trunc = trunc or SeriesTruncation()
    spec = spec or QuadratureSpec()
    parts = []
    for label, fn, theta in (("tier-1", _tier1_part, theta1), ("tier-2", _tier2_part, theta2)):
        try:
            parts.append(min(1.0, max(0.0, fn(scn, theta, trunc, spec))))
        except numerics.QuadratureError as exc:
            raise numerics.QuadratureError(f"{label} part did not converge", exc.estimate,
                                           exc.error_bound) from exc
    return TwoTierCoverage(parts[0] + parts[1], parts[0], parts[1])


def coverage_two_tier(scn: TwoTierScenario, trunc: Optional[SeriesTruncation] = None,
                      spec: Optional[QuadratureSpec] = None) -> TwoTierCoverage:
    """Coverage of the typical user, split into the tier-1 and tier-2 served parts."""
    return _parts(scn, scn.theta1, scn.theta2, trunc, spec)


def association_probabilities(scn: TwoTierScenario, trunc: Optional[SeriesTruncation] = None,
                              spec: Optional[QuadratureSpec] = None) -> TwoTierCoverage:
    """Probabilities that each tier serves the typical user (the parts at zero thresholds)."""
    return _parts(scn, 0.0, 0.0, trunc, spec)
