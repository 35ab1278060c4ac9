"""Single-tier downlink coverage for Poisson and alpha-Ginibre deployments.

Rayleigh fading on the serving link, i.i.d. Gamma(psi, 1) interferer
fading, path loss ``r**(-2*beta)`` and nearest-BS association.

The alpha-Ginibre formula contains an infinite product ``M`` and an
infinite series ``S`` over factors ``1 - alpha + alpha*J_i``.  They are
evaluated by :func:`thinned_factor_series`, which

* computes all ``J_i`` (and ``1 - J_i``) at once on a shared panel
  quadrature where the lower limit matters,
* uses the exact identity ``sum_i (1 - J_i) = c * (1 + tau)`` (the Poisson
  probabilities ``e^-u u^i / i!`` sum to one over ``i``) so that only the
  second-order remainder ``log(1 - x) + x`` has to be summed over the
  infinite tail, and
* sums that remainder with Wilson-Hilferty Gauss-Hermite expectations and
  an Euler-Maclaurin tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy import special

from . import numerics
from .channel import RAYLEIGH, FadingModel, PathLoss, laplace_interference_fading, one_minus_laplace
from .numerics import QuadratureSpec
from .pointproc import GinibreModel, PoissonModel

__all__ = [
    "SingleTierScenario",
    "SeriesTruncation",
    "TruncationError",
    "SeriesValue",
    "tau",
    "J_i",
    "M_alpha",
    "S_alpha",
    "thinned_factor_series",
    "coverage_ppp",
    "coverage_ginibre",
    "coverage",
    "coverage_curve",
]

_TAU_SPEC = QuadratureSpec(relative_tolerance=1e-13, absolute_tolerance=1e-15, max_subdivisions=2000)
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite_e.hermegauss(40)
_UNDERFLOW = 800.0


@dataclass(frozen=True)
class SingleTierScenario:
    """Deployment, power ``p``, noise ``w_o``, path loss and interferer fading."""

    deployment: Union[PoissonModel, GinibreModel]
    power: float = 1.0
    noise: float = 0.0
    pathloss: PathLoss = PathLoss(2.0)
    interferer_fading: FadingModel = RAYLEIGH

    def __post_init__(self):
        if not isinstance(self.deployment, (PoissonModel, GinibreModel)):
            raise TypeError("deployment must be a PoissonModel or GinibreModel")
        if not self.power > 0:
            raise ValueError("power must be positive")
        if not self.noise >= 0:
            raise ValueError("noise must be nonnegative")


@dataclass(frozen=True)
class SeriesTruncation:
    """Controls for the infinite product/series.

    ``factor_tolerance`` is the absolute accuracy asked of the tail
    remainder of ``log M`` and of the neglected Poisson mass in ``S``;
    ``max_terms`` caps how many factors are evaluated explicitly.
    """

    factor_tolerance: float = 1e-10
    max_terms: int = 20000

    def __post_init__(self):
        if not self.factor_tolerance > 0:
            raise ValueError("factor_tolerance must be positive")
        if int(self.max_terms) < 1:
            raise ValueError("max_terms must be >= 1")


class TruncationError(ArithmeticError):
    """The explicit part of a product/series would need more than ``max_terms`` factors."""

    def __init__(self, message, terms_needed):
        super().__init__(message)
        self.terms_needed = terms_needed


class SeriesValue(NamedTuple):
    """Result of :func:`thinned_factor_series` (all in log space)."""

    log_m: float
    log_s_scaled: float  # log(e^{-c} S); nan unless requested
    explicit_terms: int


def _check_theta_beta(theta, beta):
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta!r}")
    if not beta > 1:
        raise ValueError(f"beta must exceed 1, got {beta!r}")


@lru_cache(maxsize=4096)
def _tau_cached(theta: float, beta: float, shape: int) -> float:
    fading = FadingModel.erlang(shape)

    def integrand(u):
        return one_minus_laplace(fading, 1.0 / u) * u ** (-1.0 + 1.0 / beta)

    lower = 1.0 / theta
    # integrand ~ psi * u^(1/beta - 2) at infinity
    val = numerics.integrate_semi_infinite(integrand, lower, _TAU_SPEC, scale=lower,
                                           algebraic_decay=2.0 - 1.0 / beta)
    return theta ** (1.0 / beta) / beta * val


def tau(theta: float, beta: float, f: FadingModel = RAYLEIGH) -> float:
    """Interference integral ``(theta^(1/beta)/beta) * int_{1/theta}^inf (1 - L_G(1/u)) u^(1/beta - 1) du``."""
    _check_theta_beta(theta, beta)
    return _tau_cached(float(theta), float(beta), f.shape)


def J_i(i: int, t: float, theta: float, beta: float, f: FadingModel = RAYLEIGH,
        spec: Optional[QuadratureSpec] = None) -> float:
    """``(1/i!) int_t^inf e^-u u^i L_G(theta (t/u)^beta) du`` by direct quadrature.

    This is the scalar reference path; the series engine does not use it.
    """
    if int(i) != i or i < 0:
        raise ValueError("i must be a nonnegative integer")
    if not t > 0:
        raise ValueError("t must be positive")
    _check_theta_beta(theta, beta)
    i = int(i)
    spec = spec or QuadratureSpec(relative_tolerance=1e-12, absolute_tolerance=1e-300,
                                  max_subdivisions=2000)
    log_norm = special.gammaln(i + 1.0)

    def integrand(u):
        with np.errstate(divide="ignore"):
            log_pdf = i * np.log(u) - u - log_norm
        return np.exp(log_pdf) * laplace_interference_fading(f, theta * (t / u) ** beta)

    # the Gamma(i+1) density is negligible past its mode + 40 sd
    mode = float(i)
    sd = math.sqrt(i + 1.0)
    cutoff = max(mode, t) + 40.0 * sd + 50.0
    breaks = [mode + k * sd for k in (-6, -2, 0, 2, 6)]
    return numerics.integrate_semi_infinite(integrand, t, spec, cutoff=cutoff, breakpoints=breaks)


# -- vectorised factor series -------------------------------------------------

def _panel_nodes(lo: float, hi: float):
    """Gauss-Legendre nodes on panels sized to resolve Gamma(i+1) densities on [lo, hi]."""
    edges = [lo]
    u = lo
    while u < hi:
        # geometric near the origin, O(1) near lo, O(sqrt(u)) further out
        width = min(max(3.0, min(math.sqrt(u), (u - lo) / 6.0)), u / 3.0, hi - u)
        u = u + width
        edges.append(u)
    edges = np.asarray(edges)
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * _GL_NODES).ravel()
    weights = (half * _GL_WEIGHTS).ravel()
    return nodes, weights


def _wh_expectations(x: np.ndarray, c: float, theta_eff: float, beta: float, shape: int):
    """E[L(s)] and E[1 - L(s)], s = theta_eff (c/U)^beta, U ~ Gamma(x + 1), x >= 50."""
    n = np.asarray(x, dtype=float)[:, None] + 1.0
    m = 1.0 - 1.0 / (9.0 * n)
    sd = 1.0 / (3.0 * np.sqrt(n))
    base = m + _GH_NODES * sd
    u = n * base ** 3
    log_w = ((n - 1.0) * np.log(u) - u - special.gammaln(n)
             + np.log(3.0 * n * sd * base ** 2) + 0.5 * _GH_NODES ** 2)
    w = np.exp(log_w - log_w.max(axis=1, keepdims=True)) * _GH_WEIGHTS
    w /= w.sum(axis=1, keepdims=True)
    log1p_s = np.log1p(theta_eff * (c / u) ** beta)
    lap = np.exp(-shape * log1p_s)
    one_minus = -np.expm1(-shape * log1p_s)
    return np.sum(w * lap, axis=1), np.sum(w * one_minus, axis=1)


def _log_factor_remainder(alpha, j, d):
    """log(1 - alpha*d) + alpha*d, with the factor taken from J where J is small."""
    y = alpha * d
    use_j = j < 0.5
    with np.errstate(divide="ignore"):
        log_f = np.where(use_j, np.log((1.0 - alpha) + alpha * np.maximum(j, 1e-300)), np.log1p(-y))
    g = log_f + y
    small = (~use_j) & (y < 1e-4)
    if np.any(small):
        ys = y[small]
        g[small] = -ys * ys * (0.5 + ys * (1.0 / 3.0 + ys * 0.25))
    return g, log_f


def _tail_remainder(alpha, c, theta_eff, beta, shape, start, tol):
    """sum_{i >= start} [log(1 - alpha d_i) + alpha d_i] for start beyond the indicator region."""
    def g_of(x):
        j, d = _wh_expectations(np.atleast_1d(x), c, theta_eff, beta, shape)
        return _log_factor_remainder(alpha, j, d)[0]

    # explicit sum over [start, 2*start), Euler-Maclaurin beyond
    direct = np.arange(start, 2 * start, dtype=float)
    total = math.fsum(g_of(direct))
    a = 2.0 * start
    ga = g_of(np.array([a - 2.0, a - 1.0, a, a + 1.0, a + 2.0]))
    d1 = (ga[0] - 8.0 * ga[1] + 8.0 * ga[3] - ga[4]) / 12.0
    d3 = (-ga[0] + 2.0 * ga[1] - 2.0 * ga[3] + ga[4]) / 2.0

    def mapped(s):
        s = np.asarray(s, dtype=float)
        return g_of(a / s) * (a / (s * s))

    spec = QuadratureSpec(relative_tolerance=1e-10, absolute_tolerance=0.1 * tol, max_subdivisions=500)
    integral = numerics.integrate_interval(mapped, 0.0, 1.0, spec)
    return total + integral + 0.5 * ga[2] - d1 / 12.0 + d3 / 720.0


def thinned_factor_series(alpha: float, c: float, theta_eff: float, beta: float, shape: int,
                          trunc: Optional[SeriesTruncation] = None, *,
                          with_s: bool = False) -> SeriesValue:
    """Log of ``prod_{i>=0} [1 - alpha + alpha J_i]`` and optionally ``e^-c S``.

    Here ``J_i = int_c^inf e^-u u^i / i! L(theta_eff (c/u)^beta) du`` and
    ``L(s) = (1 + s)^-shape``.  With ``c = t`` and ``theta_eff = theta`` these
    are the single-tier ``M_alpha`` and ``S_alpha``; the cross-tier product of
    the two-tier model has the same form with a different ``c``.
    """
    trunc = trunc or SeriesTruncation()
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    if not c > 0:
        raise ValueError("lower limit c must be positive")
    if not theta_eff >= 0:
        raise ValueError("theta_eff must be nonnegative")
    # theta_eff = 0 leaves only the void-probability factors Q(i + 1, c)
    tau_val = _tau_cached(float(theta_eff), float(beta), shape) if theta_eff > 0 else 0.0
    excess = c * (1.0 + tau_val)
    if alpha * excess > _UNDERFLOW:
        # log(1 - alpha d) <= -alpha d gives M < e^-800, and M e^-c S is
        # bounded by e^alpha e^(-alpha c (1 + tau)); report both as zero
        return SeriesValue(log_m=-math.inf, log_s_scaled=0.0, explicit_terms=0)
    sqrt_c = math.sqrt(c)
    upper = int(math.ceil(c + 14.0 * sqrt_c + 50.0))
    # below i_lo, J_i <= Q(i+1, c) is negligible next to 1 - alpha
    i_lo = 0 if alpha == 1.0 else max(0, int(math.floor(c - 14.0 * sqrt_c - 50.0)))
    n_explicit = upper - i_lo + 1
    if n_explicit > trunc.max_terms:
        raise TruncationError(f"{n_explicit} explicit factors needed at c={c:.6g}, "
                              f"max_terms={trunc.max_terms}", n_explicit)

    idx = np.arange(i_lo, upper + 1, dtype=float)
    u_hi = upper + 14.0 * math.sqrt(upper) + 50.0
    nodes, weights = _panel_nodes(c, u_hi)
    log1p_s = np.log1p(theta_eff * (c / nodes) ** beta)
    wf = weights * np.exp(-shape * log1p_s)
    w1mf = weights * -np.expm1(-shape * log1p_s)
    log_pdf = idx[:, None] * np.log(nodes) - nodes - special.gammaln(idx + 1.0)[:, None]
    pdf = np.exp(log_pdf)
    j = pdf @ wf
    d = special.gammainc(idx + 1.0, c) + pdf @ w1mf
    g, log_f = _log_factor_remainder(alpha, j, d)

    log_m = -alpha * excess + math.fsum(g)
    if i_lo:
        log_m += i_lo * (math.log1p(-alpha) + alpha)
    log_m += _tail_remainder(alpha, c, theta_eff, beta, shape, upper + 1, trunc.factor_tolerance)

    log_s = math.nan
    if with_s:
        log_pois = idx * math.log(c) - c - special.gammaln(idx + 1.0)
        log_s = float(special.logsumexp(log_pois - log_f))
    return SeriesValue(log_m=float(log_m), log_s_scaled=log_s, explicit_terms=n_explicit)


def M_alpha(alpha: float, t: float, theta: float, beta: float, f: FadingModel = RAYLEIGH,
            trunc: Optional[SeriesTruncation] = None) -> float:
    """``prod_{i>=0} [1 - alpha + alpha J_i(t, theta, beta)]``."""
    _check_theta_beta(theta, beta)
    return math.exp(thinned_factor_series(alpha, t, theta, beta, f.shape, trunc).log_m)


def S_alpha(alpha: float, t: float, theta: float, beta: float, f: FadingModel = RAYLEIGH,
            trunc: Optional[SeriesTruncation] = None) -> float:
    """``sum_{i>=0} t^i/i! [1 - alpha + alpha J_i(t, theta, beta)]^-1``."""
    _check_theta_beta(theta, beta)
    val = thinned_factor_series(alpha, t, theta, beta, f.shape, trunc, with_s=True)
    exponent = t + val.log_s_scaled
    return math.exp(exponent) if exponent < 709.0 else math.inf


# -- coverage -----------------------------------------------------------------

def _outer_spec(spec: Optional[QuadratureSpec]) -> QuadratureSpec:
    return spec or QuadratureSpec(relative_tolerance=1e-9, absolute_tolerance=1e-12, max_subdivisions=400)


def coverage_ppp(s: SingleTierScenario, theta: float, spec: Optional[QuadratureSpec] = None) -> float:
    """Coverage ``P(SINR > theta)`` with Poisson base stations."""
    if not isinstance(s.deployment, PoissonModel):
        raise TypeError("coverage_ppp needs a Poisson deployment")
    if theta == 0:
        return 1.0
    beta = s.pathloss.beta
    _check_theta_beta(theta, beta)
    rate = 1.0 + tau(theta, beta, s.interferer_fading)
    if s.noise == 0:
        return 1.0 / rate
    spec = _outer_spec(spec)
    snr_coef = theta * s.noise / s.power
    lam_pi = math.pi * s.deployment.lam

    def integrand(t):
        return np.exp(-snr_coef * (t / lam_pi) ** beta - t * rate)

    cutoff = math.log(1.0 / (rate * spec.absolute_tolerance)) / rate
    return numerics.integrate_semi_infinite(integrand, 0.0, spec, cutoff=cutoff)


def coverage_ginibre(s: SingleTierScenario, theta: float, trunc: Optional[SeriesTruncation] = None,
                     spec: Optional[QuadratureSpec] = None) -> float:
    """Coverage ``P(SINR > theta)`` with alpha-Ginibre base stations."""
    if not isinstance(s.deployment, GinibreModel):
        raise TypeError("coverage_ginibre needs a GinibreModel deployment")
    if theta == 0:
        return 1.0
    beta = s.pathloss.beta
    _check_theta_beta(theta, beta)
    alpha = s.deployment.alpha
    shape = s.interferer_fading.shape
    spec = _outer_spec(spec)
    trunc = trunc or SeriesTruncation()
    snr_coef = theta * s.noise / s.power
    lam_pi = math.pi * s.deployment.lam
    decay = alpha * (1.0 + tau(theta, beta, s.interferer_fading))

    def integrand(ts):
        out = np.empty(len(ts))
        for k, t in enumerate(ts):
            val = thinned_factor_series(alpha, float(t), theta, beta, shape, trunc, with_s=True)
            noise_term = snr_coef * (alpha * t / lam_pi) ** beta if snr_coef else 0.0
            out[k] = alpha * math.exp(val.log_m + val.log_s_scaled - noise_term)
        return out

    # alpha e^-t M S <= alpha e^alpha exp(-alpha t (1 + tau))
    cutoff = (alpha + math.log(alpha / (decay * spec.absolute_tolerance))) / decay
    return min(1.0, numerics.integrate_semi_infinite(integrand, 0.0, spec, cutoff=cutoff))


def coverage(s: SingleTierScenario, theta: float, trunc: Optional[SeriesTruncation] = None,
             spec: Optional[QuadratureSpec] = None) -> float:
    """Dispatch on the deployment type."""
    if isinstance(s.deployment, PoissonModel):
        return coverage_ppp(s, theta, spec)
    return coverage_ginibre(s, theta, trunc, spec)


def coverage_curve(s: SingleTierScenario, thetas, trunc: Optional[SeriesTruncation] = None,
                   spec: Optional[QuadratureSpec] = None) -> np.ndarray:
    """Coverage on a grid of linear thresholds."""
    return np.array([coverage(s, float(th), trunc, spec) for th in np.atleast_1d(thetas)])
