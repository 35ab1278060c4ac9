"""Monte Carlo SINR engine used as an independent check on the analytic code.

Deployments are drawn radially: alpha-Ginibre squared radii as thinned
independent Gamma(i, pi*lam/alpha) candidates, Poisson squared radii as
the arrival times of a rate-pi*lam process.  Replications are processed
in fixed-size blocks.  Every random draw in block ``k`` comes from a
Philox stream keyed by ``(master_seed; k, tier, purpose)``, so results
do not depend on how blocks are spread over worker threads.

Only the first ``N`` candidates of each tier are generated.  By default
the expected interference of the remaining ones is added as a constant
(``tail_correction``); for Ginibre tiers it is the exact unconditional
mean, for Poisson tiers the mean given the ``N``-th arrival.  Its
fluctuation is O(N^-1.5) relative to the bulk.  A pilot run compares
``N`` against ``2N`` candidates on common random numbers and warns when
the coverage moves by more than 1e-3.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special, stats

from .analytic import SingleTierScenario
from .channel import sample_fading
from .multitier import TwoTierScenario
from .pointproc import GinibreModel, PoissonModel, RadialConfiguration

__all__ = [
    "McConfig",
    "McEstimate",
    "TruncationBiasWarning",
    "block_stream",
    "sinr_single_tier",
    "estimate_coverage_single",
    "estimate_coverage_curve",
    "estimate_coverage_two_tier",
    "estimate_coverage_two_tier_curve",
    "binomial_interval",
    "worker_count",
    "points_per_tier",
]

# purpose codes in the stream key
_DEPLOY = 0
_FADING = 1
_PILOT_OFFSET = 1 << 40
_SHIFT_LIMIT = 1e-3


class TruncationBiasWarning(UserWarning):
    """Doubling the number of generated candidates moved the estimate noticeably."""


@dataclass(frozen=True)
class McConfig:
    """Replication count, seed and truncation controls for the simulator.

    ``max_points_per_tier`` counts generated candidates per tier; ``None``
    picks ``ceil(1000/alpha)`` for Ginibre tiers (about 1000 retained
    points) and 1000 for Poisson tiers.
    """

    replications: int = 100_000
    master_seed: int = 0
    max_points_per_tier: Optional[int] = None
    confidence_level: float = 0.95
    block_size: int = 1024
    workers: Optional[int] = None
    tail_correction: bool = True
    pilot_check: bool = True
    pilot_replications: int = 4096
    bounded_pathloss: bool = False
    fixed_configuration: bool = False

    def __post_init__(self):
        if int(self.replications) != self.replications or self.replications < 1:
            raise ValueError("replications must be a positive integer")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if self.max_points_per_tier is not None and self.max_points_per_tier < 1:
            raise ValueError("max_points_per_tier must be >= 1")
        if not 0.0 < self.confidence_level < 1.0:
            raise ValueError("confidence_level must lie in (0, 1)")
        if self.block_size < 1 or self.pilot_replications < 1:
            raise ValueError("block_size and pilot_replications must be >= 1")
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be >= 1")


class McEstimate(NamedTuple):
    """Coverage estimate with a confidence interval.

    ``per_tier_coverage`` holds P(covered and served by tier k); it sums to
    ``coverage``.  ``truncation_shift`` is the pilot-run change in coverage
    from doubling the candidates (None when the pilot was skipped).
    """

    theta: Union[float, Tuple[float, float]]
    coverage: float
    half_width: float
    standard_error: float
    ci_low: float
    ci_high: float
    replications_used: int
    per_tier_association_freq: Tuple[float, ...]
    per_tier_coverage: Tuple[float, ...]
    truncation_shift: Optional[float] = None


def worker_count(requested: Optional[int] = None) -> int:
    """Threads to use: explicit request, then ``GINICELL_THREADS``, then the CPU count."""
    if requested is not None:
        return int(requested)
    env = os.environ.get("GINICELL_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"GINICELL_THREADS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ValueError(f"GINICELL_THREADS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def block_stream(master_seed: int, block: int, tier: int, purpose: int) -> np.random.Generator:
    """Generator for one (block, tier, purpose) cell of the seeding grid."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(block), int(tier), int(purpose)))
    return np.random.Generator(np.random.Philox(seq))


def binomial_interval(successes: int, n: int, level: float):
    """Point estimate, half-width, standard error and interval for a proportion.

    Normal approximation, switching to Wilson when the estimate is within
    five half-widths of 0 or 1.
    """
    p = successes / n
    z = float(stats.norm.ppf(0.5 + 0.5 * level))
    se = math.sqrt(p * (1.0 - p) / n)
    half = z * se
    if min(p, 1.0 - p) < 5.0 * half or se == 0.0:
        denom = 1.0 + z * z / n
        center = (p + z * z / (2 * n)) / denom
        spread = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
        lo = 0.0 if successes == 0 else max(0.0, center - spread)
        hi = 1.0 if successes == n else min(1.0, center + spread)
        half = 0.5 * (hi - lo)
    else:
        lo, hi = p - half, p + half
    return p, half, se, lo, hi


# -- sampling ---------------------------------------------------------------

def _default_points(model) -> int:
    if isinstance(model, GinibreModel):
        return int(math.ceil(1000.0 / model.alpha))
    return 1000


def points_per_tier(mc: McConfig, model) -> int:
    """Candidates generated for one tier under ``mc``."""
    return mc.max_points_per_tier or _default_points(model)


class _Tier(NamedTuple):
    rows: np.ndarray    # replication of each point, nondecreasing
    cand: np.ndarray    # 0-based candidate index
    y: np.ndarray       # squared radius
    last: Optional[np.ndarray]  # per-row N-th arrival (Poisson only)


def _sample_tier(model, n: int, b: int, rng: np.random.Generator) -> _Tier:
    if isinstance(model, PoissonModel):
        rate = math.pi * model.lam
        arrivals = np.cumsum(rng.standard_exponential((b, n)), axis=1) / rate
        rows = np.repeat(np.arange(b), n)
        cand = np.tile(np.arange(n), b)
        return _Tier(rows, cand, arrivals.ravel(), arrivals)
    rate = model.rate
    if model.alpha < 1.0:
        rows, cand = np.nonzero(rng.random((b, n)) < model.alpha)
    else:
        rows = np.repeat(np.arange(b), n)
        cand = np.tile(np.arange(n), b)
    y = rng.standard_gamma(cand + 1.0) / rate
    return _Tier(rows, cand, y, None)


def _restrict(tier: _Tier, n: int) -> _Tier:
    keep = tier.cand < n
    last = None if tier.last is None else tier.last[:, :n]
    return _Tier(tier.rows[keep], tier.cand[keep], tier.y[keep], last)


def _tail_mean(model, n: int, beta: float, tier: _Tier, b: int) -> np.ndarray:
    """E[sum of y^-beta over candidates past the n-th], per replication."""
    if isinstance(model, PoissonModel):
        rate = math.pi * model.lam
        y_n = tier.last[:, n - 1]
        return rate * y_n ** (1.0 - beta) / (beta - 1.0)
    # sum_{i > n} E[Gamma(i, rate)^-beta] = rate^beta Gamma(n + 1 - beta) / ((beta - 1) Gamma(n))
    if n + 1 - beta <= 0:
        return np.full(b, math.inf)
    log_sum = (beta * math.log(model.rate) + special.gammaln(n + 1.0 - beta)
               - special.gammaln(float(n)) - math.log(beta - 1.0))
    return np.full(b, model.alpha * math.exp(log_sum))


def _gain(y: np.ndarray, beta: float, bounded: bool) -> np.ndarray:
    g = y ** (-beta)
    return np.minimum(g, 1.0) if bounded else g


def _nearest(tier: _Tier, b: int):
    """Smallest squared radius per row (inf for empty rows) and a mask of those points."""
    ymin = np.full(b, np.inf)
    counts = np.bincount(tier.rows, minlength=b)
    nonempty = counts > 0
    if tier.y.size:
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))[nonempty]
        ymin[nonempty] = np.minimum.reduceat(tier.y, starts)
    is_min = tier.y == ymin[tier.rows]
    # keep only the first minimiser in a row (ties have probability zero)
    if is_min.sum() != nonempty.sum():
        first = np.zeros_like(is_min)
        idx = np.flatnonzero(is_min)
        _, pos = np.unique(tier.rows[idx], return_index=True)
        first[idx[pos]] = True
        is_min = first
    return ymin, is_min


def _tile_fixed(tier: _Tier, b: int) -> _Tier:
    """Repeat a single-row configuration over ``b`` rows."""
    k = tier.y.size
    rows = np.repeat(np.arange(b), k)
    last = None if tier.last is None else np.repeat(tier.last, b, axis=0)
    return _Tier(rows, np.tile(tier.cand, b), np.tile(tier.y, b), last)


def _draw_tier(model, n, b, mc, block, tier_id):
    if mc.fixed_configuration:
        t = _sample_tier(model, n, 1, block_stream(mc.master_seed, 0, tier_id, _DEPLOY))
        return _tile_fixed(t, b)
    return _sample_tier(model, n, b, block_stream(mc.master_seed, block, tier_id, _DEPLOY))


# -- single tier ------------------------------------------------------------

def sinr_single_tier(s: SingleTierScenario, config: RadialConfiguration, desired_gain: float,
                     interferer_gains: Sequence[float]) -> float:
    """SINR at the origin with the nearest point serving.

    ``interferer_gains`` are the fading powers of the other points, in the
    order of ``config.squared_radii[1:]``.
    """
    if len(config) == 0:
        raise ValueError("configuration has no base stations")
    y = config.squared_radii
    g = np.asarray(interferer_gains, dtype=float)
    if g.shape != (len(y) - 1,):
        raise ValueError("need one interferer gain per non-serving point")
    beta = s.pathloss.beta
    signal = s.power * desired_gain * y[0] ** (-beta)
    interference = s.power * math.fsum(g * y[1:] ** (-beta))
    return signal / (interference + s.noise)


def _single_sinr(s, model, tier, n, b, h, g, mc):
    beta = s.pathloss.beta
    ymin, serving = _nearest(tier, b)
    gain = _gain(tier.y, beta, mc.bounded_pathloss)
    contrib = np.where(serving, 0.0, g * gain)
    interference = np.bincount(tier.rows, weights=contrib, minlength=b)
    if mc.tail_correction:
        interference = interference + s.interferer_fading.shape * _tail_mean(model, n, beta, tier, b)
    with np.errstate(divide="ignore"):
        signal = h * _gain(ymin, beta, mc.bounded_pathloss)
    signal[~np.isfinite(ymin)] = 0.0
    # no interferers and no noise: SINR = inf (covered); no BS at all: nan (not covered)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (s.power * signal) / (s.power * interference + s.noise)


def _single_block(s, n, b, block, mc, split=False):
    model = s.deployment
    tier = _draw_tier(model, 2 * n if split else n, b, mc, block, 1)
    rng = block_stream(mc.master_seed, block, 0, _FADING)
    h = rng.standard_exponential(b)
    g = sample_fading(s.interferer_fading, rng, tier.y.size)
    if not split:
        return [_single_sinr(s, model, tier, n, b, h, g, mc)]
    keep = tier.cand < n
    full = _single_sinr(s, model, tier, 2 * n, b, h, g, mc)
    short = _single_sinr(s, model, _restrict(tier, n), n, b, h, g[keep], mc)
    return [full, short]


def _blocks(total, size):
    starts = range(0, total, size)
    return [(k, min(size, total - start)) for k, start in enumerate(starts)]


def _run_blocks(fn, total, mc, offset=0):
    jobs = _blocks(total, mc.block_size)
    workers = min(worker_count(mc.workers), len(jobs))
    if workers <= 1:
        return [fn(offset + k, b) for k, b in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda kb: fn(offset + kb[0], kb[1]), jobs))


def _pilot_shift(block_fn, covered_fn, mc):
    """Largest change in coverage between N and 2N candidates on common draws."""
    reps = min(mc.replications, mc.pilot_replications)
    results = _run_blocks(lambda k, b: block_fn(k, b, True), reps, mc, offset=_PILOT_OFFSET)
    full = covered_fn([r[0] for r in results])
    short = covered_fn([r[1] for r in results])
    shift = float(np.max(np.abs(full - short)) / reps)
    if shift > _SHIFT_LIMIT:
        warnings.warn(f"doubling the generated candidates moved coverage by {shift:.2e} "
                      f"(> {_SHIFT_LIMIT:g}); increase max_points_per_tier",
                      TruncationBiasWarning, stacklevel=3)
    return shift


def _check_thetas(thetas):
    arr = np.atleast_1d(np.asarray(thetas, dtype=float))
    if arr.ndim != 1 or np.any(~(arr >= 0)):
        raise ValueError("thresholds must be nonnegative")
    return arr


def estimate_coverage_curve(s: SingleTierScenario, thetas, mc: McConfig = McConfig()) -> List[McEstimate]:
    """Coverage on a threshold grid; all thresholds share the same draws."""
    thetas = _check_thetas(thetas)
    n = points_per_tier(mc, s.deployment)

    def block_fn(k, b, split=False):
        return _single_block(s, n, b, k, mc, split)

    def covered(sinr_blocks):
        counts = np.zeros(len(thetas), dtype=np.int64)
        for sinr in sinr_blocks:
            counts += np.count_nonzero(sinr[:, None] > thetas[None, :], axis=0)
        return counts

    shift = _pilot_shift(block_fn, covered, mc) if mc.pilot_check else None
    results = _run_blocks(block_fn, mc.replications, mc)
    sinr = [r[0] for r in results]
    counts = covered(sinr)
    assoc = (1.0,)
    out = []
    for th, c in zip(thetas, counts):
        p, half, se, lo, hi = binomial_interval(int(c), mc.replications, mc.confidence_level)
        if mc.replications < 100:
            half = lo = hi = math.nan
        out.append(McEstimate(float(th), p, half, se, lo, hi, mc.replications, assoc, (p,), shift))
    return out


def estimate_coverage_single(s: SingleTierScenario, theta: float, mc: McConfig = McConfig()) -> McEstimate:
    """Fraction of replications with SINR above ``theta``."""
    return estimate_coverage_curve(s, [theta], mc)[0]


# -- two tiers --------------------------------------------------------------

def _two_tier_sir(scn: TwoTierScenario, data, npts, b, h, gs, mc):
    tiers = (scn.tier1, scn.tier2)
    ymins, serving, biased = [], [], []
    for cfg, t in zip(tiers, data):
        ymin, is_min = _nearest(t, b)
        ymins.append(ymin)
        serving.append(is_min)
        with np.errstate(divide="ignore"):
            power = cfg.bias * cfg.power * cfg.delta * _gain(ymin, cfg.pathloss.beta, mc.bounded_pathloss)
        power[~np.isfinite(ymin)] = 0.0
        biased.append(power)
    # ties go to tier 1; they have probability zero
    tier_of = np.where(biased[0] >= biased[1], 0, 1)
    none = (biased[0] == 0.0) & (biased[1] == 0.0)

    interference = np.zeros(b)
    signal = np.zeros(b)
    for k, (cfg, t) in enumerate(zip(tiers, data)):
        beta = cfg.pathloss.beta
        is_serving = serving[k] & (tier_of[t.rows] == k)
        contrib = np.where(is_serving, 0.0, gs[k] * _gain(t.y, beta, mc.bounded_pathloss))
        part = np.bincount(t.rows, weights=contrib, minlength=b)
        if mc.tail_correction:
            part = part + cfg.served_users * _tail_mean(cfg.deployment, npts[k], beta, t, b)
        interference += cfg.power * part
        mine = (tier_of == k) & ~none
        signal[mine] = cfg.power * h[k][mine] * _gain(ymins[k][mine], beta, mc.bounded_pathloss)
    with np.errstate(divide="ignore", invalid="ignore"):
        sir = signal / interference
    return sir, np.where(none, -1, tier_of)


def _two_tier_block(scn, n1, n2, b, block, mc, split=False):
    f = 2 if split else 1
    t1 = _draw_tier(scn.tier1.deployment, f * n1, b, mc, block, 1)
    t2 = _draw_tier(scn.tier2.deployment, f * n2, b, mc, block, 2)
    rng = block_stream(mc.master_seed, block, 0, _FADING)
    # serving-link power for either tier, so the draw does not depend on the association
    h = [sample_fading(scn.tier1.desired_fading, rng, b), sample_fading(scn.tier2.desired_fading, rng, b)]
    gs = [sample_fading(scn.tier1.interferer_fading, rng, t1.y.size),
          sample_fading(scn.tier2.interferer_fading, rng, t2.y.size)]
    if not split:
        return [_two_tier_sir(scn, (t1, t2), (n1, n2), b, h, gs, mc)]
    full = _two_tier_sir(scn, (t1, t2), (2 * n1, 2 * n2), b, h, gs, mc)
    short_gs = [gs[0][t1.cand < n1], gs[1][t2.cand < n2]]
    short = _two_tier_sir(scn, (_restrict(t1, n1), _restrict(t2, n2)), (n1, n2), b, h, short_gs, mc)
    return [full, short]


def estimate_coverage_two_tier_curve(scn: TwoTierScenario, thresholds: Sequence[Tuple[float, float]],
                                     mc: McConfig = McConfig()) -> List[McEstimate]:
    """Two-tier coverage for several ``(theta1, theta2)`` pairs on shared draws."""
    th = np.asarray(thresholds, dtype=float).reshape(-1, 2)
    _check_thetas(th.ravel())
    n1 = points_per_tier(mc, scn.tier1.deployment)
    n2 = points_per_tier(mc, scn.tier2.deployment)

    def block_fn(k, b, split=False):
        return _two_tier_block(scn, n1, n2, b, k, mc, split)

    def tallies(blocks):
        cov = np.zeros((len(th), 2), dtype=np.int64)
        assoc = np.zeros(2, dtype=np.int64)
        for sir, tier_of in blocks:
            for k in range(2):
                mine = tier_of == k
                assoc[k] += np.count_nonzero(mine)
                cov[:, k] += np.count_nonzero(sir[mine, None] > th[None, :, k], axis=0)
        return cov, assoc

    def covered(blocks):
        return tallies(blocks)[0].sum(axis=1)

    shift = _pilot_shift(block_fn, covered, mc) if mc.pilot_check else None
    results = _run_blocks(block_fn, mc.replications, mc)
    cov, assoc = tallies([r[0] for r in results])
    n = mc.replications
    served = max(int(assoc.sum()), 1)
    freq = tuple(float(a) / served for a in assoc)
    out = []
    for row, c in zip(th, cov):
        p, half, se, lo, hi = binomial_interval(int(c.sum()), n, mc.confidence_level)
        if n < 100:
            half = lo = hi = math.nan
        out.append(McEstimate((float(row[0]), float(row[1])), p, half, se, lo, hi, n, freq,
                              (c[0] / n, c[1] / n), shift))
    return out


def estimate_coverage_two_tier(scn: TwoTierScenario, mc: McConfig = McConfig()) -> McEstimate:
    """Two-tier coverage at the scenario's own thresholds."""
    return estimate_coverage_two_tier_curve(scn, [(scn.theta1, scn.theta2)], mc)[0]
