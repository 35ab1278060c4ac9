"""Alpha-Ginibre and Poisson point processes seen from the origin.

Everything here is radial.  The squared moduli of an alpha-Ginibre
configuration with intensity ``lam`` are distributed as independent
``Gamma(i, rate=pi*lam/alpha)`` candidates, ``i = 1, 2, ...``, each kept
with probability ``alpha``.  Under the reduced Palm distribution at the
origin the candidate shapes shift to ``i + 1``.  Angles are never needed
for the coverage statistics; :func:`attach_uniform_angles` exists only
for producing scatter data and is exact radially, approximate angularly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import special

from . import numerics

__all__ = [
    "GinibreModel",
    "PoissonModel",
    "RadialConfiguration",
    "CountingStatistics",
    "make_rng",
    "kernel_eigenvalue",
    "kernel_eigenvalues",
    "disk_count_statistics",
    "palm_disk_mean",
    "nearest_sq_radius_survival",
    "sample_radial",
    "sample_radial_palm",
    "sample_poisson_radial",
    "count_within",
    "sample_disk_counts",
    "pair_correlation",
    "ginibre_kernel",
    "ginibre_density_kernel",
    "reduced_palm_kernel",
    "palm_kernel",
    "default_max_points",
    "attach_uniform_angles",
]

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


@dataclass(frozen=True)
class GinibreModel:
    """Scaled alpha-Ginibre process: repulsion ``alpha`` in (0, 1], intensity ``lam``."""

    alpha: float
    lam: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"intensity must be positive and finite, got {self.lam!r}")

    @property
    def rate(self) -> float:
        """Gamma rate of the squared-radius candidates, pi*lam/alpha."""
        return math.pi * self.lam / self.alpha


@dataclass(frozen=True)
class PoissonModel:
    """Homogeneous Poisson process with intensity ``lam``."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"intensity must be positive and finite, got {self.lam!r}")


@dataclass(frozen=True)
class RadialConfiguration:
    """Sorted squared distances from the origin to the sampled points.

    ``tiers`` labels each point with its tier (0-based) in multi-tier
    deployments; ``candidate_index`` records the Gamma shape index each
    retained point came from, when the sampler knows it.
    """

    squared_radii: np.ndarray
    origin_conditioned: bool = False
    tiers: Optional[np.ndarray] = None
    candidate_index: Optional[np.ndarray] = None

    def __post_init__(self):
        r2 = np.asarray(self.squared_radii, dtype=float)
        if r2.ndim != 1:
            raise ValueError("squared_radii must be one-dimensional")
        if r2.size and (np.any(r2 <= 0) or np.any(np.diff(r2) < 0)):
            raise ValueError("squared_radii must be positive and sorted ascending")
        r2.setflags(write=False)
        object.__setattr__(self, "squared_radii", r2)
        for name in ("tiers", "candidate_index"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr)
                if arr.shape != r2.shape:
                    raise ValueError(f"{name} must match squared_radii in length")
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    def __len__(self):
        return int(self.squared_radii.size)

    @property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.squared_radii)

    def count_within(self, r: float) -> int:
        return int(np.searchsorted(self.squared_radii, r * r, side="right"))


@dataclass(frozen=True)
class CountingStatistics:
    """Mean and variance of the number of points in a disk, with eigenvalues."""

    mean: float
    variance: float
    eigenvalues: np.ndarray = field(repr=False)


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Philox-backed generator from an int, a SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def _check_radius(r):
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r!r}")


def kernel_eigenvalue(model: GinibreModel, i: int, r: float) -> float:
    """Eigenvalue ``alpha * P(i, pi*lam*r^2/alpha)`` of the kernel restricted to the disk D_r."""
    if int(i) != i or i < 1:
        raise ValueError(f"eigenvalue index must be an integer >= 1, got {i!r}")
    _check_radius(r)
    if math.isinf(r):
        return model.alpha
    return model.alpha * numerics.regularized_lower_gamma(int(i), model.rate * r * r)


def kernel_eigenvalues(model: GinibreModel, r: float, tolerance: float = 1e-14,
                       max_terms: int = 10_000_000) -> np.ndarray:
    """All eigenvalues for D_r down to ``tolerance`` (past the mode ``i > x``)."""
    _check_radius(r)
    x = model.rate * r * r
    n = int(math.ceil(x + 12.0 * math.sqrt(x) + 40.0))
    while True:
        if n > max_terms:
            raise ArithmeticError("eigenvalue truncation exceeded max_terms")
        idx = np.arange(1, n + 1, dtype=float)
        kappa = model.alpha * special.gammainc(idx, x)
        if kappa[-1] < tolerance:
            break
        n *= 2
    keep = (kappa >= tolerance) | (idx <= x)
    return kappa[: int(np.max(np.nonzero(keep)[0])) + 1]


def disk_count_statistics(model: GinibreModel, r: float, tolerance: float = 1e-14) -> CountingStatistics:
    """Mean and variance of the count in D_r from the Bernoulli representation."""
    kappa = kernel_eigenvalues(model, r, tolerance)
    mean = math.fsum(kappa)
    variance = math.fsum(kappa * (1.0 - kappa))
    return CountingStatistics(mean=mean, variance=variance, eigenvalues=kappa)


def palm_disk_mean(model: GinibreModel, r: float) -> float:
    """Expected count in D_r under the reduced Palm distribution at the origin."""
    _check_radius(r)
    x = model.rate * r * r
    return model.lam * math.pi * r * r + model.alpha * math.expm1(-x)


def nearest_sq_radius_survival(model: Union[GinibreModel, PoissonModel], y) -> np.ndarray:
    """P(min squared radius > y): the void probability of the disk of area pi*y."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if isinstance(model, PoissonModel):
        return np.exp(-math.pi * model.lam * y)
    out = np.empty_like(y)
    for k, yk in enumerate(y):
        if yk <= 0:
            out[k] = 1.0
            continue
        kappa = kernel_eigenvalues(model, math.sqrt(yk), tolerance=1e-17)
        if model.alpha == 1.0:
            # log(1 - P(i, x)) = log Q(i, x)
            idx = np.arange(1, kappa.size + 1, dtype=float)
            with np.errstate(divide="ignore"):
                out[k] = math.exp(math.fsum(np.log(special.gammaincc(idx, model.rate * yk))))
        else:
            out[k] = math.exp(math.fsum(np.log1p(-kappa)))
    return out


def default_max_points(model: Union[GinibreModel, PoissonModel], analysis_radius: float,
                       tail_probability: float = 1e-10) -> int:
    """Smallest N with P(Gamma(N, rate) <= R^2) below ``tail_probability``.

    Candidates past N are then almost surely outside the analysis disk.
    """
    _check_radius(analysis_radius)
    rate = model.rate if isinstance(model, GinibreModel) else math.pi * model.lam
    x = rate * analysis_radius ** 2
    lo, hi = 1, max(2, int(x + 1))
    while special.gammainc(hi, x) >= tail_probability:
        lo, hi = hi, hi * 2
    while lo < hi:
        mid = (lo + hi) // 2
        if special.gammainc(mid, x) < tail_probability:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _thinned_gamma(shapes: np.ndarray, rate: float, alpha: float, rng: np.random.Generator):
    candidates = rng.gamma(shapes, 1.0 / rate)
    if alpha < 1.0:
        kept = rng.random(shapes.shape) < alpha
    else:
        kept = np.ones(shapes.shape, dtype=bool)
    return candidates, kept


def _check_max_points(max_points):
    if int(max_points) != max_points or max_points < 1:
        raise ValueError(f"max_points must be a positive integer, got {max_points!r}")
    return int(max_points)


def sample_radial(model: GinibreModel, max_points: int, seed: SeedLike = None) -> RadialConfiguration:
    """Squared radii of an alpha-Ginibre configuration from its first ``max_points`` candidates."""
    n = _check_max_points(max_points)
    rng = make_rng(seed)
    shapes = np.arange(1, n + 1, dtype=float)
    candidates, kept = _thinned_gamma(shapes, model.rate, model.alpha, rng)
    values = candidates[kept]
    order = np.argsort(values, kind="stable")
    return RadialConfiguration(values[order], origin_conditioned=False,
                               candidate_index=np.arange(1, n + 1)[kept][order])


def sample_radial_palm(model: GinibreModel, max_points: int, seed: SeedLike = None) -> RadialConfiguration:
    """Reduced-Palm version of :func:`sample_radial`: candidate shapes ``i + 1``."""
    n = _check_max_points(max_points)
    rng = make_rng(seed)
    shapes = np.arange(2, n + 2, dtype=float)
    candidates, kept = _thinned_gamma(shapes, model.rate, model.alpha, rng)
    values = candidates[kept]
    order = np.argsort(values, kind="stable")
    return RadialConfiguration(values[order], origin_conditioned=True,
                               candidate_index=np.arange(1, n + 1)[kept][order])


def sample_poisson_radial(lam: float, max_points: int, seed: SeedLike = None) -> RadialConfiguration:
    """First ``max_points`` squared radii of a planar Poisson process.

    By the mapping theorem these are the arrival times of a rate ``pi*lam``
    Poisson process on the half line.
    """
    PoissonModel(lam)
    n = _check_max_points(max_points)
    rng = make_rng(seed)
    arrivals = np.cumsum(rng.exponential(1.0 / (math.pi * lam), size=n))
    return RadialConfiguration(arrivals, candidate_index=np.arange(1, n + 1))


def count_within(squared_radii: np.ndarray, r: float) -> np.ndarray:
    """Row-wise count of entries ``<= r^2`` in a 2-d batch of squared radii (NaN = absent)."""
    arr = np.asarray(squared_radii, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.sum(arr <= r * r, axis=-1)


def sample_disk_counts(model: Union[GinibreModel, PoissonModel], r: float, replications: int,
                       seed: SeedLike = None, *, palm: bool = False,
                       block_size: int = 8192) -> np.ndarray:
    """Point counts in D_r for independent configurations, drawn in batches.

    Candidates past :func:`default_max_points` are ignored; they fall in
    the disk with probability below 1e-10 per configuration.
    """
    _check_radius(r)
    reps = _check_max_points(replications)
    if palm and not isinstance(model, GinibreModel):
        raise TypeError("Palm counts are implemented for GinibreModel only")
    rng = make_rng(seed)
    n = default_max_points(model, r) + (1 if palm else 0)
    r2 = r * r
    out = np.empty(reps, dtype=np.int64)
    for start in range(0, reps, block_size):
        b = min(block_size, reps - start)
        if isinstance(model, PoissonModel):
            arrivals = np.cumsum(rng.exponential(1.0 / (math.pi * model.lam), size=(b, n)), axis=1)
            out[start:start + b] = np.sum(arrivals <= r2, axis=1)
            continue
        shapes = np.arange(2 if palm else 1, n + (2 if palm else 1), dtype=float)
        candidates, kept = _thinned_gamma(np.broadcast_to(shapes, (b, n)), model.rate, model.alpha, rng)
        out[start:start + b] = np.sum(kept & (candidates <= r2), axis=1)
    return out


def pair_correlation(model: GinibreModel, d) -> np.ndarray:
    """Pair correlation ``1 - exp(-pi*lam*d^2/alpha)``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be nonnegative")
    return -np.expm1(-model.rate * d * d)


def ginibre_kernel(model: GinibreModel, z, w):
    """Kernel ``exp(pi*lam*z*conj(w)/alpha)`` w.r.t. ``lam*exp(-pi*lam*|z|^2/alpha) dz``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.exp(model.rate * z * np.conj(w))


def ginibre_density_kernel(model: GinibreModel, z, w):
    """Same process, kernel taken w.r.t. Lebesgue measure."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    c = model.rate
    return model.lam * np.exp(-0.5 * c * (np.abs(z) ** 2 + np.abs(w) ** 2) + c * z * np.conj(w))


def reduced_palm_kernel(kernel, x0):
    """Kernel of the reduced Palm process at ``x0`` for a determinantal kernel.

    Returns ``(x, y) -> (K(x,y) K(x0,x0) - K(x,x0) K(x0,y)) / K(x0,x0)``.
    """
    k00 = kernel(x0, x0)
    if not abs(k00) > 0:
        raise ValueError("K(x0, x0) must be positive")

    def palm(x, y):
        return (kernel(x, y) * k00 - kernel(x, x0) * kernel(x0, y)) / k00

    return palm


def palm_kernel(model: GinibreModel, z, w):
    """Reduced-Palm kernel at the origin, ``exp(pi*lam*z*conj(w)/alpha) - 1``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.expm1(model.rate * z * np.conj(w))


def attach_uniform_angles(config: RadialConfiguration, seed: SeedLike = None) -> np.ndarray:
    """Complex points with the configuration's radii and i.i.d. uniform angles.

    Radially exact, angularly approximate: the true process has
    correlated angles.
    """
    rng = make_rng(seed)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=len(config))
    return config.radii * np.exp(1j * phi)
