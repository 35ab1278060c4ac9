import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from ginicell import pointproc as pp
from ginicell.pointproc import GinibreModel, PoissonModel, RadialConfiguration

LAM = 1.0 / math.pi


def test_model_validation():
    with pytest.raises(ValueError):
        GinibreModel(0.0, 1.0)
    with pytest.raises(ValueError):
        GinibreModel(1.5, 1.0)
    with pytest.raises(ValueError):
        GinibreModel(0.5, -1.0)
    with pytest.raises(ValueError):
        PoissonModel(0.0)
    assert GinibreModel(0.5, LAM).rate == pytest.approx(2.0)


def test_configuration_validation():
    with pytest.raises(ValueError):
        RadialConfiguration([2.0, 1.0])
    with pytest.raises(ValueError):
        RadialConfiguration([0.0, 1.0])
    cfg = RadialConfiguration([0.5, 1.0, 4.0])
    assert len(cfg) == 3
    assert cfg.count_within(1.0) == 2
    with pytest.raises(ValueError):
        cfg.squared_radii[0] = 3.0


def test_eigenvalue_examples():
    m = GinibreModel(1.0, LAM)
    assert pp.kernel_eigenvalue(m, 1, 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-13)
    assert pp.kernel_eigenvalue(GinibreModel(0.3, 2.0), 1, math.inf) == 0.3
    # 0.5 * P(3, 8) with P(3, x) = 1 - e^-x (1 + x + x^2/2)
    ref = 0.5 * (1.0 - math.exp(-8.0) * (1.0 + 8.0 + 32.0))
    assert pp.kernel_eigenvalue(GinibreModel(0.5, LAM), 3, 2.0) == pytest.approx(ref, rel=1e-13)
    with pytest.raises(ValueError):
        pp.kernel_eigenvalue(m, 0, 1.0)
    with pytest.raises(ValueError):
        pp.kernel_eigenvalue(m, 1, 0.0)


@given(st.floats(0.01, 1.0), st.floats(0.05, 5.0), st.floats(0.1, 4.0))
def test_eigenvalues_bounded_and_nonincreasing(alpha, lam, r):
    kappa = pp.kernel_eigenvalues(GinibreModel(alpha, lam), r)
    assert np.all(kappa >= 0) and np.all(kappa <= alpha)
    assert np.all(np.diff(kappa) <= 0)


def test_disk_statistics_unit_mean():
    stats = pp.disk_count_statistics(GinibreModel(1.0, LAM), 1.0)
    assert stats.mean == pytest.approx(1.0, abs=1e-8)
    assert stats.variance <= stats.mean


@given(st.floats(0.01, 1.0), st.floats(0.05, 5.0), st.floats(0.05, 5.0))
def test_eigenvalue_sum_and_underdispersion(alpha, lam, r):
    stats = pp.disk_count_statistics(GinibreModel(alpha, lam), r)
    assert stats.mean == pytest.approx(lam * math.pi * r * r, abs=1e-8)
    assert stats.variance < stats.mean


def test_disk_statistics_monte_carlo():
    m = GinibreModel(0.5, LAM)
    stats = pp.disk_count_statistics(m, 2.0)
    assert stats.mean == pytest.approx(4.0, abs=1e-8)
    counts = pp.sample_disk_counts(m, 2.0, 1_000_000, seed=11).astype(float)
    n = counts.size
    se_mean = math.sqrt(counts.var() / n)
    m4 = np.mean((counts - counts.mean()) ** 4)
    se_var = math.sqrt((m4 - counts.var() ** 2) / n)
    assert abs(counts.mean() - stats.mean) < 3 * se_mean
    assert abs(counts.var(ddof=1) - stats.variance) < 3 * se_var


def test_sample_radial_alpha_one_keeps_everything():
    m = GinibreModel(1.0, LAM)
    cfg = pp.sample_radial(m, 50, seed=3)
    assert len(cfg) == 50
    assert sorted(cfg.candidate_index) == list(range(1, 51))
    assert not cfg.origin_conditioned


def test_sample_radial_deterministic():
    m = GinibreModel(0.4, 2.0)
    a = pp.sample_radial(m, 200, seed=99)
    b = pp.sample_radial(m, 200, seed=99)
    assert np.array_equal(a.squared_radii, b.squared_radii)
    c = pp.sample_radial(m, 200, seed=100)
    assert not np.array_equal(a.squared_radii, c.squared_radii)


def test_first_candidate_mean():
    # candidate 1 is Gamma(1, pi lam / alpha): mean alpha / (pi lam) = 1 here
    m = GinibreModel(1.0, LAM)
    vals = []
    for s in range(4000):
        cfg = pp.sample_radial(m, 3, seed=s)
        vals.append(cfg.squared_radii[cfg.candidate_index == 1][0])
    assert abs(np.mean(vals) - 1.0) < 4 * 1.0 / math.sqrt(len(vals))


def test_sampler_intensity():
    m = GinibreModel(0.5, 0.7)
    r = 1.5
    counts = pp.sample_disk_counts(m, r, 200_000, seed=5)
    expected = 0.7 * math.pi * r * r
    assert abs(counts.mean() - expected) < 4 * math.sqrt(counts.var() / counts.size)


def test_nearest_distance_law():
    m = GinibreModel(0.5, LAM)
    n_points = pp.default_max_points(m, 3.0)
    mins = np.array([pp.sample_radial(m, n_points, seed=s).squared_radii[0] for s in range(20000)])
    ys = np.array([0.1, 0.4, 1.0, 2.0])
    surv = pp.nearest_sq_radius_survival(m, ys)
    # the survival is also the product formula prod_i (1 - alpha P(i, pi lam y / alpha))
    for y, s in zip(ys, surv):
        idx = np.arange(1, 200)
        direct = np.prod(1 - 0.5 * special.gammainc(idx, y / 0.5))
        assert s == pytest.approx(direct, rel=1e-10)
        emp = np.mean(mins > y)
        assert abs(emp - s) < 4 * math.sqrt(s * (1 - s) / mins.size)


def test_palm_first_moment():
    m = GinibreModel(0.5, LAM)
    r = 2.0
    expected = LAM * math.pi * r * r - 0.5 * (1 - math.exp(-math.pi * LAM * r * r / 0.5))
    assert pp.palm_disk_mean(m, r) == pytest.approx(expected, rel=1e-14)
    counts = pp.sample_disk_counts(m, r, 200_000, seed=21, palm=True)
    assert abs(counts.mean() - expected) < 4 * math.sqrt(counts.var() / counts.size)


def test_palm_alpha_one_removes_one_point():
    m = GinibreModel(1.0, LAM)
    r = 4.0
    x = math.pi * LAM * r * r
    assert pp.palm_disk_mean(m, r) == pytest.approx(x - 1 + math.exp(-x), rel=1e-14)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_palm_equals_removing_first_candidate(r):
    m = GinibreModel(0.6, LAM)
    n = pp.default_max_points(m, r)
    reps = 20000
    removed = np.empty(reps)
    palm = np.empty(reps)
    for s in range(reps):
        cfg = pp.sample_radial(m, n + 1, seed=s)
        removed[s] = np.sum((cfg.squared_radii <= r * r) & (cfg.candidate_index != 1))
        palm[s] = pp.sample_radial_palm(m, n, seed=10 ** 6 + s).count_within(r)
    se = math.sqrt(removed.var() / reps + palm.var() / reps)
    assert abs(removed.mean() - palm.mean()) < 4 * se
    assert abs(removed.var() - palm.var()) < 0.1 * max(palm.var(), 0.05)
    assert palm.mean() == pytest.approx(pp.palm_disk_mean(m, r), abs=4 * math.sqrt(palm.var() / reps))
    assert pp.sample_radial_palm(m, 5, seed=1).origin_conditioned


def test_poisson_sampler_nearest_and_mean():
    lam = 0.8
    mins = np.array([pp.sample_poisson_radial(lam, 5, seed=s).squared_radii[0] for s in range(20000)])
    for y in (0.2, 0.5, 1.0):
        s = math.exp(-lam * math.pi * y)
        assert abs(np.mean(mins > y) - s) < 4 * math.sqrt(s * (1 - s) / mins.size)
    counts = pp.sample_disk_counts(PoissonModel(lam), 1.2, 100_000, seed=8)
    mean = lam * math.pi * 1.44
    assert abs(counts.mean() - mean) < 4 * math.sqrt(mean / counts.size)
    assert abs(counts.var() - mean) < 4 * math.sqrt((mean + 2 * mean ** 2) / counts.size)


def test_small_alpha_counts_look_poisson():
    reps = 100_000
    g = pp.sample_disk_counts(GinibreModel(0.01, LAM), 1.0, reps, seed=1).astype(float)
    p = pp.sample_disk_counts(PoissonModel(LAM), 1.0, reps, seed=2).astype(float)
    assert abs(g.mean() - p.mean()) < 3 * math.sqrt((g.var() + p.var()) / reps)
    # variance of a Poisson(1) sample variance is about (mu + 2 mu^2) / n
    assert abs(g.var() - p.var()) < 3 * math.sqrt(2 * 3.0 / reps)


def test_thinning_homothety():
    alpha, lam, reps = 0.4, 0.5, 40000
    direct = pp.sample_disk_counts(GinibreModel(alpha, lam), 1.0, reps, seed=31).astype(float)
    rng = np.random.default_rng(32)
    n = pp.default_max_points(GinibreModel(1.0, lam), 1.0 / math.sqrt(alpha))
    thinned = np.empty(reps)
    for s in range(reps):
        y = pp.sample_radial(GinibreModel(1.0, lam), n, seed=(32, s)).squared_radii
        keep = rng.random(y.size) < alpha
        thinned[s] = np.sum(alpha * y[keep] <= 1.0)
    se = math.sqrt(direct.var() / reps + thinned.var() / reps)
    assert abs(direct.mean() - thinned.mean()) < 4 * se
    assert abs(direct.var() - thinned.var()) < 0.05 * direct.var()


def test_pair_correlation():
    m = GinibreModel(0.5, LAM)
    assert pp.pair_correlation(m, 0.0) == 0.0
    assert pp.pair_correlation(m, 50.0) == pytest.approx(1.0)
    assert pp.pair_correlation(GinibreModel(1e-6, LAM), 0.3) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        pp.pair_correlation(m, -1.0)


def test_palm_kernel():
    m = GinibreModel(1.0, LAM)
    assert pp.palm_kernel(m, 0.0, 1 + 2j) == 0
    assert pp.palm_kernel(m, 1.0, 1.0).real == pytest.approx(math.e - 1, rel=1e-14)
    z, w = 0.3 + 0.7j, -1.1 + 0.2j
    assert pp.palm_kernel(m, z, w) == pytest.approx(np.conj(pp.palm_kernel(m, w, z)))


def test_reduced_palm_kernel_at_origin():
    m = GinibreModel(0.7, 0.9)
    palm = pp.reduced_palm_kernel(lambda x, y: pp.ginibre_kernel(m, x, y), 0.0)
    for z, w in [(0.2 + 0.1j, 0.5 - 0.3j), (1.0, 1.0), (-0.4j, 0.9)]:
        assert palm(z, w) == pytest.approx(pp.palm_kernel(m, z, w), rel=1e-12)


def test_density_kernel_diagonal_is_intensity():
    m = GinibreModel(0.3, 2.5)
    assert pp.ginibre_density_kernel(m, 0.4 + 0.2j, 0.4 + 0.2j).real == pytest.approx(2.5)


def test_attach_angles_preserves_radii():
    cfg = pp.sample_radial(GinibreModel(1.0, LAM), 30, seed=4)
    pts = pp.attach_uniform_angles(cfg, seed=5)
    assert np.allclose(np.abs(pts), cfg.radii)


def test_default_max_points_tail():
    m = GinibreModel(0.5, LAM)
    n = pp.default_max_points(m, 3.0)
    assert special.gammainc(n, m.rate * 9.0) < 1e-10
    assert special.gammainc(n - 1, m.rate * 9.0) >= 1e-10
