import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from ginicell import analytic as an
from ginicell import multitier as mt
from ginicell import pointproc as pp
from ginicell.analytic import SingleTierScenario
from ginicell.channel import FadingModel
from ginicell.pointproc import GinibreModel

from helpers import ASYMMETRIC, LAM, two_tier


def test_assoc_radii_examples():
    assert mt.assoc_radius_1to2(two_tier(), 1.7) == pytest.approx(1.7, rel=1e-15)
    assert mt.assoc_radius_1to2(two_tier(p2=16.0), 1.0) == pytest.approx(2.0, rel=1e-15)
    assert mt.assoc_radius_2to1(two_tier(p1=16.0), 1.0) == pytest.approx(2.0, rel=1e-15)
    assert mt.assoc_radius_2to1(two_tier(), 0.3) == pytest.approx(0.3, rel=1e-15)
    r = np.linspace(0.1, 5, 50)
    assert np.all(np.diff(mt.assoc_radius_1to2(two_tier(**ASYMMETRIC), r)) > 0)
    with pytest.raises(ValueError):
        mt.assoc_radius_1to2(two_tier(), 0.0)


@given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(1.1, 4), st.floats(1.1, 4), st.floats(0.01, 10))
def test_assoc_radii_are_inverse(p1, b2, beta1, beta2, r):
    scn = two_tier(p1=p1, b2=b2, beta1=beta1, beta2=beta2)
    assert mt.assoc_radius_2to1(scn, mt.assoc_radius_1to2(scn, r)) == pytest.approx(r, rel=1e-12)


def test_tau12_reduces_to_tau():
    scn = two_tier()
    for theta in (0.1, 1.0, 10.0):
        assert mt.tau_12(scn, theta, 2.0) == pytest.approx(an.tau(theta, 2.0), rel=1e-12)


def test_tau12_dual_quadrature():
    scn = two_tier(psi2=2)
    f = lambda u: (1 - (u / (u + 1.0)) ** 2) * u ** -0.5
    ref, _ = integrate.quad(f, 1.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=500)
    assert mt.tau_12(scn, 1.0, 2.0) == pytest.approx(ref / 2.0, abs=1e-8)


def test_tau12_is_rescaled_tau():
    # u -> u b1/b2 turns tau_12(theta) into tau(theta b1/b2)
    scn = two_tier(b1=3.0, b2=0.7, psi2=3)
    expected = an.tau(1.3 * 3.0 / 0.7, 2.2, FadingModel.erlang(3))
    assert mt.tau_12(scn, 1.3, 2.2) == pytest.approx(expected, rel=1e-10)


def test_tau12_nondecreasing_in_psi2():
    vals = [mt.tau_12(two_tier(psi2=k), 2.0, 2.0) for k in range(1, 6)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_cross_terms():
    c12, c21 = mt.cross_terms(two_tier(), 1.3)
    assert c12 == pytest.approx(1.3, rel=1e-14) and c21 == pytest.approx(1.3, rel=1e-14)
    c12, c21 = mt.cross_terms(two_tier(alpha=0.5), 2.0)
    assert c12 == pytest.approx(1.0, rel=1e-14)
    assert c21 == pytest.approx(4.0, rel=1e-14)
    ts = np.linspace(0.1, 10, 30)
    c = [mt.cross_terms(two_tier(**ASYMMETRIC), t)[0] for t in ts]
    assert np.all(np.diff(c) > 0)


def test_M21_small_theta_is_void_product():
    scn = two_tier(alpha=0.7, **ASYMMETRIC)
    t = 0.8
    _, c21 = mt.cross_terms(scn, t)
    idx = np.arange(0, 20000, dtype=float)
    direct = math.exp(math.fsum(np.log1p(-0.7 * special.gammainc(idx + 1, c21))))
    assert mt.M_alpha_21(scn, t, 1e-14) == pytest.approx(direct, rel=1e-9)


def test_M21_alpha_to_zero_is_poisson_factor():
    # C_21 = t / alpha, so the thinned tier tends to a PPP of the same density
    ppp = math.exp(-(1.0 + an.tau(1.0, 2.0)))
    errs = [abs(mt.M_alpha_21(two_tier(alpha=a), 1.0, 1.0) - ppp) for a in (0.1, 0.01, 0.001)]
    assert errs[0] > errs[1] > errs[2] and errs[2] < 2e-4


def test_M21_brute_force_symmetric():
    scn = two_tier()
    t, theta = 1.0, 1.0
    _, c21 = mt.cross_terms(scn, t)
    n = 10_000
    J = np.array([an.J_i(i, c21, theta, 2.0) for i in range(n)])
    head = math.fsum(np.log(J))
    tail_d = c21 * (1 + an.tau(theta, 2.0)) - math.fsum(1 - J)
    lo, hi = head - tail_d / J[-1], head - tail_d
    val = math.log(mt.M_alpha_21(scn, t, theta))
    assert lo - 1e-7 <= val <= hi + 1e-7


def test_vanishing_tier2():
    scn = two_tier(alpha=0.6, lam2=1e-8, psi1=2)
    cov = mt.coverage_two_tier(scn)
    single = an.coverage_ginibre(SingleTierScenario(GinibreModel(0.6, LAM),
                                                    interferer_fading=FadingModel.erlang(2)), 1.0)
    assert cov.tier2_part < 1e-6
    assert cov.total == pytest.approx(single, abs=2e-3)


@pytest.mark.parametrize("kw", [{}, ASYMMETRIC, dict(alpha=0.4, beta2=2.5, theta1=3.0, theta2=0.5, **ASYMMETRIC)])
def test_parts_are_probabilities(kw):
    cov = mt.coverage_two_tier(two_tier(**kw))
    assert 0 <= cov.tier1_part <= 1 and 0 <= cov.tier2_part <= 1
    assert cov.total == cov.tier1_part + cov.tier2_part <= 1


def test_bias_and_power_scaling_bit_identical():
    base = mt.coverage_two_tier(two_tier(**ASYMMETRIC))
    for c in (2.0, 10.0, 0.5):
        kw = dict(ASYMMETRIC)
        kw.update(b1=c * kw["b1"], b2=c * kw["b2"])
        assert mt.coverage_two_tier(two_tier(**kw)) == base
        kw = dict(ASYMMETRIC)
        kw.update(p1=c * kw["p1"], p2=c * kw["p2"])
        assert mt.coverage_two_tier(two_tier(**kw)) == base


def test_parts_depend_on_own_threshold_only():
    a = mt.coverage_two_tier(two_tier(theta1=1.0, theta2=1.0, **ASYMMETRIC))
    b = mt.coverage_two_tier(two_tier(theta1=1.0, theta2=4.0, **ASYMMETRIC))
    c = mt.coverage_two_tier(two_tier(theta1=4.0, theta2=1.0, **ASYMMETRIC))
    assert a.tier1_part == b.tier1_part and b.tier2_part < a.tier2_part
    assert a.tier2_part == c.tier2_part and c.tier1_part < a.tier1_part


def test_association_probabilities_sum_to_one():
    for kw in ({}, ASYMMETRIC, dict(alpha=0.3, beta1=2.5, **ASYMMETRIC)):
        assoc = mt.association_probabilities(two_tier(**kw))
        assert assoc.total == pytest.approx(1.0, abs=1e-8)
    small = mt.coverage_two_tier(two_tier(theta1=1e-8, theta2=1e-8, **ASYMMETRIC))
    exact = mt.association_probabilities(two_tier(**ASYMMETRIC))
    assert small.tier1_part == pytest.approx(exact.tier1_part, abs=1e-3)


def test_association_against_nearest_distance_oracle():
    # symmetric tiers: tier 2 serves iff its nearest point is closer,
    # P = int_0^inf e^-y P(min Ginibre > y) dy in units pi lam = 1
    m = GinibreModel(1.0, LAM)
    ref, _ = integrate.quad(lambda y: math.exp(-y) * pp.nearest_sq_radius_survival(m, y)[0], 0, 60, limit=200)
    assert mt.association_probabilities(two_tier()).tier2_part == pytest.approx(ref, abs=1e-9)


def test_full_sdma_required_for_analytic():
    scn = two_tier(psi1=2, m1=3)
    with pytest.raises(ValueError):
        mt.coverage_two_tier(scn)
