import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from ginicell import numerics
from ginicell.numerics import QuadratureError, QuadratureSpec


def poisson_tail(a, x):
    # P(a, x) = sum_{k >= a} e^-x x^k / k! for integer a
    terms = [math.exp(-x + k * math.log(x) - math.lgamma(k + 1)) for k in range(a, a + 400)]
    return math.fsum(terms)


def test_lower_gamma_unit_shape():
    assert numerics.regularized_lower_gamma(1, 1) == pytest.approx(1 - math.exp(-1), rel=1e-14)


def test_lower_gamma_at_zero():
    assert numerics.regularized_lower_gamma(3.5, 0.0) == 0.0


def test_lower_gamma_against_poisson_tail():
    val = numerics.regularized_lower_gamma(5, 20)
    assert 0.999 < val < 1.0
    assert val == pytest.approx(poisson_tail(5, 20.0), rel=1e-12)


@pytest.mark.parametrize("a,x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.5)])
def test_gamma_domain_errors(a, x):
    with pytest.raises(ValueError):
        numerics.regularized_lower_gamma(a, x)
    with pytest.raises(ValueError):
        numerics.regularized_upper_gamma(a, x)


def test_gamma_infinite_argument():
    assert numerics.regularized_lower_gamma(2.0, math.inf) == 1.0
    assert numerics.regularized_upper_gamma(2.0, math.inf) == 0.0


@given(st.floats(1e-3, 50.0), st.floats(0.0, 100.0))
def test_lower_upper_sum_to_one(a, x):
    p = numerics.regularized_lower_gamma(a, x)
    q = numerics.regularized_upper_gamma(a, x)
    assert abs(p + q - 1.0) <= 1e-12


@given(st.integers(1, 40), st.floats(0.0, 100.0))
def test_integer_shape_matches_finite_sum(a, x):
    head = math.fsum(math.exp(-x) * x ** k / math.factorial(k) for k in range(a))
    assert abs(numerics.regularized_lower_gamma(a, x) - (1.0 - head)) <= 1e-10


@given(st.floats(1e-2, 50.0), st.floats(1e-3, 100.0))
def test_lower_gamma_relative_accuracy(a, x):
    ref = special.gammainc(a, x)
    val = numerics.regularized_lower_gamma(a, x)
    assert val == pytest.approx(ref, rel=1e-12, abs=1e-300)


@given(st.floats(0.1, 30.0), st.floats(0.0, 60.0), st.floats(0.0, 5.0))
def test_lower_gamma_monotone_in_x(a, x, dx):
    assert numerics.regularized_lower_gamma(a, x + dx) >= numerics.regularized_lower_gamma(a, x)


def test_log_gamma_values():
    assert numerics.log_gamma(1.0) == 0.0
    assert numerics.log_gamma(2.0) == 0.0
    assert numerics.log_gamma(11.0) == pytest.approx(math.log(3628800.0), rel=1e-13)
    with pytest.raises(ValueError):
        numerics.log_gamma(0.0)


def test_log1mexp():
    x = np.array([1e-10, 0.1, 1.0, 50.0])
    ref = np.log(-np.expm1(-x))
    assert np.allclose(numerics.log1mexp(x), ref, rtol=1e-14)


@pytest.mark.parametrize("f,lower,expected", [
    (lambda u: np.exp(-u), 0.0, 1.0),
    (lambda u: u * np.exp(-u), 0.0, 1.0),
    (lambda u: np.exp(-u), 3.0, math.exp(-3.0)),
])
def test_semi_infinite_examples(f, lower, expected):
    assert numerics.integrate_semi_infinite(f, lower) == pytest.approx(expected, rel=1e-9)


def test_semi_infinite_with_cutoff():
    val = numerics.integrate_semi_infinite(lambda u: np.exp(-u), 0.0, cutoff=40.0)
    assert val == pytest.approx(1.0, rel=1e-9)


def test_semi_infinite_algebraic_tail():
    val = numerics.integrate_semi_infinite(lambda u: u ** -1.5, 1.0, algebraic_decay=1.5)
    assert val == pytest.approx(2.0, rel=1e-9)
    with pytest.raises(ValueError):
        numerics.integrate_semi_infinite(lambda u: 1 / u, 1.0, algebraic_decay=1.0)


@given(st.floats(-50.0, 50.0).filter(lambda c: abs(c) > 1e-6), st.floats(0.2, 5.0))
def test_semi_infinite_linearity(c, rate):
    base = numerics.integrate_semi_infinite(lambda u: np.exp(-rate * u) * (1 + np.sin(u) ** 2))
    scaled = numerics.integrate_semi_infinite(lambda u: c * np.exp(-rate * u) * (1 + np.sin(u) ** 2))
    assert scaled == pytest.approx(c * base, rel=1e-9)


def test_interval_matches_scipy_on_oscillatory_integrand():
    def f(x):
        return np.cos(30 * x) * np.exp(-x)
    ours = numerics.integrate_interval(f, 0.0, 5.0)
    ref, _ = integrate.quad(lambda x: math.cos(30 * x) * math.exp(-x), 0, 5, limit=200, epsabs=1e-13)
    assert ours == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_interval_orientation_and_empty():
    f = lambda x: x ** 2
    assert numerics.integrate_interval(f, 1.0, 1.0) == 0.0
    assert numerics.integrate_interval(f, 2.0, 0.0) == pytest.approx(-8.0 / 3.0, rel=1e-12)


def test_quadrature_error_carries_estimate():
    spec = QuadratureSpec(relative_tolerance=1e-14, absolute_tolerance=1e-15, max_subdivisions=3)
    with pytest.raises(QuadratureError) as info:
        numerics.integrate_interval(lambda x: np.sqrt(np.abs(np.sin(50 * x))), 0.0, 10.0, spec)
    assert math.isfinite(info.value.estimate)
    assert info.value.error_bound > 0


def test_nonfinite_integrand_is_reported():
    with pytest.raises(FloatingPointError):
        numerics.integrate_interval(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(relative_tolerance=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)


def test_deterministic():
    f = lambda u: np.exp(-u) / (1 + u)
    assert numerics.integrate_semi_infinite(f) == numerics.integrate_semi_infinite(f)
