import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from starnoma import specfun
from starnoma.errors import DomainError

mpmath.mp.dps = 40


def mp_e1(x):
    return float(mpmath.e1(x))


# -- reference values ---------------------------------------------------------

@pytest.mark.parametrize("k, x, expected", [
    (1, 1, 1 - math.exp(-1)),
    (3.5, 0.0, 0.0),
    (2, 1, 0.2642411177),
])
def test_reg_lower_gamma_examples(k, x, expected):
    assert specfun.reg_lower_gamma(k, x) == pytest.approx(expected, abs=1e-9)


def test_reg_lower_gamma_2_1_matches_direct_integral():
    value, _ = integrate.quad(lambda t: t * math.exp(-t), 0, 1)
    assert specfun.reg_lower_gamma(2, 1) == pytest.approx(value, rel=1e-12)


@pytest.mark.parametrize("j, x, expected", [
    (1, 0.0, 1.0), (4, 0.0, 6.0), (1, 1.0, math.exp(-1)),
    (3, 2.0, 2 * math.exp(-2) * 5),
])
def test_upper_gamma_int_examples(j, x, expected):
    assert specfun.upper_gamma_int(j, x) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("x, expected", [(1.0, 0.2193839343955203), (0.1, 1.8229239584193906)])
def test_e1_examples(x, expected):
    assert specfun.e1(x) == pytest.approx(expected, rel=1e-12)


def test_e1_1_matches_direct_integral():
    value, _ = integrate.quad(lambda t: math.exp(-t) / t, 1, np.inf, epsabs=0, epsrel=1e-13)
    assert specfun.e1(1.0) == pytest.approx(value, rel=1e-11)


def test_e1_leading_asymptote():
    gaps = [abs(x * specfun.e1_scaled(x) - 1) for x in (1e2, 1e4, 1e6)]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 1e-5


def test_exp_mul_e1_examples():
    assert specfun.exp_mul_e1(0, 1) == pytest.approx(0.2193839343955203, rel=1e-12)
    assert specfun.exp_mul_e1(50, 50) == pytest.approx(float(mpmath.exp(50) * mpmath.e1(50)), rel=1e-12)
    big = specfun.exp_mul_e1(700, 1400)
    assert math.isfinite(big)
    assert big == pytest.approx(float(mpmath.exp(700) * mpmath.e1(1400)), rel=1e-12)


@pytest.mark.parametrize("a, j, x, expected", [(0, 1, 1, math.exp(-1)), (2, 3, 2, 10.0), (700, 2, 700, 701.0)])
def test_exp_mul_upper_gamma_examples(a, j, x, expected):
    assert specfun.exp_mul_upper_gamma(a, j, x) == pytest.approx(expected, rel=1e-13)


# -- domain checks ------------------------------------------------------------

@pytest.mark.parametrize("call", [
    lambda: specfun.reg_lower_gamma(0, 1),
    lambda: specfun.reg_lower_gamma(1, -1),
    lambda: specfun.reg_upper_gamma(-2, 1),
    lambda: specfun.reg_lower_gamma(math.nan, 1),
    lambda: specfun.upper_gamma_int(0, 1),
    lambda: specfun.upper_gamma_int(2.5, 1),
    lambda: specfun.e1(0.0),
    lambda: specfun.e1(-1.0),
    lambda: specfun.e1(math.nan),
    lambda: specfun.exp_mul_e1(1.0, 0.0),
    lambda: specfun.exp_mul_e1(math.nan, 1.0),
    lambda: specfun.exp_mul_upper_gamma(0, 0, 1),
    lambda: specfun.exp_mul_upper_gamma(0, 1, -1),
    lambda: specfun.lower_gamma_diff(1.5, 2.0, 1.0),
])
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


def test_limits():
    assert specfun.reg_lower_gamma(2.5, math.inf) == 1.0
    assert specfun.reg_upper_gamma(2.5, 0.0) == 1.0
    assert specfun.e1_scaled(math.inf) == 0.0


# -- invariants ---------------------------------------------------------------

@given(k=st.integers(1, 30), x=st.floats(0, 200))
def test_integer_order_series_identity(k, x):
    # right-hand side in extended precision; the subtraction cancels about log10(k!/x^k) digits
    digits = 40 + int(math.lgamma(k + 1) / math.log(10) + k * max(0.0, -math.log10(x))) if x > 0 else 40
    with mpmath.workdps(digits):
        xm = mpmath.mpf(x)
        expected = float(1 - mpmath.exp(-xm) * mpmath.fsum(xm**n / mpmath.factorial(n) for n in range(k)))
    got = specfun.reg_lower_gamma(k, x)
    assert got == pytest.approx(expected, rel=1e-12, abs=1e-300)


@given(k=st.integers(1, 20), x=st.floats(0, 100))
def test_complementarity(k, x):
    lower = specfun.reg_lower_gamma(k, x) * math.gamma(k)
    upper = specfun.upper_gamma_int(k, x)
    assert lower + upper == pytest.approx(math.gamma(k), rel=1e-12)


@given(j=st.integers(1, 10), x=st.floats(0, 100))
def test_upper_gamma_recurrence(j, x):
    lhs = specfun.upper_gamma_int(j + 1, x)
    rhs = j * specfun.upper_gamma_int(j, x) + x**j * math.exp(-x)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


@given(x=st.floats(1e-8, 700))
def test_e1_bounds(x):
    value = specfun.e1(x)
    assert 0.5 * math.exp(-x) * math.log1p(2 / x) < value < math.exp(-x) * math.log1p(1 / x)


@settings(max_examples=300)
@given(x=st.floats(1e-8, 700))
def test_e1_relative_accuracy(x):
    assert specfun.e1(x) == pytest.approx(mp_e1(x), rel=1e-12)


@given(a=st.floats(-300, 300), x=st.floats(1e-6, 600))
def test_scaling_consistency(a, x):
    direct = math.exp(a) * specfun.e1(x)
    if direct == 0 or not math.isfinite(direct) or direct < 1e-290:
        return
    assert specfun.exp_mul_e1(a, x) == pytest.approx(direct, rel=1e-10)


@given(a=st.floats(0, 700), j=st.integers(1, 12), x=st.floats(0, 700))
def test_exp_mul_upper_gamma_against_mpmath(a, j, x):
    expected = mpmath.exp(a) * mpmath.gammainc(j, x)
    got = specfun.exp_mul_upper_gamma(a, j, x)
    if expected > 1e300:
        return
    assert got == pytest.approx(float(expected), rel=1e-11, abs=1e-300)


@given(k=st.floats(0.05, 60), x=st.floats(0, 300))
def test_regularized_pair_against_scipy(k, x):
    assert specfun.reg_lower_gamma(k, x) == pytest.approx(special.gammainc(k, x), rel=1e-10, abs=1e-300)
    assert specfun.reg_upper_gamma(k, x) == pytest.approx(special.gammaincc(k, x), rel=1e-10, abs=1e-300)


@given(k=st.floats(0.1, 20), x=st.floats(0, 50), dx=st.floats(0, 50))
def test_lower_gamma_monotone(k, x, dx):
    assert specfun.reg_lower_gamma(k, x + dx) >= specfun.reg_lower_gamma(k, x)


@given(s=st.floats(0.5, 10), x1=st.floats(0, 400), dx=st.floats(0, 400))
def test_lower_gamma_diff(s, x1, dx):
    x2 = x1 + dx
    expected = mpmath.gammainc(s, x1, x2)
    # a difference of close values is only accurate relative to the operands
    floor = 1e-14 * float(mpmath.gammainc(s, 0, x2))
    assert specfun.lower_gamma_diff(s, x1, x2) == pytest.approx(float(expected), rel=1e-10, abs=floor)


@given(x=st.floats(1e-6, 50), dx=st.floats(1e-3, 50))
def test_e1_decreasing(x, dx):
    assert specfun.e1(x + dx) < specfun.e1(x)
