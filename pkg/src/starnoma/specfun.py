"""Special functions for the ergodic-rate closed forms.

Incomplete gamma functions, the exponential integral E1 and the
overflow-safe products ``exp(a) * E1(x)`` and ``exp(a) * Gamma(j, x)``.
All functions take and return Python floats.

E1 uses the usual two-regime scheme: power series below 1 and a modified
Lentz continued fraction above.  The incomplete gamma functions follow the
same split at ``x = k + 1``.
"""
import math

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286060651209

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _check(name, value):
    if math.isnan(value):
        raise DomainError(f"{name} is NaN")


def _gamma_series(k, x):
    # sum_{n>=0} x^n / (k (k+1) ... (k+n)), scaled by x^k e^-x / Gamma(k)
    ap = k
    term = total = 1.0 / k
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError(f"incomplete gamma series did not converge (k={k}, x={x})")
    return total * math.exp(-x + k * math.log(x) - math.lgamma(k))


def _gamma_cfrac(k, x):
    # Q(k, x) via modified Lentz evaluation of the Legendre continued fraction
    b = x + 1.0 - k
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - k)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"incomplete gamma fraction did not converge (k={k}, x={x})")
    return h * math.exp(-x + k * math.log(x) - math.lgamma(k))


def _check_gamma_args(k, x):
    _check("k", k)
    _check("x", x)
    if k <= 0:
        raise DomainError(f"shape must be positive, got k={k}")
    if x < 0:
        raise DomainError(f"argument must be nonnegative, got x={x}")


def reg_lower_gamma(k, x):
    """Regularized lower incomplete gamma P(k, x) = gamma(k, x) / Gamma(k)."""
    k, x = float(k), float(x)
    _check_gamma_args(k, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < k + 1.0:
        return min(1.0, _gamma_series(k, x))
    return 1.0 - _gamma_cfrac(k, x)


def reg_upper_gamma(k, x):
    """Regularized upper incomplete gamma Q(k, x) = 1 - P(k, x), without cancellation for large x."""
    k, x = float(k), float(x)
    _check_gamma_args(k, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < k + 1.0:
        return 1.0 - min(1.0, _gamma_series(k, x))
    return _gamma_cfrac(k, x)


def lower_gamma(s, x):
    """Unregularized lower incomplete gamma gamma(s, x) for real s > 0."""
    return reg_lower_gamma(s, x) * math.gamma(s)


def lower_gamma_diff(s, x1, x2):
    """gamma(s, x2) - gamma(s, x1) for 0 <= x1 <= x2.

    When both points sit in the tail the difference is taken between the
    upper functions, so nothing cancels against Gamma(s).
    """
    if x2 < x1:
        raise DomainError(f"need x1 <= x2, got x1={x1}, x2={x2}")
    if x1 > s + 1.0:
        return (reg_upper_gamma(s, x1) - reg_upper_gamma(s, x2)) * math.gamma(s)
    return (reg_lower_gamma(s, x2) - reg_lower_gamma(s, x1)) * math.gamma(s)


def upper_gamma_int(j, x):
    """Upper incomplete gamma Gamma(j, x) for integer order j >= 1 (finite series)."""
    return exp_mul_upper_gamma(0.0, j, x)


def exp_mul_upper_gamma(a, j, x):
    """Return ``exp(a) * Gamma(j, x)`` for integer j >= 1.

    Uses Gamma(j, x) = (j-1)! e^{-x} sum_{i<j} x^i / i!, so the exponentials
    combine as e^{a-x} before anything is evaluated.
    """
    a, x = float(a), float(x)
    _check("a", a)
    _check("x", x)
    if isinstance(j, float):
        if not j.is_integer():
            raise DomainError(f"order must be an integer, got j={j}")
        j = int(j)
    if j < 1:
        raise DomainError(f"order must be >= 1, got j={j}")
    if x < 0:
        raise DomainError(f"argument must be nonnegative, got x={x}")
    if x <= 1.0:
        term = total = 1.0
        for i in range(1, j):
            term *= x / i
            total += term
        return math.factorial(j - 1) * math.exp(a - x) * total
    # log-sum-exp over the series terms keeps huge x^i away from a vanishing e^{a-x}
    logs = [i * math.log(x) - math.lgamma(i + 1) for i in range(j)]
    top = max(logs)
    log_sum = top + math.log(math.fsum(math.exp(v - top) for v in logs))
    return math.exp(math.lgamma(j) + a - x + log_sum)


def e1_scaled(x):
    """Return ``exp(x) * E1(x)`` for x > 0."""
    x = float(x)
    _check("x", x)
    if x <= 0:
        raise DomainError(f"E1 requires x > 0, got x={x}")
    if x < 1.0:
        return math.exp(x) * _e1_series(x)
    if math.isinf(x):
        return 0.0
    b = x + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x}")


def _e1_series(x):
    total = 0.0
    term = 1.0
    for n in range(1, _MAX_ITER):
        term *= -x / n
        contrib = term / n
        total += contrib
        if abs(contrib) < _EPS * abs(total):
            break
    return -EULER_GAMMA - math.log(x) - total


def e1(x):
    """Exponential integral E1(x) = -Ei(-x) = int_x^inf e^{-t}/t dt, x > 0."""
    x = float(x)
    _check("x", x)
    if x <= 0:
        raise DomainError(f"E1 requires x > 0, got x={x}")
    if x < 1.0:
        return _e1_series(x)
    return math.exp(-x) * e1_scaled(x)


def exp_mul_e1(a, x):
    """Return ``exp(a) * E1(x)`` without forming exp(a) on its own.

    Stays finite for large a as long as a - x is moderate.
    """
    a = float(a)
    _check("a", a)
    scaled = e1_scaled(x)
    return math.exp(a - float(x)) * scaled
