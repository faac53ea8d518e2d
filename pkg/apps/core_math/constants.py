"""
Closed-form constants of the heavy-tailed generalization bound.

    phi(tau) = sqrt(sigma^p / n) * tau^((2-p)/2) + 2 sigma^p tau^(1-p)

is minimized at tau_star, where it equals C_p * sigma * n^(-(p-1)/p).
At p = 2 the minimizer runs off to infinity; tau_star returns TAU_INFINITE
and phi(TAU_INFINITE) evaluates the limit sigma / sqrt(n).
"""
import math

from .errors import InvalidArgument
from .params import check_tail_exponent

TAU_INFINITE = math.inf


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgument(f'n must be an integer >= 1, got {n!r}')
    return int(n)


def c_p_constant(p):
    p = check_tail_exponent(p)
    if p == 2.0:
        return 1.0
    return p / (2.0 * (p - 1.0)) * (4.0 * (p - 1.0) / (2.0 - p)) ** ((2.0 - p) / p)


def tau_star(p, n, sigma_p):
    p = check_tail_exponent(p)
    n = _check_n(n)
    if not sigma_p > 0:
        raise InvalidArgument(f'sigma_p must be > 0, got {sigma_p!r}')
    if p == 2.0:
        return TAU_INFINITE
    ratio = 4.0 * (p - 1.0) / (2.0 - p)
    return (ratio * math.sqrt(n * sigma_p ** p)) ** (2.0 / p)


def phi(tau, p, n, sigma_p):
    p = check_tail_exponent(p)
    n = _check_n(n)
    if math.isnan(tau) or tau <= 0:
        raise InvalidArgument(f'tau must be > 0, got {tau!r}')
    if sigma_p < 0:
        raise InvalidArgument(f'sigma_p must be >= 0, got {sigma_p!r}')
    moment = sigma_p ** p
    # float powers of +inf give the tau -> infinity limit term by term
    return math.sqrt(moment / n) * tau ** ((2.0 - p) / 2.0) + 2.0 * moment * tau ** (1.0 - p)


def moment_term(tail, n):
    """C_p sigma_p n^(-(p-1)/p), the noise part of the generalization bound."""
    n = _check_n(n)
    return c_p_constant(tail.p) * tail.sigma_p * n ** (-(tail.p - 1.0) / tail.p)


def generalization_bound(epsilon, tail, n):
    if isinstance(n, bool) or n < 1:
        raise InvalidArgument(f'n must be >= 1, got {n!r}')
    if math.isnan(epsilon) or epsilon < 0:
        raise InvalidArgument(f'epsilon must be >= 0, got {epsilon!r}')
    return 4.0 * epsilon + moment_term(tail, n)
