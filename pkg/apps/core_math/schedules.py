"""
Parameter schedules behind the convergence rates.

Every field is scale * n^exponent. The rates fix only the exponents;
`scale` stands in for the hidden constant. Integral fields (T, B) are
rounded up with a floor of 1; beta is 1 - scale * n^exponent clamped to
[0, 1). Those rounding rules are ours, not part of the rates.
"""
import math

from .errors import InvalidArgument
from .params import Algorithm, Schedule, check_tail_exponent, parse_algorithm

# Powers that land within this relative distance of an integer are snapped to
# it before rounding up, so 1000^(1/3) = 9.999999999999998 gives T = 10.
_SNAP = 1e-9


def schedule_exponents(algorithm, p):
    """Exponents of n for each schedule field; 'one_minus_beta' for momentum."""
    algorithm = parse_algorithm(algorithm)
    p = check_tail_exponent(p)
    if algorithm == Algorithm.CLIPPED_SGD:
        return {
            'T': 1.0 / 3.0,
            'eta': -p / (3.0 * (3.0 * p - 2.0)),
            'gamma': 1.0 / (3.0 * (3.0 * p - 2.0)),
        }
    denom = 7.0 * p - 6.0
    if algorithm == Algorithm.NSGD_B:
        return {
            'T': 2.0 * (p - 1.0) / denom,
            'eta': -(p - 1.0) / denom,
            'B': p / denom,
        }
    exponents = {
        'T': (3.0 * p - 2.0) / denom,
        'eta': -(2.0 * p - 1.0) / denom,
        'one_minus_beta': -p / denom,
    }
    if algorithm == Algorithm.NSGD_CM:
        exponents['gamma'] = 1.0 / denom
    return exponents


def _ceil_at_least_one(value):
    nearest = round(value)
    if abs(value - nearest) <= _SNAP * max(1.0, abs(value)):
        value = nearest
    return max(1, int(math.ceil(value)))


def schedule_for(algorithm, n, p, scale=1.0):
    algorithm = parse_algorithm(algorithm)
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidArgument(f'n must be an integer >= 2, got {n!r}')
    if not (math.isfinite(scale) and scale > 0):
        raise InvalidArgument(f'scale must be finite and > 0, got {scale!r}')
    exponents = schedule_exponents(algorithm, p)
    n = int(n)

    fields = {
        'T': _ceil_at_least_one(scale * n ** exponents['T']),
        'eta': scale * n ** exponents['eta'],
    }
    if 'gamma' in exponents:
        fields['gamma'] = scale * n ** exponents['gamma']
    if 'B' in exponents:
        fields['B'] = _ceil_at_least_one(scale * n ** exponents['B'])
    if 'one_minus_beta' in exponents:
        beta = 1.0 - scale * n ** exponents['one_minus_beta']
        fields['beta'] = min(max(0.0, beta), math.nextafter(1.0, 0.0))
    return Schedule(**fields).validate_for(algorithm)


def predicted_rate_exponent(algorithm, p):
    """Exponent of n in the population-gradient rate (always negative)."""
    algorithm = parse_algorithm(algorithm)
    p = check_tail_exponent(p)
    if algorithm == Algorithm.CLIPPED_SGD:
        return -(p - 1.0) / (3.0 * (3.0 * p - 2.0))
    return -(p - 1.0) / (7.0 * p - 6.0)
