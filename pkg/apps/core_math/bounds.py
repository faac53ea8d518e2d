"""
Uniform stability bounds of the four algorithms.

All four share the shape 2 L sqrt(k T / n) * sum(eta_t); clipped SGD carries
an extra factor gamma and NSGD-B uses k = B. NSGD-CM's bound has no gamma.
"""
import math

import numpy as np

from .errors import InvalidArgument
from .params import Algorithm, parse_algorithm


def _argument_factor(algorithm, schedule, n, step_sizes):
    algorithm = parse_algorithm(algorithm)
    schedule.validate_for(algorithm)
    if isinstance(n, bool) or n < 1:
        raise InvalidArgument(f'n must be >= 1, got {n!r}')
    if step_sizes is None:
        total_step = float(schedule.T) * float(schedule.eta)
    else:
        etas = np.asarray(step_sizes, dtype=np.float64)
        if etas.shape != (schedule.T,) or np.any(etas < 0) or not np.all(np.isfinite(etas)):
            raise InvalidArgument(f'step_sizes must be {schedule.T} finite non-negative values')
        total_step = float(etas.sum())

    draws = schedule.T * (schedule.B if algorithm == Algorithm.NSGD_B else 1)
    factor = 2.0 * math.sqrt(draws / n) * total_step
    if algorithm == Algorithm.CLIPPED_SGD:
        factor *= schedule.gamma
    return factor


def argument_stability_bound(algorithm, schedule, n, step_sizes=None):
    """Bound on sqrt(E||A(S) - A(S')||^2) from the coupling argument."""
    return _argument_factor(algorithm, schedule, n, step_sizes)


def stability_bound(algorithm, schedule, L, n, step_sizes=None):
    if not L > 0:
        raise InvalidArgument(f'L must be > 0, got {L!r}')
    return L * _argument_factor(algorithm, schedule, n, step_sizes)
