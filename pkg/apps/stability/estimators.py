"""
Bootstrap summaries of Monte Carlo replicates.

Heavy tails make normal-theory errors unreliable, so every estimate carries
a bootstrap standard error and a percentile interval.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from apps.core_math.errors import InvalidArgument

DEFAULT_RESAMPLES = 1000
CONFIDENCE = 0.95


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    ci_low: float
    ci_high: float
    count: int

    def as_dict(self):
        return {
            'value': self.value,
            'stderr': self.stderr,
            'ci': [self.ci_low, self.ci_high],
            'count': self.count,
        }


def mean_statistic(values, axis=-1):
    return np.mean(values, axis=axis)


def root_mean_statistic(values, axis=-1):
    return np.sqrt(np.mean(values, axis=axis))


def bootstrap(values, statistic=mean_statistic, resamples=DEFAULT_RESAMPLES, seed=0):
    """
    Point estimate statistic(values) with bootstrap standard error and
    percentile interval. `statistic` must accept an `axis` keyword.
    """
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.size == 0:
        raise InvalidArgument('cannot summarize zero replicates')
    if not np.all(np.isfinite(values)):
        raise InvalidArgument('replicates must be finite')
    value = float(statistic(values, axis=-1))
    if values.size == 1 or np.all(values == values[0]):
        return Estimate(value, 0.0, value, value, int(values.size))
    result = stats.bootstrap(
        (values,),
        statistic,
        n_resamples=int(resamples),
        confidence_level=CONFIDENCE,
        method='percentile',
        vectorized=True,
        random_state=np.random.default_rng(seed),
    )
    low, high = result.confidence_interval
    stderr = float(result.standard_error)
    return Estimate(value, stderr if math.isfinite(stderr) else 0.0, float(low), float(high), int(values.size))


def combined_stderr(*stderrs):
    return math.sqrt(sum(s * s for s in stderrs))
