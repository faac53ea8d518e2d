"""
Empirical moment estimators for the bounded p-th centered moment condition.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from apps.core_math.errors import InvalidArgument
from apps.core_math.params import check_tail_exponent

from .samplers import sample_many

logger = logging.getLogger(__name__)


def _as_sample_matrix(samples):
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, 1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise InvalidArgument('need at least one sample')
    return arr


def absolute_moment(norms, q):
    """Mean of norms^q."""
    return float(np.mean(np.asarray(norms, dtype=np.float64) ** q))


def estimate_p_moment(samples, center=None, p=2.0):
    """sigma_hat_p = (mean ||s - center||^p)^(1/p)."""
    p = check_tail_exponent(p)
    arr = _as_sample_matrix(samples)
    if center is not None:
        center = np.asarray(center, dtype=np.float64).reshape(-1)
        if center.size not in (1, arr.shape[1]):
            raise InvalidArgument(
                f'center has dimension {center.size}, samples have dimension {arr.shape[1]}'
            )
        arr = arr - center
    norms = np.linalg.norm(arr, axis=1)
    return absolute_moment(norms, p) ** (1.0 / p)


@dataclass
class PBcmReport:
    p: float
    draws: int
    per_point: list = field(default_factory=list)

    @property
    def max_sigma(self):
        return max(self.per_point) if self.per_point else 0.0

    def as_dict(self):
        return {
            'p': self.p,
            'draws': self.draws,
            'per_point': list(self.per_point),
            'max_sigma': self.max_sigma,
        }


def verify_p_bcm(problem, points, p, draws, rng):
    """
    For each probe point x, estimate sigma_hat_p of grad f(x; xi) - grad F(x)
    over `draws` fresh samples xi from the problem's data law.
    """
    p = check_tail_exponent(p)
    if isinstance(draws, bool) or int(draws) != draws or draws < 100:
        raise InvalidArgument(f'draws must be an integer >= 100, got {draws!r}')
    points = [np.asarray(x, dtype=np.float64) for x in points]
    if not points:
        raise InvalidArgument('need at least one probe point')

    report = PBcmReport(p=p, draws=int(draws))
    for x in points:
        rows = problem.draw_samples(rng, int(draws))
        grads = problem.sample_grads(x, rows)
        center = problem.population_grad(x)
        report.per_point.append(estimate_p_moment(grads, center, p))
    logger.debug('verify_p_bcm: points=%d p=%.3f max_sigma=%.6g', len(points), p, report.max_sigma)
    return report


def martingale_moment_ratio(spec, k, q, trials, rng):
    """
    Monte Carlo ratio E||X_1 + ... + X_k||^q / sum_i E||X_i||^q for i.i.d.
    centered draws. Both sides use the same draws, so one huge sample inflates
    numerator and denominator together.
    """
    if not 1.0 <= q <= 2.0:
        raise InvalidArgument(f'q must lie in [1, 2], got {q!r}')
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InvalidArgument(f'k must be an integer >= 1, got {k!r}')
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise InvalidArgument(f'trials must be an integer >= 1, got {trials!r}')
    draws = sample_many(spec, rng, int(trials) * int(k)).reshape(int(trials), int(k), spec.dim)
    numerator = np.mean(np.linalg.norm(draws.sum(axis=1), axis=1) ** q)
    denominator = np.mean(np.sum(np.linalg.norm(draws, axis=2) ** q, axis=1))
    if denominator == 0.0:
        return 0.0
    return float(numerator / denominator)
