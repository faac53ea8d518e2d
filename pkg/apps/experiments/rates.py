"""
Log-log rate fits: metric ~ C * n^slope.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from apps.core_math.errors import InvalidArgument

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    slope_stderr: float
    predicted_slope: float
    points: tuple

    def as_dict(self):
        return {
            'slope': self.slope,
            'intercept': self.intercept,
            'r_squared': self.r_squared,
            'slope_stderr': self.slope_stderr,
            'predicted_slope': self.predicted_slope,
            'points': [list(point) for point in self.points],
        }


def fit_rate(points, predicted):
    """
    Least-squares line through (log n, log metric). `points` are (n, metric)
    pairs; `predicted` is the reference exponent echoed back for comparison.
    """
    pairs = [(float(n), float(metric)) for n, metric in points]
    if len(pairs) < 2:
        raise InvalidArgument(f'a rate fit needs at least two points, got {len(pairs)}')
    ns = np.array([n for n, _ in pairs])
    metrics = np.array([m for _, m in pairs])
    if not np.all(np.isfinite(ns)) or np.any(ns <= 0):
        raise InvalidArgument('n values must be finite and > 0')
    if not np.all(np.isfinite(metrics)) or np.any(metrics <= 0):
        raise InvalidArgument('metric values must be finite and > 0 for a log-log fit')
    x, y = np.log(ns), np.log(metrics)
    if np.ptp(x) == 0:
        raise InvalidArgument('a rate fit needs at least two distinct n values')
    if len(pairs) == 2:
        logger.warning('fit_rate: only two points, slope has no error estimate')

    fit = stats.linregress(x, y)
    if np.ptp(y) == 0:
        # flat data lies exactly on its fitted line
        r_squared = 1.0
    else:
        r_squared = min(1.0, max(0.0, float(fit.rvalue) ** 2))
    stderr = float(fit.stderr)
    return RateFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=r_squared,
        slope_stderr=stderr if math.isfinite(stderr) else 0.0,
        predicted_slope=float(predicted),
        points=tuple((float(a), float(b)) for a, b in zip(x, y)),
    )
