"""
Side-by-side rate comparison of algorithms on one problem and n grid.

Fitted slopes come with a t-interval; the predicted exponents are listed
next to them as a reference ordering only.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

from scipy import stats

from apps.core_math.errors import InvalidArgument
from apps.core_math.params import Algorithm
from apps.core_math.schedules import predicted_rate_exponent

from .rates import fit_rate
from .sweeps import cell_specs, resolve_sigma, run_cells

logger = logging.getLogger(__name__)

DEFAULT_METRIC = 'population_grad_norm'

RATE_CAVEAT = (
    'predicted exponents are asymptotic upper-bound orders, not exact laws; '
    'fitted slopes at desk-scale n are not expected to match them, and the '
    'reference ordering is not a measured ranking'
)


@dataclass(frozen=True)
class ComparisonRow:
    algorithm: Algorithm
    predicted_exponent: float
    predicted_rank: int
    fitted_slope: Optional[float]
    slope_stderr: Optional[float]
    slope_ci: Optional[tuple]
    mean_metric: Optional[float]
    cells: int

    def as_dict(self):
        return {
            'algorithm': self.algorithm.value,
            'predicted_exponent': self.predicted_exponent,
            'predicted_rank': self.predicted_rank,
            'fitted_slope': self.fitted_slope,
            'slope_stderr': self.slope_stderr,
            'slope_ci': None if self.slope_ci is None else list(self.slope_ci),
            'mean_metric': self.mean_metric,
            'cells': self.cells,
        }


@dataclass(frozen=True)
class ComparisonTable:
    metric: str
    p: float
    rows: tuple
    caveat: str = RATE_CAVEAT

    def row(self, algorithm):
        algorithm = Algorithm(algorithm)
        for row in self.rows:
            if row.algorithm == algorithm:
                return row
        raise KeyError(algorithm.value)

    def as_dict(self):
        return {
            'metric': self.metric,
            'p': self.p,
            'caveat': self.caveat,
            'rows': [row.as_dict() for row in self.rows],
        }


def predicted_ranks(algorithms, p):
    """Dense ranks by predicted exponent, 1 = fastest decay. Equal exponents share a rank."""
    exponents = {a: predicted_rate_exponent(a, p) for a in algorithms}
    distinct = sorted({round(e, 12) for e in exponents.values()})
    return {a: distinct.index(round(e, 12)) + 1 for a, e in exponents.items()}


def _slope_interval(fit, count):
    if count <= 2:
        return None
    half = stats.t.ppf(0.975, count - 2) * fit.slope_stderr
    return (fit.slope - half, fit.slope + half)


def compare_rows(rows, algorithms, p, metric=DEFAULT_METRIC):
    """Build the table from sweep rows (dicts with algorithm, n, status and metric columns)."""
    algorithms = [Algorithm(a) for a in algorithms]
    if len(algorithms) < 2:
        raise InvalidArgument('a comparison needs at least two algorithms')
    ranks = predicted_ranks(algorithms, p)
    table_rows = []
    for algorithm in algorithms:
        usable = [
            (row['n'], row[metric]) for row in rows
            if row['algorithm'] == algorithm.value and row['status'] == 'ok'
            and row.get(metric) is not None and row[metric] > 0
        ]
        fit = interval = None
        if len(usable) >= 2:
            fit = fit_rate(usable, predicted_rate_exponent(algorithm, p))
            interval = _slope_interval(fit, len(usable))
        else:
            logger.warning('compare_rows: algorithm=%s has %d usable cells, no slope fitted',
                           algorithm.value, len(usable))
        table_rows.append(ComparisonRow(
            algorithm=algorithm,
            predicted_exponent=predicted_rate_exponent(algorithm, p),
            predicted_rank=ranks[algorithm],
            fitted_slope=None if fit is None else fit.slope,
            slope_stderr=None if fit is None else fit.slope_stderr,
            slope_ci=interval,
            mean_metric=math.fsum(m for _, m in usable) / len(usable) if usable else None,
            cells=len(usable),
        ))
    return ComparisonTable(metric=metric, p=float(p), rows=tuple(table_rows))


def compare_algorithms(config, rows=None, parallelism=1, metric=DEFAULT_METRIC):
    """Ranking table for a config's algorithms. Runs the sweep unless its rows are passed in."""
    if len(config.algorithms) < 2:
        raise InvalidArgument('a comparison needs at least two algorithms')
    if rows is None:
        specs = cell_specs(config, resolve_sigma(config))
        rows = [cell['row'] for cell in run_cells(specs, parallelism)]
    return compare_rows(rows, config.algorithms, config.p, metric)
