"""
Synthetic smooth finite-sum objectives.

Each family exposes exact component gradients, a population gradient and a
smoothness constant L valid for every component in its dataset:

  logistic_pair      rows s in {+1, -1}; f(x; s) = log(1 + e^(s x)), L = 1/4.
                     The data law is the uniform two-point law, so the
                     population gradient is (sigmoid(x) - sigmoid(-x)) / 2.
  robust_regression  rows (a, b); f(x; (a, b)) = rho(<a, x> - b),
                     rho(r) = r^2 / (1 + r^2), sup |rho''| = 2.
                     Features lie on the unit sphere, so L = 2 holds for the
                     whole data law; rows loaded with longer features raise it
                     to 2 max ||a_i||^2. The population gradient comes from a
                     stored holdout.
  quad_plus_sine     rows xi; f(x; xi) = 0.5 ||x - xi||^2 + c sum_j sin(x_j),
                     L = 1 + |c|, grad F(x) = x - E[xi] + c cos(x).
"""
import logging
import math
from typing import NamedTuple

import numpy as np
from django.db import models
from scipy import special

from apps.core_math.clipping import as_vector
from apps.core_math.errors import InvalidArgument, NotAvailable
from apps.noise.samplers import moment_exists, sample_many

from .datasets import Dataset

logger = logging.getLogger(__name__)

DEFAULT_HOLDOUT_SIZE = 100_000
# robust_regression features are drawn uniformly on the sphere of this radius
FEATURE_NORM = 1.0


class ProblemFamily(models.TextChoices):
    LOGISTIC_PAIR = 'logistic_pair', 'Two-component logistic pair'
    ROBUST_REGRESSION = 'robust_regression', 'Robust regression'
    QUAD_PLUS_SINE = 'quad_plus_sine', 'Quadratic plus sine'


class GradientSample(NamedTuple):
    value: np.ndarray
    component_index: int


class ProblemInstance:
    """
    Base class. Subclasses implement the vectorized row kernels
    `_values(x, rows)` and `_grads(x, rows)` and the data law `draw_samples`.
    Instances are immutable after construction.
    """
    family = None

    def __init__(self, dataset, dim, L):
        if dataset.family != self.family:
            raise InvalidArgument(f'dataset family {dataset.family!r} does not match {self.family!r}')
        if not L > 0:
            raise InvalidArgument(f'smoothness constant must be > 0, got {L!r}')
        self.dataset = dataset
        self.dim = int(dim)
        self.L = float(L)

    def __repr__(self):
        return f'{type(self).__name__}(n={self.n}, dim={self.dim}, L={self.L:.6g})'

    @property
    def n(self):
        return self.dataset.n

    def _point(self, x):
        x = as_vector(x, name='x')
        if x.size != self.dim:
            raise InvalidArgument(f'x has dimension {x.size}, problem has dimension {self.dim}')
        return x

    def _check_index(self, i):
        if isinstance(i, bool) or int(i) != i or not (0 <= i < self.n):
            raise InvalidArgument(f'component index {i!r} out of range [0, {self.n})')
        return int(i)

    # Component-level oracles

    def component_value(self, x, i):
        i = self._check_index(i)
        return float(self._values(self._point(x), self.dataset.rows[i:i + 1])[0])

    def component_grad(self, x, i):
        i = self._check_index(i)
        return self._grads(self._point(x), self.dataset.rows[i:i + 1])[0]

    def component_grads(self, x, indices):
        """Gradients for a batch of component indices, shape (len(indices), dim)."""
        return self._grads(x, self.dataset.rows[indices])

    def gradient_sample(self, x, i):
        return GradientSample(self.component_grad(x, i), self._check_index(i))

    def sample_grads(self, x, rows):
        """Gradients at x for arbitrary sample rows (fresh draws, probes)."""
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != self.dataset.width:
            raise InvalidArgument(f'rows must have shape (k, {self.dataset.width}), got {rows.shape}')
        return self._grads(self._point(x), rows)

    # Empirical and population objectives

    def empirical_value(self, x):
        return float(np.mean(self._values(self._point(x), self.dataset.rows)))

    def empirical_grad(self, x):
        return self._grads(self._point(x), self.dataset.rows).mean(axis=0)

    def population_grad(self, x):
        return self.population_grad_with_error(x)[0]

    def population_grad_with_error(self, x):
        """(grad F(x), Monte Carlo standard error). The error is 0 for analytic families."""
        raise NotAvailable(f'{self.family} has no population gradient')

    def draw_samples(self, rng, size):
        raise NotImplementedError

    def with_dataset(self, dataset):
        """Same data law, different training set."""
        raise NotImplementedError

    def params(self):
        return {}

    def as_dict(self):
        return {
            'family': self.family,
            'n': self.n,
            'dim': self.dim,
            'L': self.L,
            'dataset_hash': f'{self.dataset.content_hash:#018x}',
            **self.params(),
        }


class LogisticPair(ProblemInstance):
    family = ProblemFamily.LOGISTIC_PAIR

    def __init__(self, dataset=None):
        if dataset is None:
            dataset = Dataset(self.family, [[1.0], [-1.0]])
        if dataset.width != 1 or not np.all(np.abs(dataset.rows) == 1.0):
            raise InvalidArgument('logistic pair rows must be +1 or -1')
        super().__init__(dataset, dim=1, L=0.25)

    def _values(self, x, rows):
        return np.logaddexp(0.0, rows[:, 0] * x[0])

    def _grads(self, x, rows):
        s = rows[:, 0]
        return (s * special.expit(s * x[0]))[:, None]

    def curvature(self, x):
        """F_S''(x) for the symmetric pair: sigmoid(x) * sigmoid(-x)."""
        x = float(x)
        return float(special.expit(x) * special.expit(-x))

    def population_grad_with_error(self, x):
        x = self._point(x)
        return np.array([(special.expit(x[0]) - special.expit(-x[0])) / 2.0]), 0.0

    def draw_samples(self, rng, size):
        return rng.rademacher(size=(int(size), 1))

    def with_dataset(self, dataset):
        return LogisticPair(dataset)


class RobustRegression(ProblemInstance):
    family = ProblemFamily.ROBUST_REGRESSION

    def __init__(self, dataset, x_true, noise, holdout):
        d = dataset.width - 1
        if d < 1:
            raise InvalidArgument('robust regression rows need at least one feature')
        a = dataset.rows[:, :d]
        L = 2.0 * max(FEATURE_NORM ** 2, float(np.max(np.sum(a * a, axis=1))))
        super().__init__(dataset, dim=d, L=L)
        self.x_true = np.array(x_true, dtype=np.float64)
        self.noise = noise
        self.holdout = holdout
        self.x_true.setflags(write=False)

    @staticmethod
    def residuals(x, rows):
        d = rows.shape[1] - 1
        return rows[:, :d] @ x - rows[:, d]

    def _values(self, x, rows):
        r = self.residuals(x, rows)
        r2 = r * r
        return r2 / (1.0 + r2)

    def _grads(self, x, rows):
        r = self.residuals(x, rows)
        slope = 2.0 * r / (1.0 + r * r) ** 2
        return slope[:, None] * rows[:, :-1]

    def draw_samples(self, rng, size):
        size = int(size)
        a = rng.standard_normal(size=(size, self.dim))
        norms = np.linalg.norm(a, axis=1, keepdims=True)
        a = FEATURE_NORM * a / np.where(norms > 0.0, norms, 1.0)
        b = a @ self.x_true
        if self.noise is not None:
            b = b + sample_many(self.noise, rng, size)[:, 0]
        return np.column_stack([a, b])

    def holdout_grad(self, x, size=None):
        """Holdout mean gradient over the first `size` rows and its standard error."""
        if self.holdout is None:
            raise NotAvailable('robust regression was built without a holdout sample')
        rows = self.holdout if size is None else self.holdout[:int(size)]
        if rows.shape[0] < 2:
            raise InvalidArgument('holdout estimate needs at least two rows')
        grads = self._grads(self._point(x), rows)
        stderr = np.std(grads, axis=0, ddof=1) / math.sqrt(rows.shape[0])
        return grads.mean(axis=0), float(np.linalg.norm(stderr))

    def population_grad_with_error(self, x):
        return self.holdout_grad(x)

    def with_dataset(self, dataset):
        return RobustRegression(dataset, self.x_true, self.noise, self.holdout)

    def params(self):
        return {
            'noise': None if self.noise is None else self.noise.as_dict(),
            'holdout_size': 0 if self.holdout is None else int(self.holdout.shape[0]),
        }


class QuadPlusSine(ProblemInstance):
    family = ProblemFamily.QUAD_PLUS_SINE

    def __init__(self, dataset, c, center, noise):
        if not math.isfinite(c):
            raise InvalidArgument(f'c must be finite, got {c!r}')
        super().__init__(dataset, dim=dataset.width, L=1.0 + abs(c))
        self.c = float(c)
        self.center = np.array(center, dtype=np.float64)
        self.center.setflags(write=False)
        self.noise = noise

    def _values(self, x, rows):
        diff = x[None, :] - rows
        return 0.5 * np.sum(diff * diff, axis=1) + self.c * np.sum(np.sin(x))

    def _grads(self, x, rows):
        return (x[None, :] - rows) + self.c * np.cos(x)[None, :]

    def population_grad_with_error(self, x):
        if self.noise is not None and not moment_exists(self.noise, 1.0):
            raise NotAvailable(f'{self.noise.family.value} noise with index {self.noise.tail_index} has no mean')
        x = self._point(x)
        return self._grads(x, self.center[None, :])[0], 0.0

    def draw_samples(self, rng, size):
        size = int(size)
        rows = np.broadcast_to(self.center, (size, self.dim))
        if self.noise is None:
            return rows.copy()
        return rows + sample_many(self.noise, rng, size)

    def with_dataset(self, dataset):
        return QuadPlusSine(dataset, self.c, self.center, self.noise)

    def params(self):
        return {
            'c': self.c,
            'noise': None if self.noise is None else self.noise.as_dict(),
        }


def _check_size(n, d):
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidArgument(f'n must be an integer >= 2, got {n!r}')
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InvalidArgument(f'd must be an integer >= 1, got {d!r}')
    return int(n), int(d)


def make_logistic_pair():
    return LogisticPair()


def make_robust_regression(n, d, noise, rng, x_true=None, holdout_size=DEFAULT_HOLDOUT_SIZE):
    """
    a_i uniform on the unit sphere, b_i = <a_i, x_true> + noise. `noise=None` gives exact labels.
    The holdout used for population gradients is drawn from its own sub-stream.
    """
    n, d = _check_size(n, d)
    if noise is not None:
        noise = noise.with_dim(1)
    if x_true is None:
        x_true = rng.spawn('x_true').standard_normal(size=d)
    x_true = as_vector(x_true, name='x_true')
    if x_true.size != d:
        raise InvalidArgument(f'x_true has dimension {x_true.size}, expected {d}')
    empty = RobustRegression(Dataset(ProblemFamily.ROBUST_REGRESSION, np.zeros((1, d + 1))), x_true, noise, None)
    holdout = None
    if holdout_size:
        holdout = empty.draw_samples(rng.spawn('holdout'), holdout_size)
        holdout.setflags(write=False)
    rows = empty.draw_samples(rng.spawn('train'), n)
    problem = RobustRegression(Dataset(ProblemFamily.ROBUST_REGRESSION, rows), x_true, noise, holdout)
    logger.debug('make_robust_regression: n=%d d=%d L=%.6g', n, d, problem.L)
    return problem


def make_quad_plus_sine(n, d, noise, rng, c=0.5, center=None):
    """xi_i = center + noise. `noise=None` puts every sample at `center`."""
    n, d = _check_size(n, d)
    if noise is not None:
        noise = noise.with_dim(d)
    center = np.zeros(d) if center is None else as_vector(center, name='center')
    if center.size != d:
        raise InvalidArgument(f'center has dimension {center.size}, expected {d}')
    template = QuadPlusSine(Dataset(ProblemFamily.QUAD_PLUS_SINE, center[None, :]), c, center, noise)
    return template.with_dataset(Dataset(ProblemFamily.QUAD_PLUS_SINE, template.draw_samples(rng.spawn('train'), n)))


def component_grad(problem, x, i):
    return problem.component_grad(x, i)


def empirical_grad(problem, x):
    return problem.empirical_grad(x)


def population_grad(problem, x):
    return problem.population_grad(x)


def population_grad_with_error(problem, x):
    return problem.population_grad_with_error(x)


def estimate_smoothness(problem, pairs, rng, spread=3.0):
    """
    Largest sampled ratio ||grad f(x; xi_i) - grad f(y; xi_i)|| / ||x - y||
    over `pairs` random (x, y, i). Points are N(0, spread^2 I); half of the
    pairs are close neighbours so curvature peaks are probed too.
    """
    if isinstance(pairs, bool) or int(pairs) != pairs or pairs < 1:
        raise InvalidArgument(f'pairs must be an integer >= 1, got {pairs!r}')
    pairs = int(pairs)
    xs = spread * rng.standard_normal(size=(pairs, problem.dim))
    offsets = rng.standard_normal(size=(pairs, problem.dim))
    offsets[: pairs // 2] *= 1e-3
    ys = xs + offsets
    indices = rng.integers(0, problem.n, size=pairs)
    worst = 0.0
    for x, y, i in zip(xs, ys, indices):
        gap = np.linalg.norm(x - y)
        if gap == 0.0:
            continue
        ratio = np.linalg.norm(problem.component_grad(x, i) - problem.component_grad(y, i)) / gap
        worst = max(worst, float(ratio))
    return worst
