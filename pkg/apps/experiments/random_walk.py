"""
The logistic-pair counterexample: normalized SGD with batch size one on the
pair {+1, -1} moves by exactly +-eta every step, so x_t is a simple random
walk with Var(x_t) = eta^2 t and the empirical gradient never settles at 0.
"""
import logging
from dataclasses import dataclass

import numpy as np

from apps.core_math.errors import InvalidArgument
from apps.core_math.params import Algorithm, Schedule
from apps.noise.rng import SeededRng
from apps.optimizers.algorithms import run_nsgd_b
from apps.optimizers.config import OptimizerConfig
from apps.problems.families import make_logistic_pair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RandomWalkRow:
    t: int
    variance: float
    predicted: float
    mean_abs_gradient: float

    @property
    def ratio(self):
        return self.variance / self.predicted

    def as_dict(self):
        return {
            't': self.t,
            'variance': self.variance,
            'predicted': self.predicted,
            'ratio': self.ratio,
            'mean_abs_gradient': self.mean_abs_gradient,
        }


@dataclass(frozen=True)
class RandomWalkResult:
    eta: float
    horizon: int
    seeds: int
    rows: tuple

    def row(self, t):
        for row in self.rows:
            if row.t == t:
                return row
        raise KeyError(t)

    def as_dict(self):
        return {
            'eta': self.eta,
            'horizon': self.horizon,
            'seeds': self.seeds,
            'table': [row.as_dict() for row in self.rows],
        }


def random_walk_table(eta=0.1, horizon=400, seeds=1000, every=50, seed=0):
    """Var(x_t) over `seeds` independent walks from x_0 = 0, at every `every` steps and at t = horizon."""
    if seeds < 2:
        raise InvalidArgument(f'need at least two walks for a variance, got {seeds!r}')
    if every < 1:
        raise InvalidArgument(f'every must be >= 1, got {every!r}')
    problem = make_logistic_pair()
    schedule = Schedule(T=int(horizon), eta=float(eta), B=1)
    root = SeededRng(seed)
    steps = [t for t in range(every, horizon, every)] + [horizon]
    positions = np.empty((seeds, len(steps)))

    for k in range(seeds):
        walk_rng = root.spawn(f'walk:{k}')
        config = OptimizerConfig(Algorithm.NSGD_B, schedule, np.zeros(1), seed=walk_rng.seed,
                                 stream=walk_rng.stream, record_every=every)
        trajectory = run_nsgd_b(problem, config)
        positions[k, :-1] = [trajectory.iterate_at(t)[0] for t in steps[:-1]]
        positions[k, -1] = trajectory.final[0]

    gradients = np.abs(np.vectorize(lambda x: problem.empirical_grad([x])[0])(positions))
    rows = tuple(
        RandomWalkRow(
            t=t,
            variance=float(np.var(positions[:, j])),
            predicted=float(eta) ** 2 * t,
            mean_abs_gradient=float(np.mean(gradients[:, j])),
        )
        for j, t in enumerate(steps)
    )
    logger.info('random_walk_table: eta=%g horizon=%d seeds=%d var/predicted=%.4f',
                eta, horizon, seeds, rows[-1].ratio)
    return RandomWalkResult(eta=float(eta), horizon=int(horizon), seeds=int(seeds), rows=rows)
