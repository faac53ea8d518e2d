"""
Run configuration shared by the four optimizers.
"""
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from apps.core_math.clipping import as_vector
from apps.core_math.errors import InvalidArgument
from apps.core_math.params import Algorithm, Schedule, parse_algorithm
from apps.noise.rng import SeededRng


@dataclass(frozen=True, eq=False)
class OptimizerConfig:
    """
    `seed`/`stream` identify the run's random stream. Two runs with equal
    configs consume identical index and output streams, whatever the data.
    `step_sizes` overrides the constant schedule.eta with per-step values.
    """
    algorithm: Algorithm
    schedule: Schedule
    x0: np.ndarray
    seed: int = 0
    stream: int = 0
    record_every: int = 1
    step_sizes: Optional[np.ndarray] = None

    def __post_init__(self):
        algorithm = parse_algorithm(self.algorithm)
        object.__setattr__(self, 'algorithm', algorithm)
        self.schedule.validate_for(algorithm)
        x0 = as_vector(self.x0, name='x0')
        x0.setflags(write=False)
        object.__setattr__(self, 'x0', x0)
        if isinstance(self.record_every, bool) or int(self.record_every) != self.record_every or self.record_every < 1:
            raise InvalidArgument(f'record_every must be an integer >= 1, got {self.record_every!r}')
        if self.step_sizes is not None:
            etas = np.array(self.step_sizes, dtype=np.float64)
            if etas.shape != (self.schedule.T,) or not np.all(np.isfinite(etas)) or np.any(etas < 0):
                raise InvalidArgument(f'step_sizes must be {self.schedule.T} finite non-negative values')
            etas.setflags(write=False)
            object.__setattr__(self, 'step_sizes', etas)
        # fail early on a bad seed rather than at run time
        SeededRng(self.seed, self.stream)

    def rng(self):
        return SeededRng(self.seed, self.stream)

    def etas(self):
        if self.step_sizes is not None:
            return self.step_sizes
        return self.schedule.step_sizes()

    @property
    def batch_size(self):
        if self.algorithm == Algorithm.NSGD_B:
            return int(self.schedule.B)
        return 1

    def with_changes(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {
            'algorithm': self.algorithm.value,
            'schedule': self.schedule.as_dict(),
            'x0': self.x0.tolist(),
            'seed': self.seed,
            'stream': self.stream,
            'record_every': self.record_every,
        }
