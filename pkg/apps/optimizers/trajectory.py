"""
Immutable record of one optimizer run.
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Trajectory:
    algorithm: str
    # iterates[k] is x at step recorded_steps[k]; t = 0 and t = T-1 are always present
    iterates: np.ndarray
    recorded_steps: np.ndarray
    # (T, B) sampled component indices, the run's I(A)
    index_log: np.ndarray
    step_norms: np.ndarray
    gradient_norms: np.ndarray
    # norm of the vector that was clipped or normalized at each step
    estimate_norms: np.ndarray
    output: np.ndarray
    output_index: int
    final: np.ndarray

    def __post_init__(self):
        for name in ('iterates', 'recorded_steps', 'index_log', 'step_norms',
                     'gradient_norms', 'estimate_norms', 'output', 'final'):
            getattr(self, name).setflags(write=False)

    @property
    def T(self):
        return self.index_log.shape[0]

    def contains_index(self, i):
        return bool(np.any(self.index_log == i))

    def first_use(self, i):
        """First step whose sample set includes index i, or None."""
        hits = np.flatnonzero(np.any(self.index_log == i, axis=1))
        return int(hits[0]) if hits.size else None

    def iterate_at(self, t):
        position = np.searchsorted(self.recorded_steps, t)
        if position >= self.recorded_steps.size or self.recorded_steps[position] != t:
            raise KeyError(f'step {t} was not recorded')
        return self.iterates[position]

    def as_dict(self, include_iterates=False):
        record = {
            'algorithm': str(self.algorithm),
            'T': self.T,
            'output_index': self.output_index,
            'output': self.output.tolist(),
            'final': self.final.tolist(),
            'max_step_norm': float(self.step_norms.max()),
            'mean_gradient_norm': float(self.gradient_norms.mean()),
        }
        if include_iterates:
            record['recorded_steps'] = self.recorded_steps.tolist()
            record['iterates'] = self.iterates.tolist()
        return record
