"""
Parameter records shared across the project: algorithm choice, tail
parameters (p-BCM), theory constants and step schedules.
"""
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from django.db import models

from .errors import InvalidArgument


class Algorithm(models.TextChoices):
    CLIPPED_SGD = 'clipped_sgd', 'Clipped SGD'
    NSGD_B = 'nsgd_b', 'Mini-batch normalized SGD'
    NSGD_M = 'nsgd_m', 'Normalized SGD with momentum'
    NSGD_CM = 'nsgd_cm', 'Normalized SGD with clipping and momentum'


# Schedule fields each algorithm cannot run without.
REQUIRED_FIELDS = {
    Algorithm.CLIPPED_SGD: ('gamma',),
    Algorithm.NSGD_B: ('B',),
    Algorithm.NSGD_M: ('beta',),
    Algorithm.NSGD_CM: ('beta', 'gamma'),
}


def parse_algorithm(value):
    try:
        return Algorithm(value)
    except ValueError:
        raise InvalidArgument(
            f'unknown algorithm {value!r}; expected one of {", ".join(Algorithm.values)}'
        ) from None


def check_tail_exponent(p):
    if not (isinstance(p, (int, float, np.floating)) and 1.0 < p <= 2.0):
        raise InvalidArgument(f'tail exponent p must lie in (1, 2], got {p!r}')
    return float(p)


@dataclass(frozen=True)
class TailParams:
    p: float
    sigma_p: float

    def __post_init__(self):
        check_tail_exponent(self.p)
        if not (math.isfinite(self.sigma_p) and self.sigma_p >= 0):
            raise InvalidArgument(f'sigma_p must be finite and >= 0, got {self.sigma_p!r}')


@dataclass(frozen=True)
class TheoryParams:
    L: float
    G: float
    Delta: float = 0.0

    def __post_init__(self):
        if not self.L > 0:
            raise InvalidArgument(f'L must be > 0, got {self.L!r}')
        if not self.G > 0:
            raise InvalidArgument(f'G must be > 0, got {self.G!r}')
        if not self.Delta >= 0:
            raise InvalidArgument(f'Delta must be >= 0, got {self.Delta!r}')


@dataclass(frozen=True)
class Schedule:
    """
    Constant-step schedule. eta = 0 is accepted and describes a run that never
    moves (the degenerate schedule the stability tests use); every other field
    follows the usual ranges.
    """
    T: int
    eta: float
    gamma: Optional[float] = None
    beta: Optional[float] = None
    B: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.T, bool) or not isinstance(self.T, (int, np.integer)) or self.T < 1:
            raise InvalidArgument(f'T must be an integer >= 1, got {self.T!r}')
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise InvalidArgument(f'eta must be finite and >= 0, got {self.eta!r}')
        if self.gamma is not None and (math.isnan(self.gamma) or self.gamma <= 0):
            raise InvalidArgument(f'gamma must be > 0, got {self.gamma!r}')
        if self.beta is not None and not (0.0 <= self.beta < 1.0):
            raise InvalidArgument(f'beta must lie in [0, 1), got {self.beta!r}')
        if self.B is not None and (
            isinstance(self.B, bool) or not isinstance(self.B, (int, np.integer)) or self.B < 1
        ):
            raise InvalidArgument(f'B must be an integer >= 1, got {self.B!r}')

    def validate_for(self, algorithm):
        algorithm = parse_algorithm(algorithm)
        missing = [name for name in REQUIRED_FIELDS[algorithm] if getattr(self, name) is None]
        if missing:
            raise InvalidArgument(
                f'{algorithm.value} schedule is missing {", ".join(missing)}'
            )
        return self

    def step_sizes(self):
        return np.full(int(self.T), float(self.eta))

    def with_changes(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {
            'T': int(self.T),
            'eta': float(self.eta),
            'gamma': None if self.gamma is None else float(self.gamma),
            'beta': None if self.beta is None else float(self.beta),
            'B': None if self.B is None else int(self.B),
        }
