"""
Stability report: empirical estimates next to their theoretical bounds.
"""
from dataclasses import dataclass, field
from typing import Optional

from apps.core_math.errors import InvalidArgument

from .estimators import Estimate

PROBE_CAVEAT = (
    'epsilon_hat takes the maximum over a finite probe set of fresh samples, '
    'which can only under-estimate the supremum over all samples'
)


@dataclass(frozen=True)
class StabilityReport:
    algorithm: str
    schedule: dict
    n: int
    p: float
    sigma_p: float
    L: float
    replication_count: int
    failed_reps: int
    probe_count: int
    epsilon: Estimate
    epsilon_theory: float
    argument: Estimate
    argument_theory: float
    hit_rate: float
    hit_cap: float
    gradient_moment: Optional[Estimate] = None
    gen_gap: Optional[Estimate] = None
    gen_bound_theory: Optional[float] = None
    population_error: float = 0.0
    population_grad_norm: Optional[Estimate] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.replication_count < 1:
            raise InvalidArgument('a report needs at least one successful replicate')
        for estimate in (self.epsilon, self.argument, self.gradient_moment, self.gen_gap, self.population_grad_norm):
            if estimate is not None and estimate.stderr < 0:
                raise InvalidArgument('standard errors must be non-negative')

    @property
    def epsilon_hat(self):
        return self.epsilon.value

    @property
    def G_hat(self):
        return None if self.gradient_moment is None else self.gradient_moment.value

    @property
    def gen_gap_hat(self):
        return None if self.gen_gap is None else self.gen_gap.value

    @property
    def stability_bound_holds(self):
        """epsilon_hat within the bound up to three bootstrap standard errors."""
        return self.epsilon.value <= self.epsilon_theory + 3.0 * self.epsilon.stderr

    @property
    def generalization_bound_holds(self):
        if self.gen_gap is None or self.gen_bound_theory is None:
            return None
        return self.gen_gap.value <= self.gen_bound_theory + self.population_error

    def to_dict(self):
        return {
            'algorithm': self.algorithm,
            'schedule': dict(self.schedule),
            'n': self.n,
            'p': self.p,
            'sigma_p': self.sigma_p,
            'L': self.L,
            'replication_count': self.replication_count,
            'failed_reps': self.failed_reps,
            'probe_count': self.probe_count,
            'epsilon': self.epsilon.as_dict(),
            'epsilon_theory': self.epsilon_theory,
            'argument_stability': self.argument.as_dict(),
            'argument_theory': self.argument_theory,
            'hit_rate': self.hit_rate,
            'hit_cap': self.hit_cap,
            'G_hat': None if self.gradient_moment is None else self.gradient_moment.as_dict(),
            'gen_gap': None if self.gen_gap is None else self.gen_gap.as_dict(),
            'gen_bound_theory': self.gen_bound_theory,
            'population_error': self.population_error,
            'population_grad_norm': None if self.population_grad_norm is None else self.population_grad_norm.as_dict(),
            'stability_bound_holds': self.stability_bound_holds,
            'generalization_bound_holds': self.generalization_bound_holds,
            'caveat': PROBE_CAVEAT,
            **self.extra,
        }
