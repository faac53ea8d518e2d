"""
Experiment config files.

A config is a YAML mapping validated by ExperimentConfigSerializer. Values a
file leaves out fall back to the HTSTAB_* settings, and the resolved config
is what gets hashed, so two files that resolve to the same experiment share a
config_hash.
"""
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml
from django.conf import settings

from apps.core_math.errors import ConfigError
from apps.core_math.params import Algorithm
from apps.noise.samplers import NoiseSpec
from apps.problems.families import DEFAULT_HOLDOUT_SIZE, ProblemFamily

from .kinds import SWEEP_KINDS, ExperimentKind
from .serializers import ExperimentConfigSerializer, flatten_errors

logger = logging.getLogger(__name__)

DEFAULT_C = 0.5
DEFAULT_X0 = 1.0


def settings_defaults():
    return {
        'seed': settings.HTSTAB_DEFAULT_SEED,
        'schedule_scale': settings.HTSTAB_SCHEDULE_SCALE,
        'probe_count': settings.HTSTAB_PROBE_COUNT,
        'resamples': settings.HTSTAB_BOOTSTRAP_RESAMPLES,
        'holdout_size': getattr(settings, 'HTSTAB_HOLDOUT_SIZE', DEFAULT_HOLDOUT_SIZE),
    }


@dataclass(frozen=True)
class ProblemConfig:
    family: ProblemFamily
    dim: int = 1
    c: float = DEFAULT_C
    noise: Optional[NoiseSpec] = None
    holdout_size: int = DEFAULT_HOLDOUT_SIZE

    def as_dict(self):
        data = {'family': self.family.value, 'dim': self.dim}
        if self.family == ProblemFamily.QUAD_PLUS_SINE:
            data['c'] = self.c
        if self.family == ProblemFamily.ROBUST_REGRESSION:
            data['holdout_size'] = self.holdout_size
        if self.family != ProblemFamily.LOGISTIC_PAIR:
            data['noise'] = None if self.noise is None else {
                'family': self.noise.family.value,
                'tail_index': float(self.noise.tail_index),
                'scale': float(self.noise.scale),
            }
        return data


@dataclass(frozen=True)
class RandomWalkConfig:
    eta: float = 0.1
    horizon: int = 400
    seeds: int = 1000
    every: int = 50

    def as_dict(self):
        return {'eta': self.eta, 'horizon': self.horizon, 'seeds': self.seeds, 'every': self.every}


@dataclass(frozen=True)
class LemmaSuiteConfig:
    instances: int = 10_000
    trials: int = 100_000

    def as_dict(self):
        return {'instances': self.instances, 'trials': self.trials}


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: ExperimentKind
    seed: int
    problem: Optional[ProblemConfig] = None
    algorithms: tuple = ()
    n_grid: tuple = ()
    p: float = 2.0
    sigma_p: Optional[float] = None
    schedule_scale: float = 1.0
    reps: int = 100
    probe_count: int = 64
    resamples: int = 1000
    x0: tuple = (DEFAULT_X0,)
    charts: bool = True
    random_walk: RandomWalkConfig = field(default_factory=RandomWalkConfig)
    lemmas: LemmaSuiteConfig = field(default_factory=LemmaSuiteConfig)

    @property
    def is_sweep(self):
        return self.kind in SWEEP_KINDS

    def x0_vector(self):
        dim = self.problem.dim if self.problem is not None else 1
        return list(self.x0) * dim if len(self.x0) == 1 else list(self.x0)

    def as_dict(self):
        data = {
            'name': self.name,
            'kind': self.kind.value,
            'seed': self.seed,
        }
        if self.is_sweep:
            data.update({
                'problem': self.problem.as_dict(),
                'algorithms': [a.value for a in self.algorithms],
                'n_grid': list(self.n_grid),
                'p': self.p,
                'sigma_p': self.sigma_p,
                'schedule_scale': self.schedule_scale,
                'reps': self.reps,
                'probe_count': self.probe_count,
                'resamples': self.resamples,
                'x0': self.x0_vector(),
                'charts': self.charts,
            })
        elif self.kind == ExperimentKind.RANDOM_WALK_DEMO:
            data['random_walk'] = self.random_walk.as_dict()
        else:
            data['lemmas'] = self.lemmas.as_dict()
        return data

    @property
    def config_hash(self):
        canonical = json.dumps(self.as_dict(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def _problem_config(data, defaults):
    noise = data.get('noise')
    return ProblemConfig(
        family=ProblemFamily(data['family']),
        dim=int(data['dim']),
        c=float(data.get('c', DEFAULT_C)),
        noise=None if noise is None else NoiseSpec(noise['family'], noise['tail_index'], noise['scale']),
        holdout_size=int(data.get('holdout_size', defaults['holdout_size'])),
    )


def parse_config(data, defaults=None):
    """Validate an already-parsed mapping. Raises ConfigError with dotted paths."""
    if not isinstance(data, dict):
        raise ConfigError([('<root>', 'expected a mapping of config keys')])
    defaults = settings_defaults() if defaults is None else defaults
    serializer = ExperimentConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError(flatten_errors(serializer.errors))
    values = serializer.validated_data

    problem = values.get('problem')
    return ExperimentConfig(
        name=values['name'],
        kind=ExperimentKind(values['kind']),
        seed=int(values.get('seed', defaults['seed'])),
        problem=None if problem is None else _problem_config(problem, defaults),
        algorithms=tuple(Algorithm(a) for a in values.get('algorithms', ())),
        n_grid=tuple(values.get('n_grid', ())),
        p=float(values['p']),
        sigma_p=values.get('sigma_p'),
        schedule_scale=float(values.get('schedule_scale', defaults['schedule_scale'])),
        reps=int(values['reps']),
        probe_count=int(values.get('probe_count', defaults['probe_count'])),
        resamples=int(values.get('resamples', defaults['resamples'])),
        x0=tuple(values.get('x0', (DEFAULT_X0,))),
        charts=bool(values['charts']),
        random_walk=RandomWalkConfig(**values.get('random_walk', {})),
        lemmas=LemmaSuiteConfig(**values.get('lemmas', {})),
    )


def load_config(path, defaults=None):
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError([(str(path), f'cannot read config: {exc.strerror or exc}')]) from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        where = f'line {mark.line + 1}' if mark is not None else '<yaml>'
        raise ConfigError([(where, f'not valid YAML: {getattr(exc, "problem", None) or exc}')]) from exc
    config = parse_config(data, defaults)
    logger.info('load_config: path=%s name=%s kind=%s hash=%s', path, config.name, config.kind.value,
                config.config_hash[:12])
    return config
