"""
Invariant suite: the clipping and normalization inequalities, the constant
identities, the martingale moment bound, the truncation decomposition and
the smoothness constants of every problem family, each checked over many
random instances.

Every check reports its worst margin (right side minus left side, so a
negative margin is a violation) instead of stopping at the first failure.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from apps.core_math.clipping import clip, normalized_inner_product
from apps.core_math.constants import c_p_constant, generalization_bound, phi, tau_star
from apps.core_math.params import TailParams
from apps.noise.moments import martingale_moment_ratio
from apps.noise.rng import SeededRng
from apps.noise.samplers import NoiseSpec, sample_many
from apps.problems.families import (
    estimate_smoothness,
    make_logistic_pair,
    make_quad_plus_sine,
    make_robust_regression,
)
from apps.stability.truncation import truncation_check

logger = logging.getLogger(__name__)

DEFAULT_INSTANCES = 10_000
DEFAULT_TRIALS = 100_000
TOL = 1e-12
MAX_DIM = 16

MARTINGALE_FACTOR = 2.2
MARTINGALE_STEPS = (2, 8, 32)
TRUNCATION_SLACK = 0.1


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    description: str
    passed: bool
    instances: int
    worst_margin: float
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            'name': self.name,
            'description': self.description,
            'passed': self.passed,
            'instances': self.instances,
            'worst_margin': self.worst_margin,
            'detail': dict(self.detail),
        }


@dataclass(frozen=True)
class LemmaSuiteResult:
    checks: tuple

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def as_dict(self):
        return [check.as_dict() for check in self.checks]


def _check(name, description, margins, detail=None):
    margins = np.asarray(margins, dtype=np.float64)
    worst = float(np.min(margins))
    return LemmaCheck(name, description, worst >= 0.0, int(margins.size), worst, detail or {})


def _clip_instances(rng, instances):
    """(u, v, gamma, p) with dimension 1..16 per instance."""
    dims = rng.integers(1, MAX_DIM + 1, size=instances)
    U = rng.standard_normal(size=(instances, MAX_DIM))
    V = rng.standard_normal(size=(instances, MAX_DIM))
    scales = 10.0 ** rng.uniform(-3.0, 3.0, size=instances)
    gammas = 10.0 ** rng.uniform(-3.0, 3.0, size=instances)
    ps = rng.uniform(1.0, 2.0, size=instances)
    ps[ps == 1.0] = 2.0
    for k in range(instances):
        d = int(dims[k])
        yield U[k, :d] * scales[k], V[k, :d] * scales[k], float(gammas[k]), float(ps[k])


def check_clip_squared_norm(rng, instances):
    margins = []
    for u, _, gamma, p in _clip_instances(rng, instances):
        lhs = np.linalg.norm(clip(u, gamma)) ** 2
        rhs = gamma ** (2 - p) * np.linalg.norm(u) ** p
        margins.append(rhs * (1 + TOL) + TOL - lhs)
    return _check('clip_squared_norm', '||clip(u)||^2 <= gamma^(2-p) ||u||^p', margins)


def check_clip_residual(rng, instances):
    margins = []
    for u, _, gamma, p in _clip_instances(rng, instances):
        lhs = np.linalg.norm(u - clip(u, gamma))
        rhs = np.linalg.norm(u) ** p / gamma ** (p - 1)
        margins.append(rhs * (1 + TOL) + TOL - lhs)
    return _check('clip_residual', '||u - clip(u)|| <= ||u||^p / gamma^(p-1)', margins)


def check_clip_lipschitz(rng, instances):
    margins = []
    for u, v, gamma, _ in _clip_instances(rng, instances):
        lhs = np.linalg.norm(clip(u, gamma) - clip(v, gamma))
        rhs = np.linalg.norm(u - v)
        margins.append(rhs * (1 + TOL) + TOL - lhs)
    return _check('clip_lipschitz', '||clip(u) - clip(v)|| <= ||u - v||', margins)


def check_clip_norm(rng, instances):
    margins = []
    for u, _, gamma, _ in _clip_instances(rng, instances):
        expected = min(np.linalg.norm(u), gamma)
        margins.append(1e-14 * expected - abs(np.linalg.norm(clip(u, gamma)) - expected))
    return _check('clip_norm', '||clip(u)|| = min(||u||, gamma) up to rounding', margins)


def check_normalized_inner_product(rng, instances):
    margins = []
    near = rng.uniform(size=instances) < 0.5
    for k in range(instances):
        d = int(rng.integers(1, MAX_DIM + 1))
        u = rng.standard_normal(size=d) * 10.0 ** rng.uniform(-2.0, 2.0)
        if near[k]:
            v = u + rng.standard_normal(size=d) * 10.0 ** rng.uniform(-3.0, 1.0)
        else:
            v = rng.standard_normal(size=d)
        if not np.any(v):
            continue
        lhs = normalized_inner_product(u, v)
        rhs = np.linalg.norm(u) - 2 * np.linalg.norm(u - v)
        margins.append(lhs - rhs + TOL * max(1.0, np.linalg.norm(u)))
    return _check('normalized_inner_product', '<u, v/||v||> >= ||u|| - 2||u - v||', margins)


def check_c_p_range(points=1000):
    ps = np.linspace(1.0, 2.0, points + 1)[1:]
    values = np.array([c_p_constant(float(p)) for p in ps])
    # the upper end 3 is attained at p = 1.2
    margins = np.minimum(values - 1.0, 3.0 + TOL - values)
    margins = np.append(margins, 0.0 if c_p_constant(2.0) == 1.0 else -1.0)
    return _check('c_p_range', '1 <= C_p <= 3 on (1, 2] and C_2 = 1 exactly', margins)


def _tail_triples(rng, count):
    ps = rng.uniform(1.01, 1.99, size=count)
    ns = rng.integers(1, 10 ** 6, size=count)
    sigmas = 10.0 ** rng.uniform(-2.0, 2.0, size=count)
    return [(float(p), int(n), float(s)) for p, n, s in zip(ps, ns, sigmas)]


def check_tau_star_identity(rng, count=100):
    margins = []
    for p, n, sigma in _tail_triples(rng, count):
        value = phi(tau_star(p, n, sigma), p, n, sigma)
        expected = generalization_bound(0.0, TailParams(p, sigma), n)
        margins.append(1e-9 - abs(value / expected - 1.0))
    return _check('tau_star_identity', 'phi(tau_star) = C_p sigma_p n^(-(p-1)/p)', margins)


def check_tau_star_grid(rng, count=20, grid=10_000):
    taus = np.logspace(-3.0, 9.0, grid)
    margins = []
    for p, n, sigma in _tail_triples(rng, count):
        moment = sigma ** p
        curve = math.sqrt(moment / n) * taus ** ((2.0 - p) / 2.0) + 2.0 * moment * taus ** (1.0 - p)
        best = float(np.min(curve))
        value = phi(tau_star(p, n, sigma), p, n, sigma)
        margins.append(best * (1 + 1e-9) - value)
    return _check('tau_star_grid', 'phi(tau_star) <= min of phi over a log grid', margins,
                  {'grid_points': grid})


def check_martingale_moment(rng, trials, q=1.5, dim=4):
    specs = (
        NoiseSpec('gaussian', dim=dim),
        NoiseSpec('symmetric_alpha_stable', tail_index=1.8, dim=dim),
    )
    margins, ratios = [], {}
    for spec in specs:
        for k in MARTINGALE_STEPS:
            ratio = martingale_moment_ratio(spec, k, q, trials, rng.spawn(f'{spec.family.value}:{k}'))
            ratios[f'{spec.family.value}:k={k}'] = ratio
            margins.append(MARTINGALE_FACTOR - ratio)
    return _check('martingale_moment', f'E||sum X_i||^q <= {MARTINGALE_FACTOR} sum E||X_i||^q',
                  margins, {'q': q, 'ratios': ratios})


def check_truncation(rng, trials, p=1.5, n=1000):
    spec = NoiseSpec('symmetric_alpha_stable', tail_index=1.8, dim=2)
    samples = sample_many(spec, rng, trials)
    sigma_hat = truncation_check(samples, TailParams(p, 1.0), 1.0).sigma_hat
    star = tau_star(p, n, sigma_hat)
    margins, levels = [], {}
    for label, tau in (('tau_star/4', star / 4), ('tau_star', star), ('4*tau_star', 4 * star)):
        decomposition = truncation_check(samples, TailParams(p, sigma_hat), tau)
        levels[label] = decomposition.as_dict()
        margins.append(decomposition.bound_a * (1 + TRUNCATION_SLACK) - decomposition.clipped_noise_second_moment)
        margins.append(decomposition.bound_b * (1 + TRUNCATION_SLACK) - decomposition.residual_first_moment)
    return _check('truncation', 'clipped-noise variance and residual mean within their bounds',
                  margins, {'p': p, 'n': n, 'levels': levels})


def check_smoothness(rng, pairs):
    noise = NoiseSpec('student_t', tail_index=3.0)
    problems = {
        'logistic_pair': make_logistic_pair(),
        'robust_regression': make_robust_regression(64, 4, noise, rng.spawn('robust'), holdout_size=0),
        'quad_plus_sine': make_quad_plus_sine(64, 4, noise, rng.spawn('quad'), c=0.7),
    }
    margins, ratios = [], {}
    for name, problem in problems.items():
        ratio = estimate_smoothness(problem, pairs, rng.spawn(f'pairs:{name}'))
        ratios[name] = {'sampled': ratio, 'L': problem.L}
        margins.append(problem.L * (1 + 1e-9) - ratio)
    return _check('smoothness', 'sampled gradient Lipschitz ratio <= L', margins, {'families': ratios})


def run_lemma_suite(instances=DEFAULT_INSTANCES, trials=DEFAULT_TRIALS, seed=0):
    """All checks, each on its own sub-stream of `seed`."""
    root = SeededRng(seed)
    logger.info('run_lemma_suite: instances=%d trials=%d seed=%d', instances, trials, seed)
    checks = (
        check_clip_squared_norm(root.spawn('clip_squared_norm'), instances),
        check_clip_residual(root.spawn('clip_residual'), instances),
        check_clip_lipschitz(root.spawn('clip_lipschitz'), instances),
        check_clip_norm(root.spawn('clip_norm'), instances),
        check_normalized_inner_product(root.spawn('normalized_inner_product'), instances),
        check_c_p_range(),
        check_tau_star_identity(root.spawn('tau_star_identity')),
        check_tau_star_grid(root.spawn('tau_star_grid')),
        check_martingale_moment(root.spawn('martingale'), trials),
        check_truncation(root.spawn('truncation'), trials),
        check_smoothness(root.spawn('smoothness'), min(instances, 2000)),
    )
    result = LemmaSuiteResult(checks)
    for check in result.failures:
        logger.warning('run_lemma_suite: %s failed, worst margin %.3g', check.name, check.worst_margin)
    return result
