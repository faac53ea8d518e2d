"""
Monte Carlo estimates of uniform stability in gradients and of the
generalization gap.

Each replicate draws a training set S from the sampler, replaces a uniformly
chosen index with a fresh sample to get S', runs the optimizer on both with
one shared configuration and compares the outputs on a probe set of fresh
samples. Replicates run on disjoint sub-streams ('rep:<k>'), optionally on a
thread pool; results are reduced in replicate order.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from apps.core_math.bounds import argument_stability_bound, stability_bound
from apps.core_math.constants import generalization_bound
from apps.core_math.errors import InvalidArgument, NumericalDivergence
from apps.noise.rng import SeededRng
from apps.optimizers.algorithms import estimate_gradient_moment

from .coupling import coupled_run
from .estimators import DEFAULT_RESAMPLES, bootstrap, mean_statistic, root_mean_statistic
from .neighbors import make_neighbor
from .reports import StabilityReport

logger = logging.getLogger(__name__)

DEFAULT_PROBE_COUNT = 64
MIN_REPS = 10


@dataclass(frozen=True)
class RepOutcome:
    rep: int
    replaced_index: int
    failed: bool = False
    failed_step: Optional[int] = None
    max_grad_gap_sq: float = 0.0
    argument_gap_sq: float = 0.0
    hit: bool = False
    gen_gap: Optional[float] = None
    population_norm: Optional[float] = None
    population_error: float = 0.0
    gradient_moment: float = 0.0


@dataclass(frozen=True)
class StabilityEstimate:
    epsilon: object
    argument: object
    gradient_moment: object
    hit_rate: float
    hit_cap: float
    reps: int
    failed_reps: int
    probe_count: int

    @property
    def epsilon_hat(self):
        return self.epsilon.value

    @property
    def stderr(self):
        return self.epsilon.stderr


@dataclass(frozen=True)
class GapEstimate:
    gap: object
    population_norm: object
    population_error: float
    reps: int
    failed_reps: int

    @property
    def gap_hat(self):
        return self.gap.value

    @property
    def stderr(self):
        return self.gap.stderr


def _check_reps(reps):
    if isinstance(reps, bool) or int(reps) != reps or reps < MIN_REPS:
        raise InvalidArgument(f'reps must be an integer >= {MIN_REPS}, got {reps!r}')
    return int(reps)


def _probe_rows(probes, sampler, rng, probe_count):
    if probes is not None:
        rows = np.asarray(probes, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] == 0:
            raise InvalidArgument('probe set must be a non-empty (k, width) array')
        return rows
    if probe_count < 1:
        raise InvalidArgument(f'probe_count must be >= 1, got {probe_count!r}')
    return sampler.draw_samples(rng, probe_count)


def run_rep(sampler, config, rep, probes=None, probe_count=DEFAULT_PROBE_COUNT, include_gap=False, p=2.0):
    """One coupled replicate. G_hat is the p-th gradient moment along the run on S."""
    rng = SeededRng(config.seed, config.stream).spawn(f'rep:{rep}')
    problem = sampler.draw(rng.spawn('dataset'))
    replaced = int(rng.spawn('replaced').integers(0, sampler.n))
    pair = make_neighbor(problem.dataset, replaced, rng.spawn('ghost'), sampler)
    problem_prime = problem.with_dataset(pair.S_prime)
    run_rng = rng.spawn('run')
    rep_config = config.with_changes(seed=run_rng.seed, stream=run_rng.stream)

    try:
        trajectory, trajectory_prime = coupled_run(problem, problem_prime, rep_config)
    except NumericalDivergence as exc:
        logger.warning('run_rep: rep=%d failed at step=%d (%s)', rep, exc.step, exc)
        return RepOutcome(rep=rep, replaced_index=replaced, failed=True, failed_step=exc.step)

    rows = _probe_rows(probes, sampler, rng.spawn('probes'), probe_count)
    gaps = problem.sample_grads(trajectory.output, rows) - problem_prime.sample_grads(trajectory_prime.output, rows)
    moved = trajectory.output - trajectory_prime.output

    gen_gap = population_norm = None
    population_error = 0.0
    if include_gap:
        population, population_error = problem.population_grad_with_error(trajectory.output)
        gen_gap = float(np.linalg.norm(population - problem.empirical_grad(trajectory.output)))
        population_norm = float(np.linalg.norm(population))

    return RepOutcome(
        rep=rep,
        replaced_index=replaced,
        max_grad_gap_sq=float(np.max(np.sum(gaps * gaps, axis=1))),
        argument_gap_sq=float(np.dot(moved, moved)),
        hit=trajectory.contains_index(replaced),
        gen_gap=gen_gap,
        population_norm=population_norm,
        population_error=float(population_error),
        gradient_moment=estimate_gradient_moment(trajectory, p),
    )


def measure(sampler, config, reps, probes=None, probe_count=DEFAULT_PROBE_COUNT, include_gap=False, parallelism=1,
            p=2.0):
    """All replicates, in replicate order."""
    reps = _check_reps(reps)

    def one(rep):
        return run_rep(sampler, config, rep, probes=probes, probe_count=probe_count, include_gap=include_gap, p=p)

    if parallelism and parallelism > 1:
        with ThreadPoolExecutor(max_workers=int(parallelism)) as pool:
            outcomes = list(pool.map(one, range(reps)))
    else:
        outcomes = [one(rep) for rep in range(reps)]

    failed = [o for o in outcomes if o.failed]
    if len(failed) == reps:
        raise NumericalDivergence(failed[0].failed_step, config.algorithm.value)
    if failed:
        logger.warning('measure: %d of %d replicates diverged and were dropped', len(failed), reps)
    return outcomes


def _hit_cap(config, n):
    draws = config.schedule.T * config.batch_size
    return min(1.0, draws / n)


def summarize_stability(outcomes, config, n, probe_count, resamples=DEFAULT_RESAMPLES):
    ok = [o for o in outcomes if not o.failed]
    seed = config.seed
    epsilon = bootstrap([o.max_grad_gap_sq for o in ok], root_mean_statistic, resamples, seed=seed)
    argument = bootstrap([o.argument_gap_sq for o in ok], root_mean_statistic, resamples, seed=seed + 1)
    moment = bootstrap([o.gradient_moment for o in ok], mean_statistic, resamples, seed=seed + 4)
    return StabilityEstimate(
        epsilon=epsilon,
        argument=argument,
        gradient_moment=moment,
        hit_rate=float(np.mean([o.hit for o in ok])),
        hit_cap=_hit_cap(config, n),
        reps=len(ok),
        failed_reps=len(outcomes) - len(ok),
        probe_count=probe_count,
    )


def summarize_gap(outcomes, config, resamples=DEFAULT_RESAMPLES):
    ok = [o for o in outcomes if not o.failed]
    gap = bootstrap([o.gen_gap for o in ok], mean_statistic, resamples, seed=config.seed + 2)
    norm = bootstrap([o.population_norm for o in ok], mean_statistic, resamples, seed=config.seed + 3)
    return GapEstimate(
        gap=gap,
        population_norm=norm,
        population_error=max(o.population_error for o in ok),
        reps=len(ok),
        failed_reps=len(outcomes) - len(ok),
    )


def empirical_stability(sampler, config, probes=None, reps=100, probe_count=DEFAULT_PROBE_COUNT,
                        resamples=DEFAULT_RESAMPLES, parallelism=1):
    """
    epsilon_hat = sqrt(mean over replicates of max over probes of
    ||grad f(A(S); xi) - grad f(A(S'); xi)||^2), with bootstrap error.
    """
    outcomes = measure(sampler, config, reps, probes=probes, probe_count=probe_count, parallelism=parallelism)
    count = probe_count if probes is None else len(probes)
    return summarize_stability(outcomes, config, sampler.n, count, resamples)


def empirical_gen_gap(sampler, config, reps=100, resamples=DEFAULT_RESAMPLES, parallelism=1):
    """Mean over replicates of ||grad F(A(S)) - grad F_S(A(S))||."""
    # raises NotAvailable before any work for families without a population gradient
    sampler.template.population_grad_with_error(config.x0)
    outcomes = measure(sampler, config, reps, probe_count=1, include_gap=True, parallelism=parallelism)
    return summarize_gap(outcomes, config, resamples)


def stability_report(sampler, config, reps, tail, probes=None, probe_count=DEFAULT_PROBE_COUNT,
                     resamples=DEFAULT_RESAMPLES, parallelism=1, include_gap=True, L=None):
    """
    One pass of replicates feeding both estimates, compared with the
    stability bound and the generalization bound at the upper end of the
    epsilon interval.
    """
    if include_gap:
        sampler.template.population_grad_with_error(config.x0)
    L = sampler.L if L is None else L
    n = sampler.n
    logger.info('stability_report: algorithm=%s n=%d T=%d reps=%d', config.algorithm.value, n, config.schedule.T, reps)
    outcomes = measure(sampler, config, reps, probes=probes, probe_count=probe_count,
                       include_gap=include_gap, parallelism=parallelism, p=tail.p)
    count = probe_count if probes is None else len(probes)
    stability = summarize_stability(outcomes, config, n, count, resamples)

    step_sizes = config.step_sizes
    gen_gap = gen_bound = population_norm = None
    population_error = 0.0
    if include_gap:
        gap = summarize_gap(outcomes, config, resamples)
        gen_gap, population_error = gap.gap, gap.population_error
        population_norm = gap.population_norm
        gen_bound = generalization_bound(stability.epsilon.ci_high, tail, n)

    return StabilityReport(
        algorithm=config.algorithm.value,
        schedule=config.schedule.as_dict(),
        n=n,
        p=tail.p,
        sigma_p=tail.sigma_p,
        L=L,
        replication_count=stability.reps,
        failed_reps=stability.failed_reps,
        probe_count=count,
        epsilon=stability.epsilon,
        epsilon_theory=stability_bound(config.algorithm, config.schedule, L, n, step_sizes=step_sizes),
        argument=stability.argument,
        argument_theory=argument_stability_bound(config.algorithm, config.schedule, n, step_sizes=step_sizes),
        hit_rate=stability.hit_rate,
        hit_cap=stability.hit_cap,
        gradient_moment=stability.gradient_moment,
        gen_gap=gen_gap,
        gen_bound_theory=gen_bound,
        population_error=population_error,
        population_grad_norm=population_norm,
    )
