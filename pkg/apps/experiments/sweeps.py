"""
Sweep cells: one (algorithm, n) point of a sweep.

A cell spec is a plain dict so it can cross a process boundary. Workers only
import the library apps, never Django settings. Every cell rebuilds the same
template problem from the experiment seed, and cells with the same n share
their run stream across algorithms, so algorithms are compared on common
random numbers.
"""
import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from apps.core_math.errors import NotAvailable
from apps.core_math.params import Algorithm, TailParams
from apps.core_math.schedules import schedule_for
from apps.noise.moments import verify_p_bcm
from apps.noise.rng import SeededRng
from apps.noise.samplers import NoiseSpec
from apps.optimizers.config import OptimizerConfig
from apps.problems.families import (
    ProblemFamily,
    make_logistic_pair,
    make_quad_plus_sine,
    make_robust_regression,
)
from apps.problems.sampling import ProblemSampler
from apps.stability.harness import stability_report

from .kinds import POPULATION_KINDS, ExperimentKind

logger = logging.getLogger(__name__)

SIGMA_DRAWS = 10_000

CSV_COLUMNS = [
    'experiment', 'kind', 'algorithm', 'n', 'p', 'sigma_p',
    'T', 'eta', 'gamma', 'beta', 'B',
    'reps', 'failed_reps',
    'epsilon_hat', 'epsilon_stderr', 'epsilon_ci_low', 'epsilon_ci_high', 'epsilon_theory',
    'argument_hat', 'argument_stderr', 'argument_theory',
    'hit_rate', 'hit_cap',
    'G_hat', 'G_hat_stderr',
    'gen_gap_hat', 'gen_gap_stderr', 'gen_bound_theory',
    'population_grad_norm', 'population_grad_norm_stderr',
    'stability_bound_holds', 'generalization_bound_holds',
    'status', 'error',
]


def build_template(problem, seed):
    """The experiment's problem law, rebuilt identically in every worker."""
    rng = SeededRng(seed).spawn('problem')
    family = ProblemFamily(problem['family'])
    noise = problem.get('noise')
    noise = None if noise is None else NoiseSpec(noise['family'], noise['tail_index'], noise['scale'])
    if family == ProblemFamily.LOGISTIC_PAIR:
        return make_logistic_pair()
    if family == ProblemFamily.ROBUST_REGRESSION:
        return make_robust_regression(2, problem['dim'], noise, rng, holdout_size=problem['holdout_size'])
    return make_quad_plus_sine(2, problem['dim'], noise, rng, c=problem['c'])


def estimate_sigma(template, x0, p, seed, draws=SIGMA_DRAWS):
    """sigma_p measured at the starting point, used when a config leaves it out."""
    report = verify_p_bcm(template, [x0], p, draws, SeededRng(seed).spawn('sigma'))
    return report.max_sigma


def resolve_sigma(config):
    if config.sigma_p is not None:
        return float(config.sigma_p)
    template = build_template(config.problem.as_dict(), config.seed)
    sigma = estimate_sigma(template, config.x0_vector(), config.p, config.seed)
    logger.info('resolve_sigma: estimated sigma_p=%.6g at x0 (p=%.3f)', sigma, config.p)
    return sigma


def supports_gap(template, x0):
    try:
        template.population_grad_with_error(x0)
    except NotAvailable:
        return False
    return True


def cell_specs(config, sigma_p):
    """One spec per (algorithm, n), in config order."""
    problem = config.problem.as_dict()
    include_gap = config.kind in POPULATION_KINDS
    if config.kind == ExperimentKind.STABILITY_SWEEP:
        include_gap = supports_gap(build_template(problem, config.seed), config.x0_vector())
    specs = []
    for algorithm in config.algorithms:
        for n in config.n_grid:
            run_rng = SeededRng(config.seed).spawn(f'n:{n}')
            specs.append({
                'experiment': config.name,
                'kind': config.kind.value,
                'algorithm': algorithm.value,
                'n': int(n),
                'p': config.p,
                'sigma_p': float(sigma_p),
                'scale': config.schedule_scale,
                'reps': config.reps,
                'probe_count': config.probe_count,
                'resamples': config.resamples,
                'problem': problem,
                'problem_seed': config.seed,
                'x0': config.x0_vector(),
                'run_seed': run_rng.seed,
                'run_stream': run_rng.stream,
                'include_gap': include_gap,
            })
    return specs


def _base_row(spec):
    row = dict.fromkeys(CSV_COLUMNS)
    row.update({
        'experiment': spec['experiment'],
        'kind': spec['kind'],
        'algorithm': spec['algorithm'],
        'n': spec['n'],
        'p': spec['p'],
        'sigma_p': spec['sigma_p'],
    })
    return row


def report_row(spec, report):
    row = _base_row(spec)
    schedule = report.schedule
    row.update({
        'T': schedule['T'],
        'eta': schedule['eta'],
        'gamma': schedule['gamma'],
        'beta': schedule['beta'],
        'B': schedule['B'],
        'reps': report.replication_count,
        'failed_reps': report.failed_reps,
        'epsilon_hat': report.epsilon.value,
        'epsilon_stderr': report.epsilon.stderr,
        'epsilon_ci_low': report.epsilon.ci_low,
        'epsilon_ci_high': report.epsilon.ci_high,
        'epsilon_theory': report.epsilon_theory,
        'argument_hat': report.argument.value,
        'argument_stderr': report.argument.stderr,
        'argument_theory': report.argument_theory,
        'hit_rate': report.hit_rate,
        'hit_cap': report.hit_cap,
        'gen_bound_theory': report.gen_bound_theory,
        'stability_bound_holds': report.stability_bound_holds,
        'generalization_bound_holds': report.generalization_bound_holds,
        'status': 'ok',
        'error': '',
    })
    if report.gradient_moment is not None:
        row['G_hat'] = report.gradient_moment.value
        row['G_hat_stderr'] = report.gradient_moment.stderr
    if report.gen_gap is not None:
        row['gen_gap_hat'] = report.gen_gap.value
        row['gen_gap_stderr'] = report.gen_gap.stderr
    if report.population_grad_norm is not None:
        row['population_grad_norm'] = report.population_grad_norm.value
        row['population_grad_norm_stderr'] = report.population_grad_norm.stderr
    return row


def failed_cell(spec, exc):
    row = _base_row(spec)
    row.update({'status': 'failed', 'error': f'{type(exc).__name__}: {exc}'})
    return {'row': row, 'report': None}


def run_cell(spec):
    """Never raises: a failing cell comes back with status 'failed'."""
    try:
        algorithm = Algorithm(spec['algorithm'])
        template = build_template(spec['problem'], spec['problem_seed'])
        sampler = ProblemSampler(template, spec['n'])
        schedule = schedule_for(algorithm, spec['n'], spec['p'], spec['scale'])
        config = OptimizerConfig(
            algorithm=algorithm,
            schedule=schedule,
            x0=np.asarray(spec['x0'], dtype=np.float64),
            seed=spec['run_seed'],
            stream=spec['run_stream'],
        )
        report = stability_report(
            sampler,
            config,
            reps=spec['reps'],
            tail=TailParams(spec['p'], spec['sigma_p']),
            probe_count=spec['probe_count'],
            resamples=spec['resamples'],
            include_gap=spec['include_gap'],
        )
    except Exception as exc:
        logger.exception('run_cell: algorithm=%s n=%d failed', spec['algorithm'], spec['n'])
        return failed_cell(spec, exc)
    logger.info('run_cell: algorithm=%s n=%d epsilon_hat=%.6g theory=%.6g',
                spec['algorithm'], spec['n'], report.epsilon.value, report.epsilon_theory)
    return {'row': report_row(spec, report), 'report': report.to_dict()}


def run_cells(specs, parallelism=1):
    """Results in spec order. Cells run on up to `parallelism` processes."""
    if parallelism <= 1 or len(specs) <= 1:
        return [run_cell(spec) for spec in specs]
    results = []
    with ProcessPoolExecutor(max_workers=min(int(parallelism), len(specs))) as pool:
        futures = [pool.submit(run_cell, spec) for spec in specs]
        for spec, future in zip(specs, futures):
            try:
                results.append(future.result())
            except Exception as exc:
                # the worker process itself died
                logger.exception('run_cells: worker for algorithm=%s n=%d crashed', spec['algorithm'], spec['n'])
                results.append(failed_cell(spec, exc))
    return results
