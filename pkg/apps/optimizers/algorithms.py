"""
Clipped SGD and the three normalized SGD variants.

All four share one loop. Per step t:

  clipped_sgd  x <- x - eta_t clip_gamma(g_t)
  nsgd_b       x <- x - eta_t v / ||v||,  v = mean of B sampled gradients
  nsgd_m       m <- beta m + (1 - beta) g_t,  x <- x - eta_t m / ||m||
  nsgd_cm      m <- beta m + (1 - beta) clip_gamma(g_t),  x <- x - eta_t m / ||m||

with m_{-1} = 0 and v / ||v|| = 0 when v = 0. Indices are drawn i.i.d.
uniform on [0, n) (duplicates within a batch allowed) from the run's
'indices' sub-stream as one (T, B) block; the output position is drawn
from the 'output' sub-stream before the loop starts.
"""
import logging

import numpy as np

from apps.core_math.clipping import clip, normalize
from apps.core_math.errors import InvalidArgument, NumericalDivergence
from apps.core_math.params import Algorithm

from .trajectory import Trajectory

logger = logging.getLogger(__name__)


def _check_problem(problem, config):
    if problem.dim != config.x0.size:
        raise InvalidArgument(f'x0 has dimension {config.x0.size}, problem has dimension {problem.dim}')


def draw_indices(config, n):
    """The run's full index log, shape (T, B)."""
    rng = config.rng().spawn('indices')
    return rng.integers(0, n, size=(config.schedule.T, config.batch_size))


def draw_output_index(config):
    return int(config.rng().spawn('output').integers(0, config.schedule.T))


def _run(problem, config):
    _check_problem(problem, config)
    algorithm = config.algorithm
    schedule = config.schedule
    T = schedule.T
    etas = config.etas()
    gamma = schedule.gamma
    beta = schedule.beta

    index_log = draw_indices(config, problem.n)
    output_index = draw_output_index(config)

    x = config.x0.copy()
    m = np.zeros_like(x)
    output = None
    recorded_steps, iterates = [], []
    step_norms = np.zeros(T)
    estimate_norms = np.zeros(T)
    gradient_norms = np.zeros((T, config.batch_size))

    for t in range(T):
        if t % config.record_every == 0 or t == T - 1:
            recorded_steps.append(t)
            iterates.append(x.copy())
        if t == output_index:
            output = x.copy()

        grads = problem.component_grads(x, index_log[t])
        if not np.all(np.isfinite(grads)):
            raise NumericalDivergence(t, algorithm.value)
        gradient_norms[t] = np.linalg.norm(grads, axis=1)

        if algorithm == Algorithm.CLIPPED_SGD:
            g = grads[0]
            estimate_norms[t] = gradient_norms[t, 0]
            direction = clip(g, gamma)
        elif algorithm == Algorithm.NSGD_B:
            v = grads.mean(axis=0)
            direction, estimate_norms[t] = normalize(v)
        else:
            g = grads[0]
            if algorithm == Algorithm.NSGD_CM:
                g = clip(g, gamma)
            m = beta * m + (1.0 - beta) * g
            direction, estimate_norms[t] = normalize(m)

        x_next = x - etas[t] * direction
        if not np.all(np.isfinite(x_next)):
            raise NumericalDivergence(t, algorithm.value)
        step_norms[t] = np.linalg.norm(x_next - x)
        x = x_next

    logger.debug(
        'run: algorithm=%s n=%d T=%d output_index=%d final_norm=%.6g',
        algorithm.value, problem.n, T, output_index, np.linalg.norm(x),
    )
    return Trajectory(
        algorithm=algorithm.value,
        iterates=np.array(iterates),
        recorded_steps=np.array(recorded_steps, dtype=np.int64),
        index_log=index_log,
        step_norms=step_norms,
        gradient_norms=gradient_norms,
        estimate_norms=estimate_norms,
        output=output,
        output_index=output_index,
        final=x,
    )


def _run_as(expected, problem, config):
    if config.algorithm != expected:
        raise InvalidArgument(f'config is for {config.algorithm.value}, not {expected.value}')
    return _run(problem, config)


def run_clipped_sgd(problem, config):
    return _run_as(Algorithm.CLIPPED_SGD, problem, config)


def run_nsgd_b(problem, config):
    return _run_as(Algorithm.NSGD_B, problem, config)


def run_nsgd_m(problem, config):
    return _run_as(Algorithm.NSGD_M, problem, config)


def run_nsgd_cm(problem, config):
    return _run_as(Algorithm.NSGD_CM, problem, config)


def run(problem, config):
    """Dispatch on config.algorithm."""
    return _run(problem, config)


def sample_output_index(trajectory, rng):
    """
    Uniform step in {0, ..., T-1}. Only a trajectory that recorded every
    iterate (record_every=1) can be sampled.
    """
    steps = trajectory.recorded_steps
    if steps.size != trajectory.step_norms.size:
        raise InvalidArgument(
            f'uniform output needs every iterate; {steps.size} of {trajectory.step_norms.size} were recorded'
        )
    return int(steps[rng.integers(0, steps.size)])


def sample_output(trajectory, rng):
    return trajectory.iterate_at(sample_output_index(trajectory, rng))


def estimate_gradient_moment(trajectory, p):
    """G_hat = (mean ||grad f(x_t; xi)||^p)^(1/p) over every sampled gradient of the run."""
    if not p > 0:
        raise InvalidArgument(f'p must be > 0, got {p!r}')
    return float(np.mean(trajectory.gradient_norms ** p) ** (1.0 / p))
