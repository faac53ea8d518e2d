"""
Coupled runs on neighbouring datasets.

Both runs use the same OptimizerConfig, hence the same index and output
streams. They stay bitwise equal until the first step that samples the
replaced index.
"""
import logging

from apps.core_math.errors import InvalidArgument
from apps.optimizers.algorithms import run

logger = logging.getLogger(__name__)


def coupled_run(problem_S, problem_S_prime, config):
    if problem_S.n != problem_S_prime.n or problem_S.dim != problem_S_prime.dim:
        raise InvalidArgument(
            f'coupled problems must share n and dimension: '
            f'({problem_S.n}, {problem_S.dim}) vs ({problem_S_prime.n}, {problem_S_prime.dim})'
        )
    trajectory = run(problem_S, config)
    trajectory_prime = run(problem_S_prime, config)
    return trajectory, trajectory_prime


def first_divergence(trajectory, trajectory_prime):
    """First recorded step where the iterates differ, or None."""
    for k, t in enumerate(trajectory.recorded_steps):
        if trajectory.iterates[k].tobytes() != trajectory_prime.iterates[k].tobytes():
            return int(t)
    if trajectory.final.tobytes() != trajectory_prime.final.tobytes():
        return trajectory.T
    return None
