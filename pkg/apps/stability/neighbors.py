"""
Neighbouring datasets: S and S^(i), equal except for one fresh sample at i.
"""
import logging
from dataclasses import dataclass

import numpy as np

from apps.core_math.errors import InvalidArgument

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NeighborPair:
    S: object
    S_prime: object
    replaced_index: int
    replacement_sample: np.ndarray

    @property
    def differs(self):
        """False when the ghost draw happened to equal the original row."""
        return self.S.content_hash != self.S_prime.content_hash


def make_neighbor(dataset, i, rng, source):
    """
    Replace row i of `dataset` with one fresh draw from `source`'s data law
    (a ProblemSampler or a problem instance).
    """
    if isinstance(i, bool) or int(i) != i or not (0 <= i < dataset.n):
        raise InvalidArgument(f'replaced index {i!r} out of range [0, {dataset.n})')
    row = np.asarray(source.draw_samples(rng, 1)[0], dtype=np.float64)
    S_prime = dataset.replace_row(int(i), row)
    return NeighborPair(S=dataset, S_prime=S_prime, replaced_index=int(i), replacement_sample=row)
