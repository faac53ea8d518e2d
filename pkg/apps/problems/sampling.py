"""
Fresh training sets from a template problem's data law.
"""
from apps.core_math.errors import InvalidArgument

from .datasets import Dataset


class ProblemSampler:
    """Draws S ~ D^n and binds it to the template's family and parameters."""

    def __init__(self, template, n):
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise InvalidArgument(f'n must be an integer >= 1, got {n!r}')
        self.template = template
        self.n = int(n)

    def __repr__(self):
        return f'ProblemSampler({self.template!r}, n={self.n})'

    @property
    def dim(self):
        return self.template.dim

    @property
    def L(self):
        return self.template.L

    def draw(self, rng):
        rows = self.template.draw_samples(rng, self.n)
        return self.template.with_dataset(Dataset(self.template.family, rows))

    def draw_samples(self, rng, size):
        return self.template.draw_samples(rng, size)
