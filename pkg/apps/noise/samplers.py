"""
Symmetric heavy-tailed noise families.

Multivariate draws are coordinate-wise i.i.d.

  gaussian                 scale * N(0, 1)
  symmetric_alpha_stable   characteristic function exp(-scale |w|^alpha),
                           drawn with the Chambers-Mallows-Stuck transform
  pareto_symmetric         Rademacher sign * scale * Pareto(alpha) magnitude
                           (support |x| >= scale, finite moments below alpha)
  student_t                scale * t(nu)
"""
import math
from dataclasses import dataclass

import numpy as np
from django.db import models
from scipy import special

from apps.core_math.errors import InvalidArgument, NotAvailable


class NoiseFamily(models.TextChoices):
    SYMMETRIC_ALPHA_STABLE = 'symmetric_alpha_stable', 'Symmetric alpha-stable'
    PARETO_SYMMETRIC = 'pareto_symmetric', 'Symmetric Pareto'
    STUDENT_T = 'student_t', 'Student t'
    GAUSSIAN = 'gaussian', 'Gaussian'


@dataclass(frozen=True)
class NoiseSpec:
    family: str
    tail_index: float = 2.0
    scale: float = 1.0
    dim: int = 1

    def __post_init__(self):
        try:
            family = NoiseFamily(self.family)
        except ValueError:
            raise InvalidArgument(
                f'unknown noise family {self.family!r}; expected one of {", ".join(NoiseFamily.values)}'
            ) from None
        object.__setattr__(self, 'family', family)
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise InvalidArgument(f'noise scale must be finite and > 0, got {self.scale!r}')
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise InvalidArgument(f'noise dim must be an integer >= 1, got {self.dim!r}')
        a = self.tail_index
        if family == NoiseFamily.SYMMETRIC_ALPHA_STABLE and not (0.0 < a <= 2.0):
            raise InvalidArgument(f'stable index alpha must lie in (0, 2], got {a!r}')
        if family == NoiseFamily.PARETO_SYMMETRIC and not (math.isfinite(a) and a > 1.0):
            raise InvalidArgument(f'Pareto index alpha must be > 1, got {a!r}')
        if family == NoiseFamily.STUDENT_T and not (a > 1.0):
            raise InvalidArgument(f'Student-t degrees of freedom must be > 1, got {a!r}')

    def with_dim(self, dim):
        return NoiseSpec(self.family, self.tail_index, self.scale, dim)

    def as_dict(self):
        return {
            'family': self.family.value,
            'tail_index': float(self.tail_index),
            'scale': float(self.scale),
            'dim': int(self.dim),
        }


def _stable(alpha, scale, rng, shape):
    v = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size=shape)
    w = rng.standard_exponential(size=shape)
    if alpha == 1.0:
        x = np.tan(v)
    else:
        x = (
            np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha)
        )
    return scale ** (1.0 / alpha) * x


def sample_many(spec, rng, size):
    """`size` independent draws, shape (size, dim)."""
    if isinstance(size, bool) or int(size) != size or size < 0:
        raise InvalidArgument(f'size must be a non-negative integer, got {size!r}')
    shape = (int(size), int(spec.dim))
    family = spec.family
    if family == NoiseFamily.GAUSSIAN:
        return spec.scale * rng.standard_normal(size=shape)
    if family == NoiseFamily.SYMMETRIC_ALPHA_STABLE:
        return _stable(float(spec.tail_index), spec.scale, rng, shape)
    if family == NoiseFamily.STUDENT_T:
        return spec.scale * rng.standard_t(spec.tail_index, size=shape)
    # numpy's pareto is Lomax; +1 gives the classical Pareto on [1, inf)
    magnitude = spec.scale * (rng.pareto(spec.tail_index, size=shape) + 1.0)
    return rng.rademacher(size=shape) * magnitude


def sample(spec, rng):
    return sample_many(spec, rng, 1)[0]


def moment_exists(spec, q):
    """Whether E|X|^q is finite for q > 0."""
    if not q > 0:
        raise InvalidArgument(f'q must be > 0, got {q!r}')
    if spec.family == NoiseFamily.GAUSSIAN:
        return True
    if spec.family == NoiseFamily.SYMMETRIC_ALPHA_STABLE and spec.tail_index == 2.0:
        return True
    return q < spec.tail_index


def characteristic_function(spec, omega):
    """E[cos(omega X)] for one coordinate (the laws are symmetric, so this is real)."""
    w = np.abs(np.asarray(omega, dtype=np.float64))
    if spec.family == NoiseFamily.SYMMETRIC_ALPHA_STABLE:
        return np.exp(-spec.scale * w ** spec.tail_index)
    if spec.family == NoiseFamily.GAUSSIAN:
        return np.exp(-0.5 * (spec.scale * w) ** 2)
    if spec.family == NoiseFamily.STUDENT_T:
        nu = float(spec.tail_index)
        z = np.sqrt(nu) * spec.scale * w
        with np.errstate(invalid='ignore'):
            value = special.kv(nu / 2.0, z) * z ** (nu / 2.0) / (special.gamma(nu / 2.0) * 2.0 ** (nu / 2.0 - 1.0))
        return np.where(z == 0.0, 1.0, value)
    raise NotAvailable(f'no closed-form characteristic function for {spec.family.value}')
