"""
Vectors, the clipping operator and the normalization rule.

clip_gamma(u) = u when ||u|| <= gamma, else gamma * u / ||u||.
Every function returns a fresh float64 array; inputs are never mutated.
"""
import math

import numpy as np

from .errors import InvalidArgument


def as_vector(u, name='u'):
    """Return `u` as a 1-d float64 array, rejecting empty or non-finite input."""
    arr = np.array(u, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidArgument(f'{name} must be a non-empty vector, got shape {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f'{name} has non-finite components')
    return arr


def _check_threshold(gamma):
    # +inf is allowed and means "never clip"
    if not isinstance(gamma, (int, float, np.floating, np.integer)) or math.isnan(gamma) or gamma <= 0:
        raise InvalidArgument(f'clipping threshold must be > 0, got {gamma!r}')
    return float(gamma)


def norm(u):
    return float(np.linalg.norm(u))


def clip(u, gamma):
    gamma = _check_threshold(gamma)
    u = as_vector(u)
    size = norm(u)
    if not math.isfinite(size):
        raise InvalidArgument('norm of u overflows float64')
    # Covers u = 0 without ever forming 0/0.
    if size <= gamma:
        return u
    return (gamma / size) * u


def clip_rows(U, gamma):
    """Clip every row of a (k, d) matrix independently."""
    gamma = _check_threshold(gamma)
    U = np.array(U, dtype=np.float64)
    if U.ndim != 2:
        raise InvalidArgument(f'expected a (k, d) matrix, got shape {U.shape}')
    if not np.all(np.isfinite(U)):
        raise InvalidArgument('matrix has non-finite entries')
    sizes = np.linalg.norm(U, axis=1)
    scale = np.ones_like(sizes)
    over = sizes > gamma
    scale[over] = gamma / sizes[over]
    return U * scale[:, None]


def normalize(v):
    """
    v / ||v||, with the zero-direction rule: a zero vector maps to zero.
    Returns (direction, ||v||).
    """
    v = np.asarray(v, dtype=np.float64)
    size = norm(v)
    if size == 0.0:
        return np.zeros_like(v), 0.0
    return v / size, size


def normalized_inner_product(u, v):
    """<u, v/||v||>; v must be non-zero."""
    u = as_vector(u)
    v = as_vector(v, name='v')
    size = norm(v)
    if size == 0.0:
        raise InvalidArgument('v must be non-zero')
    return float(np.dot(u, v / size))
