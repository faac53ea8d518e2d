"""
Deterministic random streams.

A SeededRng is identified by (seed, stream). Both are unsigned 64-bit
integers and together fully determine the sample sequence: the generator
is numpy's counter-based Philox keyed by SeedSequence(seed, spawn_key=(stream,)),
so the bytes do not depend on platform or on how many other streams exist.

Named children come from spawn(label); the child stream id is the first
eight bytes of sha256("seed:stream:label").
"""
import hashlib

import numpy as np

from apps.core_math.errors import InvalidArgument

_U64 = 2 ** 64


def _hash_to_u64(text):
    digest = hashlib.sha256(text.encode('ascii')).digest()
    return int.from_bytes(digest[:8], 'big', signed=False)


def _check_u64(value, name):
    if isinstance(value, bool) or int(value) != value or not (0 <= value < _U64):
        raise InvalidArgument(f'{name} must be an unsigned 64-bit integer, got {value!r}')
    return int(value)


class SeededRng:
    """Single-owner random stream. Use spawn() to hand streams to other workers."""

    def __init__(self, seed, stream=0):
        self.seed = _check_u64(seed, 'seed')
        self.stream = _check_u64(stream, 'stream')
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def __repr__(self):
        return f'SeededRng(seed={self.seed}, stream={self.stream})'

    def spawn(self, label):
        """Child stream derived from this one's identity, not from its state."""
        if label is None or str(label) == '':
            raise InvalidArgument('stream label must be non-empty')
        return SeededRng(self.seed, _hash_to_u64(f'{self.seed}:{self.stream}:{label}'))

    def replay(self):
        """A fresh stream with the same identity (restarts the sequence)."""
        return SeededRng(self.seed, self.stream)

    def as_dict(self):
        return {'seed': self.seed, 'stream': self.stream}

    # Thin passthroughs so callers never reach into the generator.

    def integers(self, low, high, size=None):
        return self.generator.integers(low, high, size=size, dtype=np.int64)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size=size)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size=size)

    def standard_exponential(self, size=None):
        return self.generator.standard_exponential(size=size)

    def standard_t(self, df, size=None):
        return self.generator.standard_t(df, size=size)

    def pareto(self, a, size=None):
        return self.generator.pareto(a, size=size)

    def rademacher(self, size=None):
        return 2.0 * self.generator.integers(0, 2, size=size) - 1.0

