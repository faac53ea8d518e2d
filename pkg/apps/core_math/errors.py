"""
Error vocabulary shared by every app.

invalid-argument, not-available, malformed-file and numerical-divergence
each map to one class; callers that only care about the standard library
category can keep catching ValueError / LookupError / ArithmeticError.
"""


class HeavyTailLabError(Exception):
    """Base class for every error raised on purpose by this project."""


class InvalidArgument(HeavyTailLabError, ValueError):
    pass


class NotAvailable(HeavyTailLabError, LookupError):
    pass


class MalformedFile(HeavyTailLabError):
    pass


class HashMismatch(MalformedFile):
    def __init__(self, expected, actual):
        super().__init__(f'content hash mismatch: stored={expected:#018x} computed={actual:#018x}')
        self.expected = expected
        self.actual = actual


class NumericalDivergence(HeavyTailLabError, ArithmeticError):
    """A run produced a non-finite iterate. `step` is the offending step index."""

    def __init__(self, step, algorithm=''):
        label = f'{algorithm} ' if algorithm else ''
        super().__init__(f'{label}iterate became non-finite at step {step}')
        self.step = step
        self.algorithm = algorithm


class ConfigError(InvalidArgument):
    """
    Experiment config failed validation.
    `errors` is a list of (dotted field path, message) pairs.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f'{path}: {message}' for path, message in self.errors]
        super().__init__('invalid experiment config\n' + '\n'.join(lines))
