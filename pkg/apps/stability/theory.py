"""
Term-by-term population-gradient bounds of the four algorithms.

Every bound is a sum of optimization terms, one stability term (four times
the uniform stability bound) and the noise moment term C_p sigma_p n^(-(p-1)/p).
"""
import math
from dataclasses import dataclass, field

from apps.core_math.constants import moment_term
from apps.core_math.errors import InvalidArgument
from apps.core_math.params import Algorithm, parse_algorithm

OPTIMIZATION = 'optimization'
STABILITY = 'stability'
MOMENT = 'moment'


@dataclass(frozen=True)
class BoundTerm:
    name: str
    category: str
    value: float


@dataclass(frozen=True)
class BoundBreakdown:
    algorithm: str
    n: int
    terms: tuple = field(default_factory=tuple)

    @property
    def total(self):
        return math.fsum(term.value for term in self.terms)

    def term(self, name):
        for term in self.terms:
            if term.name == name:
                return term.value
        raise KeyError(name)

    def by_category(self, category):
        return math.fsum(term.value for term in self.terms if term.category == category)

    def as_dict(self):
        return {
            'algorithm': self.algorithm,
            'n': self.n,
            'terms': [{'name': t.name, 'category': t.category, 'value': t.value} for t in self.terms],
            'optimization': self.by_category(OPTIMIZATION),
            'stability': self.by_category(STABILITY),
            'moment': self.by_category(MOMENT),
            'total': self.total,
        }


def _descent(Delta, eta, T):
    # Delta / (eta T) with 0 / 0 read as 0
    if Delta == 0.0:
        return 0.0
    if eta == 0.0:
        return math.inf
    return Delta / (eta * T)


def _clip_bias(G, gamma, p):
    if math.isinf(gamma):
        return 0.0
    return G ** p * gamma ** (1.0 - p)


def theoretical_report(algorithm, schedule, theory, tail, n):
    algorithm = parse_algorithm(algorithm)
    schedule.validate_for(algorithm)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgument(f'n must be an integer >= 1, got {n!r}')
    n = int(n)
    p = tail.p
    L, G, Delta = theory.L, theory.G, theory.Delta
    T, eta = schedule.T, schedule.eta
    q = (p - 1.0) / p

    if algorithm == Algorithm.CLIPPED_SGD:
        gamma = schedule.gamma
        terms = [
            BoundTerm('descent', OPTIMIZATION, math.sqrt(2.0 * _descent(Delta, eta, T))),
            BoundTerm('clip_bias', OPTIMIZATION, _clip_bias(G, gamma, p)),
            BoundTerm('smoothness', OPTIMIZATION, math.sqrt(L * eta * G ** p * gamma ** (2.0 - p))),
            BoundTerm('stability', STABILITY, 8.0 * L * gamma * eta * T * math.sqrt(T / n)),
        ]
    elif algorithm == Algorithm.NSGD_B:
        B = schedule.B
        terms = [
            BoundTerm('descent', OPTIMIZATION, _descent(Delta, eta, T)),
            BoundTerm('smoothness', OPTIMIZATION, L * eta / 2.0),
            BoundTerm('batch_noise', OPTIMIZATION, 4.0 * G * B ** (-q)),
            BoundTerm('stability', STABILITY, 8.0 * L * eta * T * math.sqrt(B * T / n)),
        ]
    else:
        beta = schedule.beta
        terms = [
            BoundTerm('descent', OPTIMIZATION, _descent(Delta, eta, T)),
            BoundTerm('smoothness', OPTIMIZATION, L * eta / 2.0),
        ]
        if algorithm == Algorithm.NSGD_M:
            terms.append(BoundTerm('momentum_drift', OPTIMIZATION, 2.0 * L * eta * beta / (1.0 - beta)))
        else:
            terms.append(BoundTerm('momentum_drift', OPTIMIZATION, 2.0 * L * eta / (1.0 - beta)))
            terms.append(BoundTerm('clip_bias', OPTIMIZATION, 2.0 * _clip_bias(G, schedule.gamma, p)))
        terms += [
            BoundTerm('momentum_noise', OPTIMIZATION, 8.0 * G * (1.0 - beta) ** q),
            BoundTerm('initial_momentum', OPTIMIZATION, 4.0 * G / T),
            BoundTerm('momentum_bias', OPTIMIZATION, 4.0 * G * beta / ((1.0 - beta) * T)),
            BoundTerm('stability', STABILITY, 8.0 * L * eta * T * math.sqrt(T / n)),
        ]

    terms.append(BoundTerm('moment', MOMENT, moment_term(tail, n)))
    return BoundBreakdown(algorithm=algorithm.value, n=n, terms=tuple(terms))
