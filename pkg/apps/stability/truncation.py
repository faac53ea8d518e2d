"""
Truncation decomposition of gradient noise.

For centered noise samples X and a level tau:

    T = clip_tau(X),  M = mean(T),  T_tilde = T - M,  residual = X - T

and the two moment inequalities the generalization argument rests on:

    E||T_tilde||^2 <= tau^(2-p) sigma_p^p
    E||residual||  <= 2 sigma_p^p / tau^(p-1)

sigma_p is estimated from the same samples.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from apps.core_math.clipping import clip_rows
from apps.core_math.errors import InvalidArgument
from apps.noise.moments import estimate_p_moment

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TruncationDecomposition:
    tau: float
    p: float
    sigma_hat: float
    clipped_noise_second_moment: float
    residual_first_moment: float
    bound_a: float
    bound_b: float

    def holds(self, slack=0.1):
        return (
            self.clipped_noise_second_moment <= self.bound_a * (1.0 + slack)
            and self.residual_first_moment <= self.bound_b * (1.0 + slack)
        )

    def as_dict(self):
        return {
            'tau': self.tau,
            'p': self.p,
            'sigma_hat': self.sigma_hat,
            'clipped_noise_second_moment': self.clipped_noise_second_moment,
            'residual_first_moment': self.residual_first_moment,
            'bound_a': self.bound_a,
            'bound_b': self.bound_b,
        }


def truncation_check(noise_samples, tail, tau):
    if math.isnan(tau) or tau <= 0:
        raise InvalidArgument(f'tau must be > 0, got {tau!r}')
    X = np.asarray(noise_samples, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidArgument('need at least one noise sample')
    p = tail.p

    T = clip_rows(X, tau)
    T_tilde = T - T.mean(axis=0)
    second = float(np.mean(np.sum(T_tilde * T_tilde, axis=1)))
    residual = float(np.mean(np.linalg.norm(X - T, axis=1)))

    sigma_hat = estimate_p_moment(X, None, p)
    moment = sigma_hat ** p
    decomposition = TruncationDecomposition(
        tau=float(tau),
        p=p,
        sigma_hat=sigma_hat,
        clipped_noise_second_moment=second,
        residual_first_moment=residual,
        bound_a=float(tau) ** (2.0 - p) * moment,
        bound_b=2.0 * moment / float(tau) ** (p - 1.0),
    )
    logger.debug('truncation_check: tau=%.6g p=%.3f second=%.6g residual=%.6g', tau, p, second, residual)
    return decomposition
