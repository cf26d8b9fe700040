"""Ancestral sampling from a guided denoiser.

Functions:
    ancestral_sample: Draw samples by running the reverse process from T to 1.
"""

from __future__ import annotations

import logging

import numpy as np

from ..numerics import Rng, Tensor, no_grad
from .guidance import Critic, cfg_score
from .schedule import NoiseSchedule

__all__ = ("ancestral_sample",)


def ancestral_sample(
    den: Critic, c: int, s: float, sched: NoiseSchedule, rng: Rng, n: int
) -> np.ndarray:
    """Sample n latents of condition c with guidance weight s.

    Each step uses the posterior mean
    (z_t - beta_t / sqrt(1 - abar_t) * eps_hat) / sqrt(alpha_t) and the
    posterior variance beta_t (1 - abar_{t-1}) / (1 - abar_t); no noise is
    added at t = 1.

    Returns: An array of shape (n, d).
    """
    d = den.data_dim
    if n == 0:
        return np.zeros((0, d))
    z = rng.normal((n, d))
    with no_grad():
        for t in range(sched.T, 0, -1):
            eps_hat = cfg_score(den, Tensor(z), np.full(n, t), c, s).data
            beta = sched.beta(t)
            alpha_bar = sched.alpha_bar(t)
            mean = (z - beta / np.sqrt(1.0 - alpha_bar) * eps_hat) / np.sqrt(sched.alpha(t))
            if t > 1:
                variance = beta * (1.0 - sched.alpha_bar_prev(t)) / (1.0 - alpha_bar)
                z = mean + np.sqrt(variance) * rng.normal((n, d))
            else:
                z = mean
            if t % 100 == 0:
                logging.trace("ancestral sampling at t=%d", t)
    return z
