"""Classifier-free guidance.

Functions:
    cfg_score: Combine conditional and unconditional noise predictions with a
        guidance weight.
"""

from __future__ import annotations

from typing import Protocol, Union

import numpy as np

from ..errors import UsageError
from ..numerics import Tensor, as_tensor, ops
from .denoiser import NULL_CONDITION

__all__ = (
    "Critic",
    "cfg_score",
)


class Critic(Protocol):
    """Anything that predicts noise like a Denoiser."""

    def predict(self, z_t: Tensor, t: np.ndarray, cond: np.ndarray) -> Tensor:
        ...


def cfg_score(
    den: Critic,
    z_t: Tensor,
    t: Union[int, np.ndarray],
    c: int,
    s: float,
) -> Tensor:
    """Return the guided prediction s * eps(z_t|c) + (1 - s) * eps(z_t|null).

    It is evaluated as eps_null + s * (eps_c - eps_null) so that equal
    conditional and unconditional predictions return eps_null unchanged for
    every s; s = 1 returns eps_c itself.

    Args:
        den: The critic.
        z_t: Noised latents, shape (d,) or (batch, d).
        t: A timestep or one per batch row.
        c: A real condition id.
        s: The guidance weight.

    Raises:
        UsageError: c is the null condition; use s = 0 for the unconditional
            prediction.
    """
    if c == NULL_CONDITION:
        raise UsageError("cfg_score needs a real condition; use s=0 for the null prediction")
    z_t = as_tensor(z_t)
    single = z_t.ndim == 1
    batch = z_t if not single else Tensor(z_t.data[None, :])
    t = np.atleast_1d(np.asarray(t, dtype=np.int64))
    eps_c = den.predict(batch, t, c)
    if s == 1.0:
        guided = eps_c
    else:
        eps_null = den.predict(batch, t, NULL_CONDITION)
        guided = ops.add(eps_null, ops.scale(ops.sub(eps_c, eps_null), s))
    return Tensor(guided.data[0]) if single else guided
