"""Gradient seeds injected at the generated latent.

None of these functions differentiates through the critic: each returns a
plain array that is used as the adjoint of the trainable branch's clean
latent. Inputs may be single latents of shape (d,) with a scalar timestep or
batches of shape (batch, d) with one timestep per row; normalization is per
row.

Classes:
    GuidanceScores: The guided predictions of both branches for one step.

Functions:
    timestep_weight: The distillation weight w_t.
    sds_gradient: w_t (eps_hat - eps).
    normalize: Rescale rows to norm r.
    directional_gradient: Normalized difference of the two branches' scores.
    reconstruction_score_gradient: Closed-form gradient of the reconstruction
        loss with respect to the predicted noise.
    reconstruction_gradient: Normalized difference between the trainable
        score and the reconstruction gradient.
"""

from __future__ import annotations

from typing import Any, Union
import dataclasses
import logging
import math

import numpy as np

from ..diffusion import NoiseSchedule, tweedie_z0
from ..errors import DegenerateScoreError, ShapeError
from ..numerics import Tensor, no_grad
from .settings import SDSConfig

__all__ = (
    "GuidanceScores",
    "directional_gradient",
    "normalize",
    "reconstruction_gradient",
    "reconstruction_score_gradient",
    "sds_gradient",
    "timestep_weight",
)


MIN_SCORE_NORM = 1e-12

Timesteps = Union[int, np.ndarray]


def _array(value: Any) -> np.ndarray:
    return value.data if isinstance(value, Tensor) else np.asarray(value, dtype=np.float64)


def _per_row(values: np.ndarray, like: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    return values[:, None] if like.ndim == 2 and values.ndim == 1 else values


@dataclasses.dataclass(frozen=True, eq=False)
class GuidanceScores:
    """Guided noise predictions of the trainable and frozen branches.

    Attributes:
        eps_hat_train: Prediction at the trainable branch's noised latent.
        eps_hat_frozen: Prediction at the frozen branch's noised latent.
        t: Timesteps of the trainable branch.
        eps: Noise of the trainable branch.
        t_frozen: Timesteps of the frozen branch; equal to t when noise is
            shared.
        eps_frozen: Noise of the frozen branch.
    """

    eps_hat_train: np.ndarray
    eps_hat_frozen: np.ndarray
    t: np.ndarray
    eps: np.ndarray
    t_frozen: np.ndarray
    eps_frozen: np.ndarray


def timestep_weight(t: Timesteps, sched: NoiseSchedule, cfg: SDSConfig) -> np.ndarray:
    """Return 1 - abar_t, or ones under the `constant` weighting."""
    t = np.asarray(t)
    if cfg.weighting == "constant":
        return np.ones(t.shape)
    return 1.0 - np.asarray(sched.alpha_bar(t))


def sds_gradient(
    eps_hat: Any, eps: Any, t: Timesteps, sched: NoiseSchedule, cfg: SDSConfig
) -> np.ndarray:
    """Return w_t (eps_hat - eps)."""
    eps_hat, eps = _array(eps_hat), _array(eps)
    if eps_hat.shape != eps.shape:
        raise ShapeError(f"eps_hat shape {eps_hat.shape} differs from eps shape {eps.shape}")
    return _per_row(timestep_weight(t, sched, cfg), eps_hat) * (eps_hat - eps)


def normalize(v: Any, r: float) -> np.ndarray:
    """Scale each row of v to norm r.

    Raises:
        DegenerateScoreError: A row has norm at most 1e-12.
    """
    v = _array(v)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    if (norms <= MIN_SCORE_NORM).any():
        raise DegenerateScoreError(f"score norm {norms.min():.3g} is too small to normalize")
    return r * v / norms


def _normalized_difference(u: Any, v: Any, r: float, what: str) -> np.ndarray:
    """Return normalize(u, r) - normalize(v, r) with degenerate rows zeroed.

    A batch row where either operand has norm at most 1e-12 contributes zero.

    Raises:
        DegenerateScoreError: A single latent, or every row of a batch, is
            degenerate.
    """
    u, v = _array(u), _array(v)
    if u.ndim == 1:
        return normalize(u, r) - normalize(v, r)
    usable = (np.linalg.norm(u, axis=-1) > MIN_SCORE_NORM) & (
        np.linalg.norm(v, axis=-1) > MIN_SCORE_NORM
    )
    if not usable.any():
        raise DegenerateScoreError(f"{what}: every row has a (near) zero score norm")
    out = np.zeros(np.broadcast_shapes(u.shape, v.shape))
    out[usable] = normalize(u[usable], r) - normalize(v[usable], r)
    if not usable.all():
        logging.debug("%s: masked %d degenerate rows", what, int((~usable).sum()))
    return out


def directional_gradient(scores: GuidanceScores, d_latent: int) -> np.ndarray:
    """Return r (eps_hat_train / |eps_hat_train| - eps_hat_frozen / |eps_hat_frozen|).

    r = sqrt(d_latent). Batch rows where either score has (near) zero norm
    are zero.

    Raises:
        DegenerateScoreError: Either score has (near) zero norm for a single
            latent or for every row of a batch.
    """
    r = math.sqrt(d_latent)
    return _normalized_difference(scores.eps_hat_train, scores.eps_hat_frozen, r, "directional")


def reconstruction_score_gradient(
    z_t: Any, eps_hat: Any, z0_frozen: Any, t: Timesteps, sched: NoiseSchedule
) -> np.ndarray:
    """Return the gradient of ||tweedie_z0(z_t, eps_hat) - z0_frozen||^2 in eps_hat.

    It equals -(2 sqrt(1 - abar_t) / sqrt(abar_t)) (z0_hat - z0_frozen).
    """
    z_t, eps_hat, z0_frozen = _array(z_t), _array(eps_hat), _array(z0_frozen)
    with no_grad():
        z0_hat = tweedie_z0(Tensor(z_t), Tensor(eps_hat), t, sched).data
    alpha_bar = np.asarray(sched.alpha_bar(t), dtype=np.float64)
    coefficient = 2.0 * np.sqrt(1.0 - alpha_bar) / np.sqrt(alpha_bar)
    return -_per_row(coefficient, z0_hat) * (z0_hat - z0_frozen)


def reconstruction_gradient(
    scores: GuidanceScores,
    z_t_train: Any,
    z0_frozen: Any,
    t: Timesteps,
    sched: NoiseSchedule,
    d_latent: int,
) -> np.ndarray:
    """Return r (eps_hat_train / |eps_hat_train| - g / |g|).

    g is the reconstruction-loss gradient in the predicted noise, evaluated at
    the trainable branch's Tweedie estimate against the frozen clean latent.
    Batch rows where either operand has (near) zero norm are zero.

    Raises:
        DegenerateScoreError: The Tweedie estimate equals the frozen latent,
            or the trainable score has (near) zero norm, for a single latent
            or for every row of a batch.
    """
    r = math.sqrt(d_latent)
    g = reconstruction_score_gradient(z_t_train, scores.eps_hat_train, z0_frozen, t, sched)
    return _normalized_difference(scores.eps_hat_train, g, r, "reconstruction")
