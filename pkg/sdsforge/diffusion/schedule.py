"""The forward noising process.

Classes:
    NoiseSchedule: Betas, alphas and cumulative alpha products indexed by
        timesteps 1..T.

Functions:
    make_linear_schedule: Build a schedule with linearly spaced betas.
    q_sample: Noise a clean latent to timestep t.
    tweedie_z0: Recover the clean-latent estimate from a noise prediction.
"""

from __future__ import annotations

from typing import Union
import dataclasses

import numpy as np

from ..errors import ConfigurationError, ShapeError, UsageError
from ..numerics import Tensor, as_tensor, ops

__all__ = (
    "NoiseSchedule",
    "make_linear_schedule",
    "q_sample",
    "tweedie_z0",
)


Timesteps = Union[int, np.ndarray]


@dataclasses.dataclass(frozen=True)
class NoiseSchedule:
    """Forward-process constants.

    The arrays are stored 0-based; timestep t lives at index t - 1. Use the
    accessor methods, which take 1-based timesteps and check their range.
    """

    T: int
    betas: np.ndarray
    alphas: np.ndarray
    alpha_bars: np.ndarray

    def _index(self, t: Timesteps) -> np.ndarray:
        t = np.asarray(t, dtype=np.int64)
        if t.size and (t.min() < 1 or t.max() > self.T):
            raise UsageError(f"timestep out of range [1, {self.T}]: {t}")
        return t - 1

    def beta(self, t: Timesteps) -> Union[float, np.ndarray]:
        return self.betas[self._index(t)]

    def alpha(self, t: Timesteps) -> Union[float, np.ndarray]:
        return self.alphas[self._index(t)]

    def alpha_bar(self, t: Timesteps) -> Union[float, np.ndarray]:
        return self.alpha_bars[self._index(t)]

    def alpha_bar_prev(self, t: Timesteps) -> Union[float, np.ndarray]:
        """Return the cumulative product at t - 1, with 1 at t = 1."""
        index = self._index(t)
        padded = np.concatenate([[1.0], self.alpha_bars])
        return padded[index]


def make_linear_schedule(
    T: int = 1000, beta_start: float = 1e-4, beta_end: float = 0.02
) -> NoiseSchedule:
    """Build a schedule whose betas are linear from beta_start to beta_end.

    Raises:
        ConfigurationError: T < 2 or the betas are not 0 < start <= end < 1.
    """
    if T < 2:
        raise ConfigurationError(f"T must be at least 2, got {T}", key="T")
    if not 0.0 < beta_start <= beta_end < 1.0:
        raise ConfigurationError(
            f"betas must satisfy 0 < beta_start <= beta_end < 1, "
            f"got ({beta_start}, {beta_end})",
            key="beta_start",
        )
    betas = np.linspace(beta_start, beta_end, T)
    alphas = 1.0 - betas
    alpha_bars = np.cumprod(alphas)
    for array in (betas, alphas, alpha_bars):
        array.setflags(write=False)
    return NoiseSchedule(T, betas, alphas, alpha_bars)


def _coefficient(values: Union[float, np.ndarray], shape: tuple[int, ...]) -> Tensor:
    """Lay per-sample coefficients out over a (batch, dim) or (dim,) shape."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 0:
        return Tensor(np.full(shape, float(values)))
    if len(shape) != 2 or values.shape != (shape[0],):
        raise ShapeError(f"timesteps of shape {values.shape} do not match latents {shape}")
    return Tensor(np.broadcast_to(values[:, None], shape))


def q_sample(z0: Tensor, t: Timesteps, eps: Tensor, sched: NoiseSchedule) -> Tensor:
    """Noise z0 to timestep t: sqrt(abar_t) z0 + sqrt(1 - abar_t) eps.

    Args:
        z0: Clean latents of shape (d,) or (batch, d).
        t: A timestep, or one timestep per batch row.
        eps: Standard normal noise with the shape of z0.
        sched: The noise schedule.

    Returns: The noised latents, recorded on the active tape if z0 or eps
        require gradients.
    """
    z0, eps = as_tensor(z0), as_tensor(eps)
    if z0.shape != eps.shape:
        raise ShapeError(f"q_sample: z0 shape {z0.shape} differs from eps shape {eps.shape}")
    alpha_bar = sched.alpha_bar(t)
    signal = _coefficient(np.sqrt(alpha_bar), z0.shape)
    noise = _coefficient(np.sqrt(1.0 - alpha_bar), z0.shape)
    return ops.add(ops.mul(signal, z0), ops.mul(noise, eps))


def tweedie_z0(z_t: Tensor, eps_hat: Tensor, t: Timesteps, sched: NoiseSchedule) -> Tensor:
    """Estimate the clean latent: (z_t - sqrt(1 - abar_t) eps_hat) / sqrt(abar_t)."""
    z_t, eps_hat = as_tensor(z_t), as_tensor(eps_hat)
    if z_t.shape != eps_hat.shape:
        raise ShapeError(
            f"tweedie_z0: z_t shape {z_t.shape} differs from eps_hat shape {eps_hat.shape}"
        )
    alpha_bar = sched.alpha_bar(t)
    noise = _coefficient(np.sqrt(1.0 - alpha_bar), z_t.shape)
    inverse = _coefficient(1.0 / np.sqrt(alpha_bar), z_t.shape)
    return ops.mul(inverse, ops.sub(z_t, ops.mul(noise, eps_hat)))
