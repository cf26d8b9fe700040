"""One adaptation step: score distillation with optional regularizers.

Classes:
    NoiseDraw: Timesteps and noise for one batch.
    AdaptationState: Everything an adaptation run owns between steps.
    StepMetrics: Component gradient norms of one step.

Functions:
    sample_timestep: Draw one timestep from the configured range.
    sample_timesteps: Draw one timestep per batch row.
    draw_noise: Draw timesteps and noise for a batch.
    guidance_scores: Evaluate the critic on both branches.
    adaptation_step: Run one step and update the selected layers.
"""

from __future__ import annotations

from typing import Optional
import dataclasses
import logging

import numpy as np

from ..diffusion import Critic, NoiseSchedule, cfg_score, q_sample
from ..errors import ConfigurationError, DegenerateScoreError, NumericError
from ..generator import LatentEncoder, StyleGenerator, encode
from ..numerics import Adam, Rng, Tape, Tensor, no_grad
from .gradients import (
    GuidanceScores,
    directional_gradient,
    reconstruction_gradient,
    sds_gradient,
)
from .settings import SDSConfig

__all__ = (
    "AdaptationState",
    "NoiseDraw",
    "StepMetrics",
    "adaptation_step",
    "draw_noise",
    "guidance_scores",
    "sample_timestep",
    "sample_timesteps",
)


@dataclasses.dataclass(frozen=True, eq=False)
class NoiseDraw:
    t: np.ndarray
    eps: np.ndarray


def sample_timesteps(rng: Rng, cfg: SDSConfig, n: int) -> np.ndarray:
    """Draw n timesteps uniformly from the integers in (t_min, t_max].

    Raises:
        ConfigurationError: The range is empty.
    """
    span = cfg.t_max - cfg.t_min
    if span < 1:
        raise ConfigurationError(
            f"sds.t_min: the range ({cfg.t_min}, {cfg.t_max}] is empty", key="sds.t_min"
        )
    return cfg.t_min + 1 + rng.integers(span, n)


def sample_timestep(rng: Rng, cfg: SDSConfig) -> int:
    return int(sample_timesteps(rng, cfg, 1)[0])


def draw_noise(rng: Rng, cfg: SDSConfig, shape: tuple[int, int]) -> NoiseDraw:
    """Draw one timestep per row and then standard normal noise of `shape`."""
    t = sample_timesteps(rng, cfg, shape[0])
    return NoiseDraw(t, rng.normal(shape))


@dataclasses.dataclass
class AdaptationState:
    """The state of one adaptation run.

    Attributes:
        generator: The generator being adapted.
        frozen: A frozen snapshot of the generator before adaptation.
        encoder: The fixed latent encoder.
        critic: The frozen denoiser.
        schedule: The noise schedule.
        optimizer: Adam over every adaptable generator parameter.
        layers: The 1-based synthesis layers currently adapted.
        iteration: Completed steps.
    """

    generator: StyleGenerator
    frozen: StyleGenerator
    encoder: LatentEncoder
    critic: Critic
    schedule: NoiseSchedule
    optimizer: Adam
    layers: tuple[int, ...]
    iteration: int = 0

    @classmethod
    def create(
        cls,
        generator: StyleGenerator,
        frozen: StyleGenerator,
        encoder: LatentEncoder,
        critic: Critic,
        schedule: NoiseSchedule,
        cfg: SDSConfig,
        layers: tuple[int, ...],
    ) -> AdaptationState:
        state = cls(
            generator,
            frozen,
            encoder,
            critic,
            schedule,
            Adam(generator.adaptable_parameters(), cfg.lr),
            (),
        )
        state.select(layers)
        return state

    def select(self, layers: tuple[int, ...]) -> None:
        """Unfreeze exactly the adaptable parameters of the given layers."""
        self.layers = tuple(layers)
        self.generator.set_trainable(
            name for layer in self.layers for name in self.generator.layer_parameter_names(layer)
        )

    @property
    def trainable_names(self) -> tuple[str, ...]:
        return self.generator.trainable_names()


@dataclasses.dataclass(frozen=True)
class StepMetrics:
    """Norms of the unweighted gradient components of one step.

    Each norm is the batch mean of the per-sample L2 norms. A regularizer that
    is disabled or skipped reports 0 and is listed in `skipped` when skipped.
    """

    iteration: int
    g_sds: float
    g_dir: float
    g_rec: float
    skipped: tuple[str, ...] = ()


def _mean_norm(g: Optional[np.ndarray]) -> float:
    if g is None:
        return 0.0
    return float(np.linalg.norm(g, axis=-1).mean())


def guidance_scores(
    critic: Critic,
    z0_train: np.ndarray,
    z0_frozen: np.ndarray,
    noise: NoiseDraw,
    frozen_noise: NoiseDraw,
    sched: NoiseSchedule,
    cfg: SDSConfig,
) -> tuple[GuidanceScores, np.ndarray]:
    """Noise both branches and evaluate the guided critic on each.

    Returns: The scores and the trainable branch's noised latent.
    """
    with no_grad():
        z_t_train = q_sample(Tensor(z0_train), noise.t, Tensor(noise.eps), sched)
        z_t_frozen = q_sample(Tensor(z0_frozen), frozen_noise.t, Tensor(frozen_noise.eps), sched)
        eps_hat_train = cfg_score(critic, z_t_train, noise.t, cfg.target, cfg.s).data
        eps_hat_frozen = cfg_score(critic, z_t_frozen, frozen_noise.t, cfg.target, cfg.s).data
    scores = GuidanceScores(
        eps_hat_train,
        eps_hat_frozen,
        noise.t,
        noise.eps,
        frozen_noise.t,
        frozen_noise.eps,
    )
    return scores, z_t_train.data


def adaptation_step(state: AdaptationState, cfg: SDSConfig, rng: Rng) -> StepMetrics:
    """Run one adaptation step.

    The step draws latents, then the trainable branch's timesteps and noise,
    then (only when noise is not shared) the frozen branch's. The total seed

        sds + lambda_dir * directional + lambda_rec * reconstruction

    divided by the batch size is backpropagated from the trainable branch's
    clean latent, and Adam updates the selected layers. A regularizer whose
    scores cannot be normalized is skipped for the step with a warning.

    Raises:
        NumericError: A generator parameter became non-finite.
    """
    iteration = state.iteration + 1
    gen = state.generator
    z = rng.normal((cfg.batch, gen.settings.z_dim))
    with Tape() as tape:
        z0_train = encode(state.encoder, gen(Tensor(z)))
    with no_grad():
        z0_frozen = encode(state.encoder, state.frozen(Tensor(z))).data
    d_latent = z0_train.shape[1]
    noise = draw_noise(rng, cfg, z0_train.shape)
    frozen_noise = noise if cfg.share_noise else draw_noise(rng, cfg, z0_train.shape)
    scores, z_t_train = guidance_scores(
        state.critic, z0_train.data, z0_frozen, noise, frozen_noise, state.schedule, cfg
    )

    g_sds = sds_gradient(scores.eps_hat_train, noise.eps, noise.t, state.schedule, cfg)
    seed = g_sds.copy()
    g_dir = g_rec = None
    skipped = []
    if cfg.lambda_dir > 0:
        try:
            g_dir = directional_gradient(scores, d_latent)
            seed += cfg.lambda_dir * g_dir
        except DegenerateScoreError as e:
            logging.warning("iteration %d: skipping directional regularizer: %s", iteration, e)
            skipped.append("dir")
    if cfg.lambda_rec > 0:
        try:
            g_rec = reconstruction_gradient(
                scores, z_t_train, z0_frozen, noise.t, state.schedule, d_latent
            )
            seed += cfg.lambda_rec * g_rec
        except DegenerateScoreError as e:
            logging.warning(
                "iteration %d: skipping reconstruction regularizer: %s", iteration, e
            )
            skipped.append("rec")

    tape.backward(z0_train, seed / cfg.batch)
    state.optimizer.step(state.trainable_names)
    state.optimizer.zero_grad()
    for name in state.trainable_names:
        if not np.isfinite(gen.parameters[name].data).all():
            raise NumericError(f"parameter {name} is not finite", iteration=iteration)
    state.iteration = iteration
    metrics = StepMetrics(
        iteration, _mean_norm(g_sds), _mean_norm(g_dir), _mean_norm(g_rec), tuple(skipped)
    )
    logging.trace(
        "step %d: |g_sds| %.4g |g_dir| %.4g |g_rec| %.4g",
        iteration,
        metrics.g_sds,
        metrics.g_dir,
        metrics.g_rec,
    )
    return metrics
