"""Ranking synthesis layers by how far score distillation moves their codes.

Classes:
    LayerRanking: Selected layers and per-layer code movement.

Functions:
    select_layers: Optimize W+ codes against the critic and rank the layers.
"""

from __future__ import annotations

import dataclasses
import logging

import numpy as np

from ..diffusion import Critic, NoiseSchedule, cfg_score, q_sample
from ..generator import LatentEncoder, StyleCodes, StyleGenerator, encode, snapshot_frozen
from ..numerics import Adam, Rng, Tape, Tensor, no_grad
from .engine import draw_noise
from .gradients import sds_gradient
from .settings import SDSConfig

__all__ = (
    "LayerRanking",
    "select_layers",
)


@dataclasses.dataclass(frozen=True)
class LayerRanking:
    """The outcome of layer selection.

    Attributes:
        layers: The k selected 1-based layers, most moved first.
        magnitudes: Mean code movement per layer, indexed by layer - 1.
        order: Every layer, most moved first.
    """

    layers: tuple[int, ...]
    magnitudes: tuple[float, ...]
    order: tuple[int, ...]


def select_layers(
    gen: StyleGenerator,
    critic: Critic,
    encoder: LatentEncoder,
    sched: NoiseSchedule,
    cfg: SDSConfig,
    rng: Rng,
) -> LayerRanking:
    """Rank layers by the movement of their W+ codes under score distillation.

    Codes for `cfg.select_batch` latents start at the mapped style and receive
    `cfg.n_select` Adam steps on the distillation gradient while every
    network parameter stays fixed. Layer l scores the batch mean of
    ||w_l - w_l_initial||; ties go to the shallower layer.

    Raises:
        ConfigurationError: k exceeds the number of layers.
    """
    k = cfg.layer_count(gen.layers)
    frozen = snapshot_frozen(gen)
    z = rng.normal((cfg.select_batch, gen.settings.z_dim))
    with no_grad():
        start = frozen.map_latent(Tensor(z))
    codes = StyleCodes(tuple(Tensor(slot.data, requires_grad=True) for slot in start.slots))
    optimizer = Adam(
        {f"w.{layer}": codes[layer] for layer in range(1, gen.layers + 1)}, cfg.select_lr
    )
    for _ in range(cfg.n_select):
        with Tape() as tape:
            z0 = encode(encoder, frozen.synthesize(codes))
        noise = draw_noise(rng, cfg, z0.shape)
        with no_grad():
            z_t = q_sample(Tensor(z0.data), noise.t, Tensor(noise.eps), sched)
            eps_hat = cfg_score(critic, z_t, noise.t, cfg.target, cfg.s).data
        seed = sds_gradient(eps_hat, noise.eps, noise.t, sched, cfg) / cfg.select_batch
        tape.backward(z0, seed)
        optimizer.step()
        optimizer.zero_grad()
    magnitudes = tuple(
        float(np.linalg.norm(codes[layer].data - start[layer].data, axis=-1).mean())
        for layer in range(1, gen.layers + 1)
    )
    order = tuple(sorted(range(1, gen.layers + 1), key=lambda l: (-magnitudes[l - 1], l)))
    logging.info(
        "Layer ranking %s (movement %s)",
        ", ".join(map(str, order)),
        ", ".join(f"{m:.4g}" for m in magnitudes),
    )
    return LayerRanking(order[:k], magnitudes, order)
