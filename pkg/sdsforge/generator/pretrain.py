"""Matching a generator to the source distribution by MMD.

Functions:
    pretrain_generator: Train a fresh generator so its outputs match source
        samples under the unbiased Gaussian-kernel MMD^2.
    initial_bandwidth: The default pretraining kernel bandwidth.
"""

from __future__ import annotations

from typing import Optional
import logging

import numpy as np

from ..errors import ConfigurationError
from ..metrics.distances import MEDIAN_POOL, median_bandwidth, mmd_squared, mmd_squared_gradient
from ..numerics import Adam, Rng, Tape, Tensor, no_grad
from .network import StyleGenerator
from .settings import GeneratorSettings, PretrainSettings

__all__ = ("initial_bandwidth", "pretrain_generator")


MIN_SOURCE_SAMPLES = 500


def pretrain_generator(
    samples: np.ndarray,
    cfg: PretrainSettings,
    settings: Optional[GeneratorSettings] = None,
) -> StyleGenerator:
    """Train a generator on source samples.

    Every step draws a batch of latents and a batch of source samples, then
    injects the closed-form MMD^2 gradient at the generator output and takes an
    Adam step on every parameter. Unless set, the kernel bandwidth is the
    median heuristic over source samples pooled with outputs of the untrained
    generator, fixed for the whole run.

    Args:
        samples: Source samples, shape (n, d), n >= 500.
        cfg: Pretraining settings.
        settings: Architecture of the generator to train.

    Returns: The trained generator with every parameter frozen.

    Raises:
        ConfigurationError: Fewer than 500 samples, or samples whose dimension
            differs from the generator output.
    """
    settings = settings or GeneratorSettings()
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or len(samples) < MIN_SOURCE_SAMPLES:
        raise ConfigurationError(
            f"pretraining needs at least {MIN_SOURCE_SAMPLES} source samples, "
            f"got {len(samples)}",
            key="pretrain.samples",
        )
    if samples.shape[1] != settings.out_dim:
        raise ConfigurationError(
            f"source samples have dimension {samples.shape[1]}, "
            f"the generator produces {settings.out_dim}",
            key="generator.out_dim",
        )
    gen = StyleGenerator(settings).requires_grad_(True)
    rng = Rng(cfg.seed)
    bandwidth = cfg.bandwidth or initial_bandwidth(gen, samples, rng)
    optimizer = Adam(gen.parameters, cfg.lr)
    logging.info(
        "Pretraining generator for %d steps on %d source samples (bandwidth %.4g)",
        cfg.steps,
        len(samples),
        bandwidth,
    )
    for step in range(1, cfg.steps + 1):
        z = rng.normal((cfg.batch, settings.z_dim))
        reference = samples[rng.integers(len(samples), cfg.batch)]
        with Tape() as tape:
            x = gen(Tensor(z))
        tape.backward(x, mmd_squared_gradient(x.data, reference, bandwidth))
        optimizer.step()
        optimizer.zero_grad()
        if step % cfg.log_every == 0 or step == cfg.steps:
            logging.info(
                "pretrain step %d MMD^2 %.6f", step, mmd_squared(x.data, reference, bandwidth)
            )
    return gen.requires_grad_(False)


def initial_bandwidth(gen: StyleGenerator, samples: np.ndarray, rng: Rng) -> float:
    """Return the median heuristic over source samples and untrained outputs."""
    half = MEDIAN_POOL // 2
    with no_grad():
        initial = gen(Tensor(rng.normal((half, gen.settings.z_dim)))).data
    return median_bandwidth(samples[:half], initial)
