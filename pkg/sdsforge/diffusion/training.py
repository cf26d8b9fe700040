"""Training the conditional denoiser.

Functions:
    denoiser_loss: The simplified denoising objective on one batch, with
        random condition dropping.
    train_denoiser: Fit a Denoiser to labeled samples with Adam.
"""

from __future__ import annotations

import logging

import numpy as np

from ..distributions import LabeledSamples
from ..errors import ConfigurationError
from ..numerics import Adam, Rng, Tape, Tensor, ops
from .denoiser import NULL_CONDITION, Denoiser
from .schedule import NoiseSchedule, q_sample
from .settings import DenoiserTrainConfig

__all__ = (
    "denoiser_loss",
    "train_denoiser",
)


def denoiser_loss(
    den: Denoiser,
    z0_batch: Tensor,
    cond: np.ndarray,
    sched: NoiseSchedule,
    rng: Rng,
    p_uncond: float = 0.1,
) -> Tensor:
    """Return the batch mean of ||eps_theta(z_t | c, t) - eps||^2.

    Draws happen in a fixed order: timesteps uniform on 1..T, then the noise,
    then one uniform per sample deciding whether its condition is replaced by
    the null condition (probability p_uncond). The timestep weight is 1.

    Args:
        den: The denoiser being trained.
        z0_batch: Clean latents, shape (batch, d).
        cond: Condition ids, shape (batch,).
        sched: The noise schedule.
        rng: Source of the timestep, noise and dropping draws.
        p_uncond: Probability of dropping each sample's condition.

    Returns: A scalar tensor.
    """
    batch = z0_batch.shape[0]
    t = 1 + rng.integers(sched.T, batch)
    eps = rng.normal(z0_batch.shape)
    dropped = rng.uniform(batch) < p_uncond
    cond = np.where(dropped, NULL_CONDITION, np.asarray(cond, dtype=np.int64))
    z_t = q_sample(z0_batch, t, Tensor(eps), sched)
    residual = ops.sub(den.predict(z_t, t, cond), Tensor(eps))
    return ops.scale(ops.sum(ops.mul(residual, residual)), 1.0 / batch)


def train_denoiser(
    dataset: LabeledSamples, cfg: DenoiserTrainConfig, sched: NoiseSchedule
) -> Denoiser:
    """Train a denoiser on labeled samples.

    The returned denoiser has its parameters frozen (requires_grad False) and
    its `loss_curve` holds (step, loss) pairs every `cfg.log_every` steps.

    Raises:
        ConfigurationError: The dataset is empty or has fewer than two
            classes, which guidance needs for a conditional contrast.
    """
    if len(dataset) == 0:
        raise ConfigurationError("denoiser training set is empty", key="samples_per_class")
    classes = np.unique(dataset.labels)
    if classes.size < 2:
        raise ConfigurationError(
            "denoiser training needs at least two condition classes", key="data.classes"
        )
    rng = Rng(cfg.seed)
    den = Denoiser(
        dataset.points.shape[1],
        int(classes.max()) + 1,
        hidden=cfg.hidden,
        time_dim=cfg.time_dim,
        cond_dim=cfg.cond_dim,
        rng=rng.spawn(),
    ).requires_grad_(True)
    optimizer = Adam(den.parameters, cfg.lr)
    logging.info(
        "Training denoiser for %d steps on %d samples (%d classes)",
        cfg.steps,
        len(dataset),
        classes.size,
    )
    for step in range(1, cfg.steps + 1):
        index = rng.integers(len(dataset), cfg.batch)
        with Tape() as tape:
            loss = denoiser_loss(
                den,
                Tensor(dataset.points[index]),
                dataset.labels[index],
                sched,
                rng,
                cfg.p_uncond,
            )
        tape.backward(loss)
        optimizer.step()
        optimizer.zero_grad()
        if step == 1 or step % cfg.log_every == 0 or step == cfg.steps:
            den.loss_curve.append((step, loss.item()))
            logging.debug("denoiser step %d loss %.6f", step, loss.item())
    if den.loss_curve:
        logging.info("Denoiser final loss %.6f", den.loss_curve[-1][1])
    return den.requires_grad_(False)
