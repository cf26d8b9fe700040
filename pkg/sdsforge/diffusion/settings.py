"""Settings for the noise schedule and denoiser training.

Classes:
    ScheduleSettings: The linear beta schedule, read from `schedule.*` keys.
    DenoiserTrainConfig: Architecture and training options for the denoiser,
        read from `denoiser.*` keys.
"""

from __future__ import annotations

import dataclasses

from ..dataclass import dataclass
from ..errors import ConfigurationError

__all__ = (
    "DenoiserTrainConfig",
    "ScheduleSettings",
)


@dataclass
class ScheduleSettings:
    """Settings for the forward noising process.

    Settings:
        T: The number of diffusion timesteps.
        beta_start: The first beta of the linear schedule.
        beta_end: The last beta of the linear schedule.
    """

    T: int = 1000
    beta_start: float = 1e-4
    beta_end: float = 0.02

    def __post_init__(self) -> None:
        if self.T < 2:
            raise ConfigurationError(f"T: must be at least 2, got {self.T}", key="T")
        if not 0.0 < self.beta_start < 1.0:
            raise ConfigurationError(
                f"beta_start: must lie in (0, 1), got {self.beta_start}", key="beta_start"
            )
        if not 0.0 < self.beta_end < 1.0:
            raise ConfigurationError(
                f"beta_end: must lie in (0, 1), got {self.beta_end}", key="beta_end"
            )
        if self.beta_start > self.beta_end:
            raise ConfigurationError(
                f"beta_start: {self.beta_start} exceeds beta_end {self.beta_end}",
                key="beta_start",
            )


@dataclass
class DenoiserTrainConfig:
    """Settings for the conditional denoiser and its training run.

    Settings:
        steps: Adam steps.
        batch: Samples per step.
        lr: Adam learning rate.
        p_uncond: Probability of replacing a sample's condition by the null
            condition, which trains the unconditional branch used by guidance.
        seed: Seed for initialization, batching and noise draws.
        hidden: Hidden layer widths.
        time_dim: Width of the sinusoidal timestep embedding.
        cond_dim: Width of the learned condition embedding.
        samples_per_class: Training points drawn from each class.
        log_every: Steps between loss-curve entries.
    """

    steps: int = 6000
    batch: int = 256
    lr: float = 1e-3
    p_uncond: float = 0.1
    seed: int = 1
    hidden: tuple[int, ...] = (128, 128, 128)
    time_dim: int = 32
    cond_dim: int = 16
    samples_per_class: int = 4000
    log_every: int = 50

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_uncond < 1.0:
            raise ConfigurationError(
                f"p_uncond: must lie in [0, 1), got {self.p_uncond}", key="p_uncond"
            )
        for name in ("batch", "samples_per_class", "log_every"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name}: must be positive", key=name)
        if self.steps < 0:
            raise ConfigurationError("steps: must not be negative", key="steps")
        if self.lr <= 0:
            raise ConfigurationError("lr: must be positive", key="lr")
        if self.time_dim < 2 or self.time_dim % 2:
            raise ConfigurationError("time_dim: must be a positive even number", key="time_dim")
        if not self.hidden or min(self.hidden) < 1:
            raise ConfigurationError("hidden: widths must be positive", key="hidden")
        self.hidden = tuple(self.hidden)
