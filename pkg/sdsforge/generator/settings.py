"""Settings for the style-based generator and its pretraining.

Classes:
    GeneratorSettings: Architecture and encoder options, read from
        `generator.*` keys.
    PretrainSettings: MMD pretraining options, read from `pretrain.*` keys.
"""

from __future__ import annotations

from typing import Optional

from ..dataclass import dataclass
from ..errors import ConfigurationError

__all__ = (
    "ENCODER_MODES",
    "GeneratorSettings",
    "PretrainSettings",
)


ENCODER_MODES = ("identity", "orthogonal")


@dataclass
class GeneratorSettings:
    """Settings for the generator architecture.

    Settings:
        z_dim: Dimension of the input latent.
        w_dim: Dimension of the style code.
        mapping_hidden: Hidden width of the mapping network.
        layers: Number of modulated synthesis layers.
        hidden: Width of the synthesis layers and the constant seed.
        out_dim: Dimension of the generated samples.
        encoder: `identity` or `orthogonal`.
        encoder_seed: Seed of the orthogonal encoder's QR draw.
        seed: Seed for parameter initialization.
    """

    z_dim: int = 8
    w_dim: int = 8
    mapping_hidden: int = 32
    layers: int = 4
    hidden: int = 32
    out_dim: int = 2
    encoder: str = "identity"
    encoder_seed: int = 7
    seed: int = 3

    def __post_init__(self) -> None:
        for name in ("z_dim", "w_dim", "mapping_hidden", "layers", "hidden", "out_dim"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name}: must be positive", key=name)
        if self.encoder not in ENCODER_MODES:
            raise ConfigurationError(
                f"encoder: must be one of {', '.join(ENCODER_MODES)}, got {self.encoder!r}",
                key="encoder",
            )


@dataclass
class PretrainSettings:
    """Settings for matching the generator to the source class by MMD.

    Settings:
        steps: Adam steps.
        batch: Generated and source samples per step.
        lr: Adam learning rate.
        samples: Source samples drawn for training; at least 500.
        bandwidth: Gaussian kernel bandwidth; when unset, the median pairwise
            distance of source samples pooled with outputs of the untrained
            generator.
        seed: Seed for the source draw and the latent draws.
        log_every: Steps between log lines.
    """

    steps: int = 4000
    batch: int = 256
    lr: float = 2e-3
    samples: int = 4000
    bandwidth: Optional[float] = None
    seed: int = 5
    log_every: int = 200

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ConfigurationError("steps: must not be negative", key="steps")
        if self.batch < 2:
            raise ConfigurationError("batch: must be at least 2", key="batch")
        if self.lr <= 0:
            raise ConfigurationError("lr: must be positive", key="lr")
        if self.samples < 500:
            raise ConfigurationError(
                f"samples: at least 500 source samples are needed, got {self.samples}",
                key="samples",
            )
        if self.bandwidth is not None and self.bandwidth <= 0:
            raise ConfigurationError("bandwidth: must be positive", key="bandwidth")
        if self.log_every < 1:
            raise ConfigurationError("log_every: must be positive", key="log_every")
