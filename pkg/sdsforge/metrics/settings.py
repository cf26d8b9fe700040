"""Settings for the held-out condition classifier.

Classes:
    ClassifierSettings: Read from `classifier.*` keys.
"""

from __future__ import annotations

from ..dataclass import dataclass
from ..errors import ConfigurationError

__all__ = ("ClassifierSettings",)


@dataclass
class ClassifierSettings:
    """Settings for the condition classifier.

    Settings:
        hidden: Width of the tanh hidden layer.
        steps: Adam steps.
        batch: Samples per step.
        lr: Adam learning rate.
        samples_per_class: Held-out training points drawn from each class.
        seed: Seed for the held-out draw, initialization and batching.
    """

    hidden: int = 64
    steps: int = 1500
    batch: int = 128
    lr: float = 1e-2
    samples_per_class: int = 2000
    seed: int = 11

    def __post_init__(self) -> None:
        for name in ("hidden", "batch", "samples_per_class"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name}: must be positive", key=name)
        if self.steps < 0:
            raise ConfigurationError("steps: must not be negative", key="steps")
        if self.lr <= 0:
            raise ConfigurationError("lr: must be positive", key="lr")
