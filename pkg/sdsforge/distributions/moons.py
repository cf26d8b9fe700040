"""The two interleaving half circles as a single class.

Classes:
    Settings: Noise, scale and placement.
    Sampler: Draws from both half circles in alternation.
"""

from __future__ import annotations

import math

import numpy as np

from ..dataclass import dataclass
from ..errors import ConfigurationError
from ..numerics import Rng

__all__ = (
    "Sampler",
    "Settings",
)


@dataclass
class Settings:
    """Settings for a two-moons class.

    Settings:
        noise: Standard deviation of the isotropic jitter.
        scale: Uniform scaling applied before the jitter.
        center: Where the middle of the shape is placed.
    """

    noise: float = 0.1
    scale: float = 1.0
    center: tuple[float, ...] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.noise < 0:
            raise ConfigurationError("noise: must not be negative", key="noise")
        if self.scale <= 0:
            raise ConfigurationError("scale: must be positive", key="scale")
        if len(self.center) != 2:
            raise ConfigurationError("center: moons live in the plane", key="center")
        self.center = tuple(float(c) for c in self.center)


class Sampler:
    dim = 2

    def __init__(self, settings: Settings) -> None:
        self.settings = settings

    def sample(self, rng: Rng, n: int) -> np.ndarray:
        if n == 0:
            return np.zeros((0, 2))
        angle = math.pi * rng.uniform(n)
        lower = np.arange(n) % 2 == 1
        x = np.where(lower, 1.0 - np.cos(angle), np.cos(angle))
        y = np.where(lower, 0.5 - np.sin(angle), np.sin(angle))
        # The raw shape spans [-1, 2] x [-0.5, 1]; recentre on the origin.
        points = np.stack([x - 0.5, y - 0.25], axis=1) * self.settings.scale
        points += self.settings.noise * rng.normal((n, 2))
        return points + np.asarray(self.settings.center)
