"""A ring-shaped class distribution in the plane.

Classes:
    Settings: The ring geometry.
    Sampler: Draws points around the ring.
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
    """Settings for a ring class.

    Settings:
        radius: Distance of the ring from its center.
        width: Standard deviation of the radial jitter.
        center: The center of the ring.
    """

    radius: float = 2.0
    width: float = 0.1
    center: tuple[float, ...] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ConfigurationError("radius: must be positive", key="radius")
        if self.width < 0:
            raise ConfigurationError("width: must not be negative", key="width")
        if len(self.center) != 2:
            raise ConfigurationError("center: a ring lives in the plane", key="center")
        self.center = tuple(float(c) for c in self.center)


class Sampler:
    dim = 2

    def __init__(self, settings: Settings) -> None:
        self.settings = settings

    def sample(self, rng: Rng, n: int) -> np.ndarray:
        if n == 0:
            return np.zeros((0, 2))
        angle = 2.0 * math.pi * rng.uniform(n)
        radius = self.settings.radius + self.settings.width * rng.normal(n)
        points = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
        return points + np.asarray(self.settings.center)
