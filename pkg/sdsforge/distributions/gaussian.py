"""A Gaussian class distribution.

Classes:
    Settings: The mean and covariance.
    Sampler: Draws from the Gaussian.
"""

from __future__ import annotations

from typing import Any

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
    """Settings for a Gaussian class.

    Settings:
        mean: The mean vector; its length sets the dimension.
        cov: A scalar variance (isotropic), a list of per-axis variances, or a
            full covariance matrix.
    """

    mean: tuple[float, ...] = (0.0, 0.0)
    cov: Any = 1.0

    def __post_init__(self) -> None:
        self.mean = tuple(float(m) for m in self.mean)
        if not self.mean:
            raise ConfigurationError("mean: must not be empty", key="mean")

    def covariance(self) -> np.ndarray:
        d = len(self.mean)
        cov = np.asarray(self.cov, dtype=np.float64)
        if cov.ndim == 0:
            cov = float(cov) * np.eye(d)
        elif cov.ndim == 1:
            cov = np.diag(cov)
        if cov.shape != (d, d):
            raise ConfigurationError(
                f"cov: shape {cov.shape} does not match a mean of length {d}", key="cov"
            )
        return cov


class Sampler:
    """Draws mean + L eps with L the Cholesky factor of the covariance."""

    def __init__(self, settings: Settings) -> None:
        self.settings = settings
        self.mean = np.asarray(settings.mean)
        try:
            self._factor = np.linalg.cholesky(settings.covariance())
        except np.linalg.LinAlgError:
            raise ConfigurationError(
                "cov: must be symmetric positive definite", key="cov"
            ) from None

    @property
    def dim(self) -> int:
        return len(self.mean)

    def sample(self, rng: Rng, n: int) -> np.ndarray:
        eps = rng.normal((n, self.dim)) if n else np.zeros((0, self.dim))
        return self.mean + eps @ self._factor.T
