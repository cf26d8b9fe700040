"""The fixed encoder from generator outputs into the critic's latent space.

Classes:
    LatentEncoder: Identity or a fixed orthogonal map.

Functions:
    make_encoder: Build the encoder named by generator settings.
    encode: Apply an encoder.
"""

from __future__ import annotations

from typing import Optional
import dataclasses

import numpy as np

from ..errors import ConfigurationError, ShapeError
from ..numerics import Rng, Tensor, as_tensor, ops
from .settings import GeneratorSettings

__all__ = (
    "LatentEncoder",
    "encode",
    "make_encoder",
)


@dataclasses.dataclass(frozen=True, eq=False)
class LatentEncoder:
    """An encoder that is never trained.

    Attributes:
        mode: `identity` or `orthogonal`.
        q: The orthogonal matrix in `orthogonal` mode, otherwise None.
    """

    mode: str = "identity"
    q: Optional[np.ndarray] = None

    @classmethod
    def orthogonal(cls, dim: int, seed: int) -> LatentEncoder:
        """Draw Q from the QR decomposition of a seeded Gaussian matrix.

        The signs of Q's columns are fixed so that R has a positive diagonal,
        which makes Q a function of the seed alone.
        """
        q, r = np.linalg.qr(Rng(seed).normal((dim, dim)))
        q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
        q.setflags(write=False)
        return cls("orthogonal", q)

    def arrays(self) -> dict[str, np.ndarray]:
        return {} if self.q is None else {"encoder.q": self.q.copy()}


def make_encoder(settings: GeneratorSettings) -> LatentEncoder:
    if settings.encoder == "identity":
        return LatentEncoder()
    if settings.encoder == "orthogonal":
        return LatentEncoder.orthogonal(settings.out_dim, settings.encoder_seed)
    raise ConfigurationError(f"encoder: unknown mode {settings.encoder!r}", key="encoder")


def encode(enc: LatentEncoder, x: Tensor) -> Tensor:
    """Return x unchanged or x Q^T, keeping the gradient path to x."""
    x = as_tensor(x)
    if enc.q is None:
        return x
    if x.shape[-1] != enc.q.shape[0]:
        raise ShapeError(f"encoder expects dimension {enc.q.shape[0]}, got {x.shape}")
    return ops.matmul(x, Tensor(enc.q.T))
