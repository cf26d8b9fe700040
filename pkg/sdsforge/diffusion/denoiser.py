"""The conditional noise-prediction network.

Classes:
    Denoiser: An MLP predicting the injected noise from a noised latent, a
        sinusoidal timestep embedding and a learned condition embedding with a
        reserved null-condition row.

Functions:
    timestep_embedding: Sinusoidal features of integer timesteps.

Constants:
    NULL_CONDITION: The condition id that selects the null embedding row.
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence
import math

import numpy as np

from ..errors import ShapeError
from ..numerics import Rng, Tensor, as_tensor, ops

__all__ = (
    "NULL_CONDITION",
    "Denoiser",
    "timestep_embedding",
)


NULL_CONDITION = -1


def timestep_embedding(t: np.ndarray, dim: int) -> np.ndarray:
    """Return sin/cos features of timesteps at geometric frequencies.

    Args:
        t: Integer timesteps of shape (batch,).
        dim: Even embedding width.

    Returns: An array of shape (batch, dim); the first half are sines.
    """
    half = dim // 2
    frequencies = np.exp(-math.log(10000.0) * np.arange(half) / half)
    args = np.asarray(t, dtype=np.float64)[:, None] * frequencies[None, :]
    return np.concatenate([np.sin(args), np.cos(args)], axis=1)


class Denoiser:
    """An epsilon-prediction MLP conditioned on timestep and class.

    The condition table has `num_classes + 1` rows; the last row is the null
    condition. Parameters are named `embedding`, `layers.<i>.weight`,
    `layers.<i>.bias`, `output.weight` and `output.bias`.
    """

    def __init__(
        self,
        data_dim: int,
        num_classes: int,
        hidden: Sequence[int] = (128, 128, 128),
        time_dim: int = 32,
        cond_dim: int = 16,
        rng: Optional[Rng] = None,
        parameters: Optional[Mapping[str, np.ndarray]] = None,
    ) -> None:
        """Create a denoiser with fresh or restored parameters.

        Args:
            data_dim: Dimension of the latents.
            num_classes: Number of real conditions (the null row is extra).
            hidden: Hidden widths.
            time_dim: Width of the timestep embedding.
            cond_dim: Width of the condition embedding.
            rng: Generator for initialization; seed 0 if omitted.
            parameters: Arrays to restore instead of initializing.
        """
        self.data_dim = data_dim
        self.num_classes = num_classes
        self.hidden = tuple(hidden)
        self.time_dim = time_dim
        self.cond_dim = cond_dim
        self.loss_curve: list[tuple[int, float]] = []
        if parameters is not None:
            self.parameters = {
                name: Tensor(parameters[name]) for name in self._shapes()
            }
        else:
            self.parameters = self._initialize(rng or Rng(0))

    def _shapes(self) -> dict[str, tuple[int, ...]]:
        shapes = {"embedding": (self.num_classes + 1, self.cond_dim)}
        width = self.data_dim + self.time_dim + self.cond_dim
        for i, h in enumerate(self.hidden):
            shapes[f"layers.{i}.weight"] = (width, h)
            shapes[f"layers.{i}.bias"] = (h,)
            width = h
        shapes["output.weight"] = (width, self.data_dim)
        shapes["output.bias"] = (self.data_dim,)
        return shapes

    def _initialize(self, rng: Rng) -> dict[str, Tensor]:
        parameters = {}
        for name, shape in self._shapes().items():
            if name.endswith("bias"):
                value = np.zeros(shape)
            elif name == "embedding":
                value = rng.normal(shape)
            else:
                value = rng.normal(shape) / math.sqrt(shape[0])
            parameters[name] = Tensor(value)
        return parameters

    @classmethod
    def from_parameters(cls, parameters: Mapping[str, np.ndarray]) -> Denoiser:
        """Rebuild a denoiser, inferring the architecture from array shapes."""
        embedding = parameters["embedding"]
        depth = len([n for n in parameters if n.startswith("layers.") and n.endswith(".weight")])
        hidden = tuple(parameters[f"layers.{i}.weight"].shape[1] for i in range(depth))
        data_dim = parameters["output.weight"].shape[1]
        time_dim = parameters["layers.0.weight"].shape[0] - data_dim - embedding.shape[1]
        return cls(
            data_dim,
            embedding.shape[0] - 1,
            hidden=hidden,
            time_dim=time_dim,
            cond_dim=embedding.shape[1],
            parameters=parameters,
        )

    @property
    def null_row(self) -> int:
        return self.num_classes

    def requires_grad_(self, flag: bool) -> Denoiser:
        for parameter in self.parameters.values():
            parameter.requires_grad = flag
        return self

    def zero_grad(self) -> None:
        for parameter in self.parameters.values():
            parameter.grad = None

    def arrays(self) -> dict[str, np.ndarray]:
        """Return copies of the parameter arrays keyed by name."""
        return {name: p.numpy() for name, p in self.parameters.items()}

    def predict(self, z_t: Tensor, t: np.ndarray, cond: np.ndarray) -> Tensor:
        """Predict the noise in a batch of noised latents.

        Args:
            z_t: Noised latents of shape (batch, data_dim).
            t: Timesteps, a scalar or shape (batch,).
            cond: Condition ids, a scalar or shape (batch,); NULL_CONDITION
                selects the null embedding.

        Returns: The noise prediction, shape (batch, data_dim).
        """
        z_t = as_tensor(z_t)
        if z_t.ndim != 2 or z_t.shape[1] != self.data_dim:
            raise ShapeError(
                f"denoiser expects latents of shape (batch, {self.data_dim}), got {z_t.shape}"
            )
        batch = z_t.shape[0]
        t = np.broadcast_to(np.asarray(t, dtype=np.int64), (batch,))
        cond = np.broadcast_to(np.asarray(cond, dtype=np.int64), (batch,))
        rows = np.where(cond == NULL_CONDITION, self.null_row, cond)
        h = ops.concat(
            [
                z_t,
                Tensor(timestep_embedding(t, self.time_dim)),
                ops.take(self.parameters["embedding"], rows),
            ]
        )
        for i in range(len(self.hidden)):
            h = ops.silu(
                ops.add(
                    ops.matmul(h, self.parameters[f"layers.{i}.weight"]),
                    self.parameters[f"layers.{i}.bias"],
                )
            )
        return ops.add(
            ops.matmul(h, self.parameters["output.weight"]), self.parameters["output.bias"]
        )
