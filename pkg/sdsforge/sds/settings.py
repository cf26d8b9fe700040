"""Settings for score-distillation adaptation.

Classes:
    SDSConfig: Every adaptation knob, read from `sds.*` keys.
"""

from __future__ import annotations

from typing import Optional

from ..dataclass import dataclass
from ..errors import ConfigurationError

__all__ = (
    "SDSConfig",
    "WEIGHTINGS",
)


WEIGHTINGS = ("one_minus_alpha_bar", "constant")


@dataclass
class SDSConfig:
    """Settings for adapting a generator with a frozen diffusion critic.

    Settings:
        s: Guidance weight.
        t_min: Exclusive lower bound of the timestep range.
        t_max: Inclusive upper bound of the timestep range.
        lambda_dir: Weight of the directional regularizer.
        lambda_rec: Weight of the reconstruction regularizer.
        lr: Adam learning rate for the selected layers.
        iters: Adaptation iterations.
        batch: Latents per iteration.
        k: Number of synthesis layers to adapt; all layers when unset.
        n_select: Code-optimization iterations used to rank layers.
        select_batch: Latents used to rank layers.
        select_lr: Adam learning rate for the W+ codes while ranking layers.
        reselect_every: Re-rank layers every this many iterations; 0 ranks
            them once.
        target: Condition id the generator is moved toward.
        seed: Seed of the adaptation run.
        weighting: `one_minus_alpha_bar` or `constant` timestep weighting of
            the distillation gradient.
        share_noise: Whether the frozen branch reuses the trainable branch's
            timestep and noise.
        eval_every: Iterations between evaluation rows.
        eval_samples: Generated samples per evaluation.
        eval_seed: Seed of the evaluation latents, reused for every row.
    """

    s: float = 7.5
    t_min: int = 0
    t_max: int = 500
    lambda_dir: float = 1.0
    lambda_rec: float = 0.0
    lr: float = 5e-4
    iters: int = 2000
    batch: int = 8
    k: Optional[int] = None
    n_select: int = 50
    select_batch: int = 16
    select_lr: float = 1e-2
    reselect_every: int = 0
    target: int = 1
    seed: int = 0
    weighting: str = "one_minus_alpha_bar"
    share_noise: bool = True
    eval_every: int = 50
    eval_samples: int = 512
    eval_seed: int = 12345

    def __post_init__(self) -> None:
        if self.t_min < 0:
            raise ConfigurationError("t_min: must not be negative", key="t_min")
        if self.t_max <= self.t_min:
            raise ConfigurationError(
                f"t_min: the range ({self.t_min}, {self.t_max}] is empty", key="t_min"
            )
        if self.s < 0:
            raise ConfigurationError("s: must not be negative", key="s")
        for name in ("lambda_dir", "lambda_rec", "iters", "n_select", "reselect_every"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name}: must not be negative", key=name)
        for name in ("batch", "select_batch", "eval_every"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name}: must be positive", key=name)
        if self.eval_samples < 3:
            raise ConfigurationError("eval_samples: must be at least 3", key="eval_samples")
        if self.lr <= 0 or self.select_lr <= 0:
            raise ConfigurationError("lr: learning rates must be positive", key="lr")
        if self.k is not None and self.k < 1:
            raise ConfigurationError("k: must be at least 1", key="k")
        if self.target < 0:
            raise ConfigurationError("target: must be a class id", key="target")
        if self.weighting not in WEIGHTINGS:
            raise ConfigurationError(
                f"weighting: must be one of {', '.join(WEIGHTINGS)}, got {self.weighting!r}",
                key="weighting",
            )

    def layer_count(self, layers: int) -> int:
        """Return how many of `layers` synthesis layers to adapt.

        Raises:
            ConfigurationError: k exceeds the number of layers.
        """
        k = layers if self.k is None else self.k
        if k > layers:
            raise ConfigurationError(
                f"k: cannot select {k} of {layers} synthesis layers", key="k"
            )
        return k
