"""A toy style-based generator.

The mapping network turns a latent z into a style code w. Each synthesis layer
l applies the rule

    h <- leaky_relu(scale_l * (h W_l + b_l) + shift_l)

where scale_l = 1 + (w_l A_l + c_l) and shift_l = w_l B_l + d_l come from the
layer's style affines and w_l is the layer's slot of the W+ codes. The first
layer consumes a learned constant seed and a linear head produces the output.

Classes:
    StyleCodes: Per-layer style codes (the W+ space).
    StyleGenerator: Mapping network, synthesis layers and output head.

Functions:
    map_latent: Map latents to W+ codes with one code broadcast to all slots.
    synthesize: Run the synthesis layers and head on W+ codes.
    snapshot_frozen: Deep-copy a generator with every parameter frozen.
    fingerprint: Hash parameter values.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence
import dataclasses
import hashlib
import math

import numpy as np

from ..errors import ShapeError
from ..numerics import Rng, Tensor, as_tensor, ops
from .settings import GeneratorSettings

__all__ = (
    "StyleCodes",
    "StyleGenerator",
    "fingerprint",
    "map_latent",
    "snapshot_frozen",
    "synthesize",
)


STYLE_INIT_GAIN = 0.5


@dataclasses.dataclass(frozen=True)
class StyleCodes:
    """One style tensor per synthesis layer, in layer order.

    Each slot has shape (w_dim,) or (batch, w_dim).
    """

    slots: tuple[Tensor, ...]

    @classmethod
    def broadcast(cls, w: Tensor, layers: int) -> StyleCodes:
        return cls(tuple(w for _ in range(layers)))

    def __len__(self) -> int:
        return len(self.slots)

    def __getitem__(self, layer: int) -> Tensor:
        """Return the slot of a 1-based layer."""
        return self.slots[layer - 1]

    def numpy(self) -> np.ndarray:
        """Return the codes stacked as (layers, ...)."""
        return np.stack([slot.data for slot in self.slots])


def _linear_names(prefix: str) -> tuple[str, str]:
    return f"{prefix}.weight", f"{prefix}.bias"


class StyleGenerator:
    """Mapping network, style-modulated synthesis layers and output head.

    Synthesis layers are numbered from 1. Parameter names:

        mapping.fc1.{weight,bias}, mapping.fc2.{weight,bias}
        synthesis.seed
        synthesis.<l>.{weight,bias}
        synthesis.<l>.style_scale.{weight,bias}
        synthesis.<l>.style_shift.{weight,bias}
        head.{weight,bias}
    """

    def __init__(
        self,
        settings: Optional[GeneratorSettings] = None,
        rng: Optional[Rng] = None,
        parameters: Optional[Mapping[str, np.ndarray]] = None,
    ) -> None:
        self.settings = settings or GeneratorSettings()
        if parameters is not None:
            missing = set(self._shapes()) - set(parameters)
            if missing:
                raise ShapeError(f"missing generator parameters: {', '.join(sorted(missing))}")
            self.parameters = {name: Tensor(parameters[name]) for name in self._shapes()}
            for name, shape in self._shapes().items():
                if self.parameters[name].shape != shape:
                    raise ShapeError(
                        f"{name}: expected shape {shape}, got {self.parameters[name].shape}"
                    )
        else:
            self.parameters = self._initialize(rng or Rng(self.settings.seed))

    @property
    def layers(self) -> int:
        return self.settings.layers

    def _shapes(self) -> dict[str, tuple[int, ...]]:
        s = self.settings
        shapes = {
            "mapping.fc1.weight": (s.z_dim, s.mapping_hidden),
            "mapping.fc1.bias": (s.mapping_hidden,),
            "mapping.fc2.weight": (s.mapping_hidden, s.w_dim),
            "mapping.fc2.bias": (s.w_dim,),
            "synthesis.seed": (s.hidden,),
        }
        for layer in range(1, s.layers + 1):
            prefix = f"synthesis.{layer}"
            shapes[f"{prefix}.weight"] = (s.hidden, s.hidden)
            shapes[f"{prefix}.bias"] = (s.hidden,)
            for affine in ("style_scale", "style_shift"):
                shapes[f"{prefix}.{affine}.weight"] = (s.w_dim, s.hidden)
                shapes[f"{prefix}.{affine}.bias"] = (s.hidden,)
        shapes["head.weight"] = (s.hidden, s.out_dim)
        shapes["head.bias"] = (s.out_dim,)
        return shapes

    def _initialize(self, rng: Rng) -> dict[str, Tensor]:
        parameters = {}
        for name, shape in self._shapes().items():
            if name.endswith("bias"):
                value = np.zeros(shape)
            elif name == "synthesis.seed":
                value = rng.normal(shape)
            elif ".style_" in name:
                value = STYLE_INIT_GAIN * rng.normal(shape) / math.sqrt(shape[0])
            else:
                value = rng.normal(shape) / math.sqrt(shape[0])
            parameters[name] = Tensor(value)
        return parameters

    @classmethod
    def from_parameters(
        cls, parameters: Mapping[str, np.ndarray], **overrides
    ) -> StyleGenerator:
        """Rebuild a generator, inferring the architecture from array shapes.

        Args:
            parameters: Arrays keyed by parameter name.
            overrides: Non-architectural settings, such as `encoder`, to carry
                into the rebuilt generator's settings.
        """
        fc1 = parameters["mapping.fc1.weight"]
        head = parameters["head.weight"]
        layers = 0
        while f"synthesis.{layers + 1}.weight" in parameters:
            layers += 1
        settings = GeneratorSettings(
            z_dim=fc1.shape[0],
            mapping_hidden=fc1.shape[1],
            w_dim=parameters["mapping.fc2.weight"].shape[1],
            layers=layers,
            hidden=head.shape[0],
            out_dim=head.shape[1],
            **overrides,
        )
        return cls(settings, parameters=parameters)

    def layer_parameter_names(self, layer: int) -> tuple[str, ...]:
        """Names adapted when the 1-based layer is selected; biases stay frozen."""
        prefix = f"synthesis.{layer}"
        return (
            f"{prefix}.weight",
            f"{prefix}.style_scale.weight",
            f"{prefix}.style_shift.weight",
        )

    def adaptable_parameters(self) -> dict[str, Tensor]:
        """Return every parameter that layer selection can unfreeze."""
        return {
            name: self.parameters[name]
            for layer in range(1, self.layers + 1)
            for name in self.layer_parameter_names(layer)
        }

    def set_trainable(self, names: Iterable[str]) -> None:
        """Require gradients for exactly the named parameters."""
        names = set(names)
        unknown = names - set(self.parameters)
        if unknown:
            raise KeyError(f"unknown generator parameters: {', '.join(sorted(unknown))}")
        for name, parameter in self.parameters.items():
            parameter.requires_grad = name in names

    def trainable_names(self) -> tuple[str, ...]:
        return tuple(name for name, p in self.parameters.items() if p.requires_grad)

    def requires_grad_(self, flag: bool) -> StyleGenerator:
        for parameter in self.parameters.values():
            parameter.requires_grad = flag
        return self

    def zero_grad(self) -> None:
        for parameter in self.parameters.values():
            parameter.grad = None

    def copy(self) -> StyleGenerator:
        """Return a deep copy with the same requires_grad flags."""
        clone = StyleGenerator(self.settings, parameters=self.arrays())
        for name, parameter in self.parameters.items():
            clone.parameters[name].requires_grad = parameter.requires_grad
        return clone

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: p.numpy() for name, p in self.parameters.items()}

    def _linear(self, prefix: str, x: Tensor) -> Tensor:
        weight, bias = _linear_names(prefix)
        return ops.add(ops.matmul(x, self.parameters[weight]), self.parameters[bias])

    def map_latent(self, z: Tensor) -> StyleCodes:
        z = as_tensor(z)
        if z.ndim not in (1, 2) or z.shape[-1] != self.settings.z_dim:
            raise ShapeError(
                f"latents must have trailing dimension {self.settings.z_dim}, got {z.shape}"
            )
        hidden = ops.leaky_relu(self._linear("mapping.fc1", z))
        w = self._linear("mapping.fc2", hidden)
        return StyleCodes.broadcast(w, self.layers)

    def synthesize(self, codes: StyleCodes) -> Tensor:
        if len(codes) != self.layers:
            raise ShapeError(f"expected {self.layers} style slots, got {len(codes)}")
        h = self.parameters["synthesis.seed"]
        ones = Tensor(np.ones(self.settings.hidden))
        for layer in range(1, self.layers + 1):
            prefix = f"synthesis.{layer}"
            w = codes[layer]
            scale = ops.add(ones, self._linear(f"{prefix}.style_scale", w))
            shift = self._linear(f"{prefix}.style_shift", w)
            h = ops.leaky_relu(ops.add(ops.mul(scale, self._linear(prefix, h)), shift))
        return self._linear("head", h)

    def __call__(self, z: Tensor) -> Tensor:
        return self.synthesize(self.map_latent(z))


def map_latent(gen: StyleGenerator, z: Tensor) -> StyleCodes:
    """Return g(z) broadcast into every W+ slot.

    Raises:
        ShapeError: z does not end in the generator's latent dimension.
    """
    return gen.map_latent(z)


def synthesize(gen: StyleGenerator, codes: StyleCodes) -> Tensor:
    """Generate outputs from W+ codes.

    Raises:
        ShapeError: The number of slots differs from the number of layers.
    """
    return gen.synthesize(codes)


def snapshot_frozen(gen: StyleGenerator) -> StyleGenerator:
    """Return a deep copy of the generator whose parameters never require grad."""
    return StyleGenerator(gen.settings, parameters=gen.arrays())


def fingerprint(parameters: Mapping[str, Tensor], names: Optional[Sequence[str]] = None) -> str:
    """Return a SHA-256 over the names, shapes and bytes of the parameters."""
    digest = hashlib.sha256()
    for name in sorted(parameters if names is None else names):
        array = np.ascontiguousarray(
            parameters[name].data if isinstance(parameters[name], Tensor) else parameters[name],
            dtype=np.float64,
        )
        digest.update(name.encode())
        digest.update(repr(array.shape).encode())
        digest.update(array.tobytes())
    return digest.hexdigest()
