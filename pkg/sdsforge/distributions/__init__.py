"""Synthetic class distributions used as source and target data.

Each distribution is a module exposing a `Settings` dataclass and a `Sampler`
class whose `sample(rng, n)` returns an (n, d) array. The built-in modules are
always available; further modules can be registered under the
`sdsforge.distributions` entry-point group.

Classes:
    LabeledSamples: Points with integer class labels.

Functions:
    available: Return the names of every known distribution.
    create: Build a sampler from a `{kind: ..., ...}` mapping.
    draw_labeled: Draw a labeled dataset with one sampler per class.
"""

from __future__ import annotations

from types import ModuleType
from typing import Any, Mapping, Sequence
import dataclasses
import logging
import sys

import numpy as np

if sys.version_info < (3, 10):
    from importlib_metadata import entry_points
else:
    from importlib.metadata import entry_points

from ..errors import ConfigurationError
from ..numerics import Rng
from . import gaussian, moons, ring

__all__ = (
    "LabeledSamples",
    "available",
    "create",
    "draw_labeled",
    "gaussian",
    "installed_distributions",
    "moons",
    "ring",
)


installed_distributions = entry_points(group=__name__)

_BUILTIN: dict[str, ModuleType] = {
    "gaussian": gaussian,
    "moons": moons,
    "ring": ring,
}


@dataclasses.dataclass(frozen=True)
class LabeledSamples:
    """Points of shape (n, d) with labels of shape (n,)."""

    points: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def of_class(self, label: int) -> np.ndarray:
        """Return the points carrying the given label."""
        return self.points[self.labels == label]


def _module(kind: str) -> ModuleType:
    if kind in _BUILTIN:
        return _BUILTIN[kind]
    for plugin in installed_distributions:
        if plugin.name == kind:
            logging.debug('Loading distribution plug-in "%s"', plugin.name)
            return plugin.load()
    raise ConfigurationError(
        f"unknown distribution kind {kind!r}; known kinds: {', '.join(available())}",
        key="data.classes",
    )


def available() -> list[str]:
    """Return the sorted names of the built-in and installed distributions."""
    return sorted(set(_BUILTIN) | {plugin.name for plugin in installed_distributions})


def create(spec: Mapping[str, Any]) -> Any:
    """Build a sampler from a mapping naming its kind and settings.

    Args:
        spec: A mapping such as `{"kind": "gaussian", "mean": [2, 0], "cov": 0.25}`.

    Returns: The distribution's Sampler.

    Raises:
        ConfigurationError: The kind is missing or unknown, or its settings are
            invalid.
    """
    if not isinstance(spec, Mapping) or "kind" not in spec:
        raise ConfigurationError(
            f"a class distribution needs a 'kind', got {spec!r}", key="data.classes"
        )
    settings = dict(spec)
    module = _module(str(settings.pop("kind")))
    return module.Sampler(module.Settings.from_dict(settings))


def draw_labeled(samplers: Sequence[Any], per_class: int, rng: Rng) -> LabeledSamples:
    """Draw `per_class` points from each sampler, labeled by sampler position.

    Classes are drawn in order from the same generator, so the result depends
    only on the samplers, the count and the generator state.
    """
    if not samplers:
        raise ConfigurationError("at least one class distribution is required", key="data.classes")
    points = [np.asarray(sampler.sample(rng, per_class)) for sampler in samplers]
    dims = {p.shape[1] for p in points}
    if len(dims) != 1:
        raise ConfigurationError(
            f"class distributions have different dimensions {sorted(dims)}",
            key="data.classes",
        )
    labels = np.repeat(np.arange(len(samplers), dtype=np.int64), per_class)
    return LabeledSamples(np.concatenate(points, axis=0), labels)
