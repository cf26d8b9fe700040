"""Settings for the labeled data.

Classes:
    DataSettings: The class distributions and the source class, read from
        `data.*` keys.
"""

from __future__ import annotations

from typing import Any, Optional

from ..dataclass import dataclass
from ..errors import ConfigurationError

__all__ = ("DataSettings",)


def _two_gaussians() -> list[dict[str, Any]]:
    return [
        {"kind": "gaussian", "mean": [-2.0, 0.0], "cov": 0.25},
        {"kind": "gaussian", "mean": [2.0, 0.0], "cov": 0.25},
    ]


@dataclass
class DataSettings:
    """Settings for the synthetic classes.

    Settings:
        classes: One `{kind: ..., ...}` mapping per class, in label order.
        source: Label of the class the generator is pretrained on.
        reference_samples: Samples per class used as evaluation references.
    """

    classes: Optional[list[Any]] = None
    source: int = 0
    reference_samples: int = 2000

    def __post_init__(self) -> None:
        if self.classes is None:
            self.classes = _two_gaussians()
        if len(self.classes) < 2:
            raise ConfigurationError("classes: at least two classes are required", key="classes")
        if not 0 <= self.source < len(self.classes):
            raise ConfigurationError(
                f"source: {self.source} is not a class id", key="source"
            )
        if self.reference_samples < 3:
            raise ConfigurationError(
                "reference_samples: must be at least 3", key="reference_samples"
            )
