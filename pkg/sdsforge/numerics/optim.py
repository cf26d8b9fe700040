"""Adam for named tensors.

Classes:
    Adam: Adam with bias correction over a mapping of named parameters.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional

import numpy as np

from .tensor import Tensor

__all__ = ("Adam",)


class Adam:
    """Adam (Kingma and Ba) with the usual default moments.

    Parameters whose `grad` is None are skipped for a step and keep their
    moments. Each parameter counts its own updates for bias correction.
    Updates are applied in place to the parameter data.
    """

    def __init__(
        self,
        parameters: Mapping[str, Tensor],
        lr: float,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ) -> None:
        self.parameters = dict(parameters)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.steps = 0
        self.counts = {name: 0 for name in self.parameters}
        self._m = {name: np.zeros(p.shape) for name, p in self.parameters.items()}
        self._v = {name: np.zeros(p.shape) for name, p in self.parameters.items()}

    def step(self, names: Optional[Iterable[str]] = None) -> None:
        """Apply one update to the named parameters (all if unspecified)."""
        self.steps += 1
        beta1, beta2 = self.betas
        for name in self.parameters if names is None else names:
            parameter = self.parameters[name]
            if parameter.grad is None:
                continue
            self.counts[name] += 1
            count = self.counts[name]
            grad = parameter.grad
            m = self._m[name]
            v = self._v[name]
            m *= beta1
            m += (1.0 - beta1) * grad
            v *= beta2
            v += (1.0 - beta2) * grad * grad
            m_hat = m / (1.0 - beta1 ** count)
            v_hat = v / (1.0 - beta2 ** count)
            parameter.data -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grad(self) -> None:
        for parameter in self.parameters.values():
            parameter.grad = None
