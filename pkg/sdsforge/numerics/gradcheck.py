"""Finite-difference gradients used as the oracle for tape gradients.

Functions:
    finite_difference_grad: Central-difference gradient of a scalar function.
    relative_error: A scale-aware discrepancy between two gradients.
"""

from __future__ import annotations

from typing import Any, Callable, Union

import numpy as np

from .tensor import Tensor, no_grad

__all__ = (
    "finite_difference_grad",
    "relative_error",
)


def _scalar(value: Union[Tensor, float]) -> float:
    if isinstance(value, Tensor):
        return value.item()
    return float(value)


def finite_difference_grad(
    f: Callable[[Tensor], Any], x: Tensor, h: float = 1e-5
) -> Tensor:
    """Estimate the gradient of a scalar function by central differences.

    Entry i of the result is (f(x + h e_i) - f(x - h e_i)) / (2h).

    Args:
        f: A deterministic function of a tensor returning a scalar tensor or
            a float.
        x: The point at which to differentiate.
        h: The step size.

    Returns: A tensor with the shape of x.
    """
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    base = x.numpy()
    grad = np.zeros_like(base)
    with no_grad():
        for index in np.ndindex(base.shape):
            plus = base.copy()
            plus[index] += h
            minus = base.copy()
            minus[index] -= h
            grad[index] = (_scalar(f(Tensor(plus))) - _scalar(f(Tensor(minus)))) / (2 * h)
    return Tensor(grad)


def relative_error(actual: Any, expected: Any) -> float:
    """Return max |actual - expected| divided by the larger max magnitude."""
    a = actual.data if isinstance(actual, Tensor) else np.asarray(actual, dtype=np.float64)
    b = expected.data if isinstance(expected, Tensor) else np.asarray(expected, dtype=np.float64)
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
    if scale == 0.0:
        return 0.0
    return float(np.abs(a - b).max() / scale)
