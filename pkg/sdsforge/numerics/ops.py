"""Differentiable primitives over Tensors.

Every primitive checks operand shapes, rejects non-finite results, and records
itself with its vector-Jacobian product on the active tape when any operand
requires a gradient.

Broadcasting is limited to a leading batch dimension: two operands conform if
their shapes are equal, if one shape equals the other without its leading
dimension, or if they differ only in a leading dimension of size one.

Functions:
    add, sub, mul: Elementwise arithmetic.
    scale: Multiplication by a Python scalar.
    matmul: Matrix products of 1-D and 2-D operands.
    sum, mean: Reductions over every entry.
    norm: The L2 norm over every entry.
    tanh, silu, leaky_relu: Activations.
    concat: Concatenation along the last axis.
    take: Row lookup into a table.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence
import builtins

import numpy as np

from ..errors import NumericError, ShapeError
from .tensor import Tensor, active_tape, as_tensor

__all__ = (
    "add",
    "concat",
    "leaky_relu",
    "matmul",
    "mean",
    "mul",
    "norm",
    "scale",
    "silu",
    "sub",
    "sum",
    "take",
    "tanh",
)


LEAKY_SLOPE = 0.2


def _apply(
    name: str,
    inputs: tuple[Tensor, ...],
    value: np.ndarray,
    vjp: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]],
) -> Tensor:
    if not np.isfinite(value).all():
        raise NumericError(f"{name} produced non-finite values")
    requires_grad = builtins.any(t.requires_grad for t in inputs)
    out = Tensor._wrap(np.asarray(value, dtype=np.float64), requires_grad)
    tape = active_tape()
    if requires_grad and tape is not None:
        tape.record(name, inputs, out, vjp)
    return out


def _conform(name: str, a: Tensor, b: Tensor) -> None:
    sa, sb = a.shape, b.shape
    if sa == sb or sa[1:] == sb or sb[1:] == sa:
        return
    if len(sa) == len(sb) and sa and sa[1:] == sb[1:] and 1 in (sa[0], sb[0]):
        return
    raise ShapeError(f"{name}: shapes {sa} and {sb} do not conform")


def _reduce(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to an operand's shape."""
    if grad.shape == shape:
        return grad
    if grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    if grad.shape != shape:
        grad = grad.sum(axis=0, keepdims=True)
    return grad


def add(a: Tensor, b: Tensor) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _conform("add", a, b)
    return _apply(
        "add",
        (a, b),
        a.data + b.data,
        lambda g: (_reduce(g, a.shape), _reduce(g, b.shape)),
    )


def sub(a: Tensor, b: Tensor) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _conform("sub", a, b)
    return _apply(
        "sub",
        (a, b),
        a.data - b.data,
        lambda g: (_reduce(g, a.shape), _reduce(-g, b.shape)),
    )


def mul(a: Tensor, b: Tensor) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _conform("mul", a, b)
    return _apply(
        "mul",
        (a, b),
        a.data * b.data,
        lambda g: (_reduce(g * b.data, a.shape), _reduce(g * a.data, b.shape)),
    )


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return _apply("scale", (a,), a.data * c, lambda g: (g * c,))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Multiply 1-D or 2-D operands; a 1-D left operand acts as a row vector."""
    a, b = as_tensor(a), as_tensor(b)
    if not (1 <= a.ndim <= 2 and 1 <= b.ndim <= 2):
        raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} must be 1-D or 2-D")
    inner_a = a.shape[-1]
    inner_b = b.shape[0]
    if inner_a != inner_b:
        raise ShapeError(
            f"matmul: inner dimensions of {a.shape} and {b.shape} differ"
        )
    a2 = a.data if a.ndim == 2 else a.data[None, :]
    b2 = b.data if b.ndim == 2 else b.data[:, None]
    value = a.data @ b.data

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        g2 = np.asarray(g).reshape(a2.shape[0], b2.shape[1])
        return (g2 @ b2.T).reshape(a.shape), (a2.T @ g2).reshape(b.shape)

    return _apply("matmul", (a, b), value, vjp)


def sum(a: Tensor) -> Tensor:
    return _apply(
        "sum", (a,), np.asarray(a.data.sum()), lambda g: (np.full(a.shape, float(g)),)
    )


def mean(a: Tensor) -> Tensor:
    n = a.size
    return _apply(
        "mean",
        (a,),
        np.asarray(a.data.mean()),
        lambda g: (np.full(a.shape, float(g) / n),),
    )


def norm(a: Tensor) -> Tensor:
    value = float(np.sqrt(np.sum(a.data * a.data)))

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        if value == 0.0:
            return (np.zeros(a.shape),)
        return (a.data * (float(g) / value),)

    return _apply("norm", (a,), np.asarray(value), vjp)


def tanh(a: Tensor) -> Tensor:
    value = np.tanh(a.data)
    return _apply("tanh", (a,), value, lambda g: (g * (1.0 - value * value),))


def silu(a: Tensor) -> Tensor:
    sigmoid = 0.5 * (1.0 + np.tanh(0.5 * a.data))
    value = a.data * sigmoid
    return _apply(
        "silu",
        (a,),
        value,
        lambda g: (g * (sigmoid * (1.0 + a.data * (1.0 - sigmoid))),),
    )


def leaky_relu(a: Tensor, slope: float = LEAKY_SLOPE) -> Tensor:
    factor = np.where(a.data > 0.0, 1.0, slope)
    return _apply("leaky_relu", (a,), a.data * factor, lambda g: (g * factor,))


def concat(tensors: Sequence[Tensor]) -> Tensor:
    """Concatenate tensors along their last axis."""
    tensors = tuple(as_tensor(t) for t in tensors)
    leading = {t.shape[:-1] for t in tensors}
    if len(leading) != 1:
        raise ShapeError(
            "concat: shapes "
            + ", ".join(str(t.shape) for t in tensors)
            + " differ outside the last axis"
        )
    bounds = np.cumsum([t.shape[-1] for t in tensors])[:-1]
    return _apply(
        "concat",
        tensors,
        np.concatenate([t.data for t in tensors], axis=-1),
        lambda g: tuple(np.split(g, bounds, axis=-1)),
    )


def take(table: Tensor, indices: np.ndarray) -> Tensor:
    """Select rows of a 2-D table; the gradient scatters back into the rows."""
    indices = np.asarray(indices, dtype=np.int64)
    if table.ndim != 2:
        raise ShapeError(f"take: table shape {table.shape} is not 2-D")
    if indices.size and (indices.min() < 0 or indices.max() >= table.shape[0]):
        raise ShapeError(
            f"take: indices out of range for table shape {table.shape}"
        )

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        grad = np.zeros(table.shape)
        np.add.at(grad, indices, g)
        return (grad,)

    return _apply("take", (table,), table.data[indices], vjp)
