"""Dense float64 tensors and the tape that records operations on them.

Classes:
    Tensor: A numpy float64 array with an optional accumulated gradient.
    Record: One primitive operation recorded on a Tape.
    Tape: An ordered list of Records that can be replayed in reverse to
        propagate gradients.

Functions:
    active_tape: Return the tape recording on the current thread, if any.
    no_grad: A context manager that suspends recording on the current thread.
    backward: Propagate a seed gradient from an output on the active tape.
"""

from __future__ import annotations

from typing import Any, Callable, Iterator, Optional, Sequence
import contextlib
import dataclasses
import logging
import threading

import numpy as np

from ..errors import NumericError, ShapeError, UsageError

__all__ = (
    "Record",
    "Tape",
    "Tensor",
    "active_tape",
    "as_tensor",
    "backward",
    "no_grad",
)


_local = threading.local()


def _stack() -> list[Optional[Tape]]:
    if not hasattr(_local, "stack"):
        _local.stack = []
    return _local.stack


def active_tape() -> Optional[Tape]:
    """Return the tape currently recording on this thread, or None."""
    stack = _stack()
    return stack[-1] if stack else None


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Suspend recording for the duration of the block."""
    stack = _stack()
    stack.append(None)
    try:
        yield
    finally:
        stack.pop()


class Tensor:
    """A dense row-major float64 array that may take part in differentiation.

    Tensors created directly are leaves. Tensors returned by the primitives in
    `sdsforge.numerics.ops` are recorded on the active tape whenever one of
    their inputs requires a gradient.
    """

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data: Any, requires_grad: bool = False) -> None:
        """Create a tensor holding a copy of the given values.

        Args:
            data: Anything numpy can convert to a float64 array.
            requires_grad: Whether backward passes should populate `grad`.

        Raises:
            NumericError: The values contain NaN or infinity.
        """
        array = np.array(data, dtype=np.float64)
        if not np.isfinite(array).all():
            raise NumericError("tensor data contains non-finite values")
        self.data: np.ndarray = array
        self.requires_grad: bool = requires_grad
        self.grad: Optional[np.ndarray] = None

    @classmethod
    def _wrap(cls, array: np.ndarray, requires_grad: bool) -> Tensor:
        """Wrap an already validated array without copying it."""
        tensor = cls.__new__(cls)
        tensor.data = array
        tensor.requires_grad = requires_grad
        tensor.grad = None
        return tensor

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        """Return a copy of the values."""
        return self.data.copy()

    def item(self) -> float:
        """Return the value of a single-element tensor."""
        if self.data.size != 1:
            raise ShapeError(f"item() requires a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> Tensor:
        """Return a leaf copy of this tensor that does not require gradients."""
        return Tensor._wrap(self.data.copy(), False)

    def zero_grad(self) -> None:
        self.grad = None

    def _accumulate(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64).reshape(self.shape)
        else:
            self.grad += grad

    def __add__(self, other: Tensor) -> Tensor:
        from .ops import add

        return add(self, other)

    def __sub__(self, other: Tensor) -> Tensor:
        from .ops import sub

        return sub(self, other)

    def __mul__(self, other: Any) -> Tensor:
        from .ops import mul, scale

        return mul(self, other) if isinstance(other, Tensor) else scale(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> Tensor:
        from .ops import scale

        return scale(self, -1.0)

    def __matmul__(self, other: Tensor) -> Tensor:
        from .ops import matmul

        return matmul(self, other)

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor({self.data!r}{flag})"


def as_tensor(value: Any) -> Tensor:
    """Return value unchanged if it is a Tensor, otherwise a constant leaf."""
    return value if isinstance(value, Tensor) else Tensor(value)


@dataclasses.dataclass
class Record:
    """A primitive operation recorded on a tape.

    Attributes:
        name: The primitive that produced the output.
        inputs: The operand tensors, in call order.
        output: The tensor the primitive returned.
        vjp: Maps the adjoint of the output to one adjoint per input (None
            for inputs that do not need one).
    """

    name: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    vjp: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tape:
    """An ordered record of primitive operations.

    A tape records while it is entered as a context manager. Replaying it with
    `backward` visits records in strict reverse recording order and adds the
    gradient of every reachable leaf that requires one into its `grad`.
    Gradients accumulate across calls until the leaves are zeroed.
    """

    def __init__(self) -> None:
        self.records: list[Record] = []
        self._producers: dict[int, int] = {}

    def __enter__(self) -> Tape:
        _stack().append(self)
        return self

    def __exit__(self, *_: Any) -> None:
        stack = _stack()
        if not stack or stack[-1] is not self:
            raise UsageError("tapes must be exited in the order they were entered")
        stack.pop()

    def __len__(self) -> int:
        return len(self.records)

    def record(
        self,
        name: str,
        inputs: tuple[Tensor, ...],
        output: Tensor,
        vjp: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]],
    ) -> None:
        """Append a primitive operation to the tape."""
        self._producers[id(output)] = len(self.records)
        self.records.append(Record(name, inputs, output, vjp))

    def produced(self, tensor: Tensor) -> bool:
        """Return whether the tensor is the output of a record on this tape."""
        index = self._producers.get(id(tensor))
        return index is not None and self.records[index].output is tensor

    def backward(self, output: Tensor, seed: Any = None) -> None:
        """Propagate `seed` from `output` to every reachable leaf.

        After the call each leaf that requires a gradient holds (in addition
        to whatever it held before) the gradient of sum(seed * output) with
        respect to the leaf.

        Args:
            output: A tensor produced by a record on this tape.
            seed: The adjoint of the output; defaults to ones. Must have the
                output's shape.

        Raises:
            UsageError: The output was not produced on this tape.
            ShapeError: The seed does not have the output's shape.
        """
        if not self.produced(output):
            raise UsageError("backward() called on a tensor that is not on this tape")
        seed_array = (
            np.ones(output.shape)
            if seed is None
            else np.asarray(seed.data if isinstance(seed, Tensor) else seed, dtype=np.float64)
        )
        if seed_array.shape != output.shape:
            raise ShapeError(
                f"seed shape {seed_array.shape} does not match output shape {output.shape}"
            )
        index = self._producers[id(output)]
        adjoints: dict[int, np.ndarray] = {id(output): seed_array}
        for record in reversed(self.records[: index + 1]):
            adjoint = adjoints.pop(id(record.output), None)
            if adjoint is None:
                continue
            for tensor, grad in zip(record.inputs, record.vjp(adjoint)):
                if grad is None or not tensor.requires_grad:
                    continue
                if self.produced(tensor):
                    key = id(tensor)
                    adjoints[key] = adjoints[key] + grad if key in adjoints else grad
                else:
                    tensor._accumulate(grad)
        logging.trace("Replayed %d records backward", index + 1)


def backward(output: Tensor, seed: Any = None) -> None:
    """Propagate a seed gradient from an output recorded on the active tape.

    Raises:
        UsageError: No tape is active or the output was not recorded on it.
    """
    tape = active_tape()
    if tape is None:
        raise UsageError("backward() requires an active tape")
    tape.backward(output, seed)
