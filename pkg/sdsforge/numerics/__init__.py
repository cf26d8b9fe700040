"""Dense-array arithmetic with reverse-mode differentiation.

Modules:
    tensor: Tensors, the tape, and backward propagation.
    ops: Differentiable primitives.
    rng: The pinned xoshiro256++ generator.
    gradcheck: The finite-difference oracle.
    optim: Adam.
"""

from . import ops
from .gradcheck import finite_difference_grad, relative_error
from .optim import Adam
from .rng import Rng, splitmix64
from .tensor import Tape, Tensor, active_tape, as_tensor, backward, no_grad

__all__ = (
    "Adam",
    "Rng",
    "Tape",
    "Tensor",
    "active_tape",
    "as_tensor",
    "backward",
    "finite_difference_grad",
    "no_grad",
    "ops",
    "relative_error",
    "splitmix64",
)
