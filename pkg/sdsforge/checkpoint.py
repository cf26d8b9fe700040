"""Reading and writing SDSFORGE-CKPT v1 checkpoints.

A checkpoint is text: the header line `SDSFORGE-CKPT v1`, then for every
array, in lexicographic name order, a line `ARRAY <name> <ndim> <dims...>`
followed by one line of its values as 17-significant-digit decimals in
row-major order, and finally the line `END`.

Functions:
    write_checkpoint: Write named arrays.
    read_checkpoint: Read named arrays.
    save_generator, load_generator: Generator (and encoder) checkpoints.
    save_denoiser, load_denoiser: Denoiser checkpoints.
    save_classifier, load_classifier: Classifier checkpoints.
"""

from __future__ import annotations

from typing import Mapping
import logging
import math
import pathlib

import numpy as np

from .diffusion import Denoiser
from .errors import CheckpointError, ShapeError
from .generator import LatentEncoder, StyleGenerator
from .metrics import ConditionClassifier

__all__ = (
    "HEADER",
    "load_classifier",
    "load_denoiser",
    "load_generator",
    "read_checkpoint",
    "save_classifier",
    "save_denoiser",
    "save_generator",
    "write_checkpoint",
)


HEADER = "SDSFORGE-CKPT v1"


def write_checkpoint(path: pathlib.Path, arrays: Mapping[str, np.ndarray]) -> None:
    """Write arrays to `path`, creating parent directories."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [HEADER]
    for name in sorted(arrays):
        array = np.asarray(arrays[name], dtype=np.float64)
        if any(c.isspace() for c in name):
            raise ValueError(f"array name {name!r} contains whitespace")
        lines.append(" ".join(["ARRAY", name, str(array.ndim), *map(str, array.shape)]))
        lines.append(" ".join(format(float(v), ".17g") for v in array.reshape(-1)))
    lines.append("END")
    path.write_text("\n".join(lines) + "\n")
    logging.debug("Wrote %d arrays to %s", len(arrays), path)


def read_checkpoint(path: pathlib.Path) -> dict[str, np.ndarray]:
    """Read the arrays of a checkpoint.

    Raises:
        OSError: The file cannot be read.
        CheckpointError: The header, an array block or the terminator is
            malformed; names the file and line.
    """
    path = pathlib.Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != HEADER:
        found = lines[0].strip() if lines else "an empty file"
        raise CheckpointError(f"expected {HEADER!r}, found {found!r}", path=str(path), line=1)
    arrays: dict[str, np.ndarray] = {}
    number = 1
    while True:
        number += 1
        if number > len(lines):
            raise CheckpointError("missing END", path=str(path), line=number)
        fields = lines[number - 1].split()
        if fields == ["END"]:
            break
        if len(fields) < 3 or fields[0] != "ARRAY":
            raise CheckpointError(
                f"expected 'ARRAY <name> <ndim> <dims...>' or 'END', got {lines[number - 1]!r}",
                path=str(path),
                line=number,
            )
        name = fields[1]
        try:
            ndim = int(fields[2])
            shape = tuple(int(d) for d in fields[3:])
        except ValueError:
            raise CheckpointError(
                f"{name}: malformed dimensions", path=str(path), line=number
            ) from None
        if len(shape) != ndim or any(d < 0 for d in shape):
            raise CheckpointError(
                f"{name}: {ndim} dimensions declared, got {fields[3:]}",
                path=str(path),
                line=number,
            )
        if name in arrays:
            raise CheckpointError(f"{name}: repeated array", path=str(path), line=number)
        number += 1
        if number > len(lines):
            raise CheckpointError(f"{name}: missing values", path=str(path), line=number)
        try:
            values = np.array([float(v) for v in lines[number - 1].split()], dtype=np.float64)
        except ValueError:
            raise CheckpointError(f"{name}: malformed value", path=str(path), line=number) from None
        if values.size != math.prod(shape) or not np.isfinite(values).all():
            raise CheckpointError(
                f"{name}: expected {math.prod(shape)} finite values, got {values.size}",
                path=str(path),
                line=number,
            )
        arrays[name] = values.reshape(shape)
    return arrays


def _require(path: pathlib.Path, arrays: Mapping[str, np.ndarray], names: tuple[str, ...], kind: str) -> None:
    missing = [name for name in names if name not in arrays]
    if missing:
        raise CheckpointError(
            f"not a {kind} checkpoint (missing {', '.join(missing)})", path=str(path)
        )


def save_generator(path: pathlib.Path, gen: StyleGenerator, encoder: LatentEncoder) -> None:
    write_checkpoint(path, {**gen.arrays(), **encoder.arrays()})


def load_generator(path: pathlib.Path) -> tuple[StyleGenerator, LatentEncoder]:
    """Load a generator and its encoder; `encoder.q` selects the orthogonal mode."""
    arrays = read_checkpoint(path)
    _require(path, arrays, ("mapping.fc1.weight", "synthesis.seed", "head.weight"), "generator")
    q = arrays.pop("encoder.q", None)
    encoder = LatentEncoder() if q is None else LatentEncoder("orthogonal", q)
    try:
        gen = StyleGenerator.from_parameters(
            arrays, encoder=encoder.mode
        ).requires_grad_(False)
    except (KeyError, ShapeError) as e:
        raise CheckpointError(f"inconsistent generator arrays: {e}", path=str(path)) from None
    return gen, encoder


def save_denoiser(path: pathlib.Path, den: Denoiser) -> None:
    write_checkpoint(path, den.arrays())


def load_denoiser(path: pathlib.Path) -> Denoiser:
    arrays = read_checkpoint(path)
    _require(path, arrays, ("embedding", "output.weight", "layers.0.weight"), "denoiser")
    try:
        return Denoiser.from_parameters(arrays).requires_grad_(False)
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"inconsistent denoiser arrays: {e}", path=str(path)) from None


def save_classifier(path: pathlib.Path, clf: ConditionClassifier) -> None:
    write_checkpoint(path, clf.arrays())


def load_classifier(path: pathlib.Path) -> ConditionClassifier:
    arrays = read_checkpoint(path)
    _require(path, arrays, ("hidden.weight", "output.weight"), "classifier")
    try:
        return ConditionClassifier.from_parameters(arrays)
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"inconsistent classifier arrays: {e}", path=str(path)) from None
