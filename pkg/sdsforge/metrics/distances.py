"""Distribution-level metrics on sample sets.

Classes:
    SampleSet: Samples with a provenance tag.
    FrechetResult: A Frechet distance and whether it is trustworthy.

Functions:
    frechet_gaussian_distance: Frechet distance between fitted Gaussians.
    pairwise_diversity: Mean Euclidean distance over unordered pairs.
    median_bandwidth: The median pairwise distance of pooled samples.
    mmd_squared: Unbiased Gaussian-kernel MMD^2.
    mmd_squared_gradient: Gradient of mmd_squared with respect to the first set.
"""

from __future__ import annotations

from typing import Optional, Union
import dataclasses
import logging

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist, pdist

from ..errors import UsageError

__all__ = (
    "FrechetResult",
    "SampleSet",
    "as_points",
    "frechet_gaussian_distance",
    "median_bandwidth",
    "mmd_squared",
    "mmd_squared_gradient",
    "pairwise_diversity",
)


CONDITION_LIMIT = 1e12
DIVERSITY_CHUNK = 1024
MEDIAN_POOL = 2000


@dataclasses.dataclass(frozen=True, eq=False)
class SampleSet:
    """An (n, d) matrix of samples.

    Attributes:
        points: The samples.
        tag: Where the samples came from, e.g. `generated@500`.
    """

    points: np.ndarray
    tag: str = ""

    def __post_init__(self) -> None:
        points = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        if not np.isfinite(points).all():
            raise UsageError(f"sample set {self.tag!r} contains non-finite values")
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


Samples = Union[SampleSet, np.ndarray]


def as_points(samples: Samples) -> np.ndarray:
    if isinstance(samples, SampleSet):
        return samples.points
    return SampleSet(samples).points


@dataclasses.dataclass(frozen=True)
class FrechetResult:
    """A Frechet distance.

    Attributes:
        value: The distance.
        ill_conditioned: A covariance had condition number above 1e12, so the
            value rests on a numerically singular fit.
    """

    value: float
    ill_conditioned: bool = False

    def __float__(self) -> float:
        return self.value


def _sqrt_psd(matrix: np.ndarray) -> np.ndarray:
    values, vectors = linalg.eigh(matrix)
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T


def _condition(cov: np.ndarray) -> float:
    values = np.clip(linalg.eigvalsh(cov), 0.0, None)
    if values.max() == 0.0:
        return np.inf
    return float(values.max() / values.min()) if values.min() > 0 else np.inf


def frechet_gaussian_distance(a: Samples, b: Samples) -> FrechetResult:
    """Return the Frechet distance between Gaussians fitted to a and b.

    The value is ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2)
    with eigenvalues clamped at zero.

    Raises:
        UsageError: Either set has fewer than d + 1 samples.
    """
    a, b = as_points(a), as_points(b)
    d = a.shape[1]
    if b.shape[1] != d:
        raise UsageError(f"sample dimensions differ: {d} and {b.shape[1]}")
    if len(a) < d + 1 or len(b) < d + 1:
        raise UsageError(
            f"a Frechet distance in {d} dimensions needs at least {d + 1} samples per set"
        )
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    cov_a = np.atleast_2d(np.cov(a, rowvar=False))
    cov_b = np.atleast_2d(np.cov(b, rowvar=False))
    root_a = _sqrt_psd(cov_a)
    cross = linalg.eigvalsh(root_a @ cov_b @ root_a)
    trace_cross = np.sqrt(np.clip(cross, 0.0, None)).sum()
    diff = mu_a - mu_b
    value = float(diff @ diff + np.trace(cov_a) + np.trace(cov_b) - 2.0 * trace_cross)
    ill = max(_condition(cov_a), _condition(cov_b)) > CONDITION_LIMIT
    if ill:
        logging.warning("Frechet distance computed from an ill-conditioned covariance")
    return FrechetResult(max(value, 0.0), ill)


def pairwise_diversity(a: Samples) -> float:
    """Return the mean distance over all n(n-1)/2 unordered pairs."""
    a = as_points(a)
    n = len(a)
    if n < 2:
        raise UsageError("diversity needs at least two samples")
    total = 0.0
    for start in range(0, n, DIVERSITY_CHUNK):
        block = cdist(a[start : start + DIVERSITY_CHUNK], a[start:])
        total += block[np.triu(np.ones(block.shape, dtype=bool), k=1)].sum()
    return total / (n * (n - 1) / 2)


def median_bandwidth(*sets: Samples) -> float:
    """Return the median pairwise distance of the pooled samples.

    At most the first 2000 pooled points are used.
    """
    pooled = np.concatenate([as_points(s) for s in sets], axis=0)[:MEDIAN_POOL]
    median = float(np.median(pdist(pooled)))
    return median if median > 0 else 1.0


def _kernel(x: np.ndarray, y: np.ndarray, bandwidth: float) -> np.ndarray:
    return np.exp(-0.5 * cdist(x, y, "sqeuclidean") / bandwidth ** 2)


def mmd_squared(a: Samples, b: Samples, bandwidth: Optional[float] = None) -> float:
    """Return the unbiased Gaussian-kernel MMD^2 estimate.

    Diagonal terms are excluded from the within-set sums. The bandwidth
    defaults to the median heuristic over both sets.
    """
    a, b = as_points(a), as_points(b)
    m, n = len(a), len(b)
    if m < 2 or n < 2:
        raise UsageError("MMD needs at least two samples per set")
    if bandwidth is None:
        bandwidth = median_bandwidth(a, b)
    k_aa = _kernel(a, a, bandwidth)
    k_bb = _kernel(b, b, bandwidth)
    k_ab = _kernel(a, b, bandwidth)
    within_a = (k_aa.sum() - np.trace(k_aa)) / (m * (m - 1))
    within_b = (k_bb.sum() - np.trace(k_bb)) / (n * (n - 1))
    return float(within_a + within_b - 2.0 * k_ab.mean())


def mmd_squared_gradient(a: Samples, b: Samples, bandwidth: float) -> np.ndarray:
    """Return d mmd_squared(a, b) / d a, shape (m, d)."""
    a, b = as_points(a), as_points(b)
    m, n = len(a), len(b)
    if m < 2 or n < 2:
        raise UsageError("MMD needs at least two samples per set")
    scale = 1.0 / bandwidth ** 2
    k_aa = _kernel(a, a, bandwidth)
    k_ab = _kernel(a, b, bandwidth)
    # sum_j k_ij (a_i - y_j); the diagonal of k_aa contributes nothing.
    pull_a = a * k_aa.sum(axis=1, keepdims=True) - k_aa @ a
    pull_b = a * k_ab.sum(axis=1, keepdims=True) - k_ab @ b
    return scale * (-2.0 / (m * (m - 1)) * pull_a + 2.0 / (m * n) * pull_b)
