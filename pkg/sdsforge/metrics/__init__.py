"""Sample-set metrics and the held-out condition classifier.

Modules:
    distances: Frechet distance, pairwise diversity and MMD.
    classifier: The condition classifier and condition scores.
    settings: Classifier settings.
"""

from .classifier import ConditionClassifier, condition_score, condition_scores, train_classifier
from .distances import (
    FrechetResult,
    SampleSet,
    frechet_gaussian_distance,
    median_bandwidth,
    mmd_squared,
    mmd_squared_gradient,
    pairwise_diversity,
)
from .settings import ClassifierSettings

__all__ = (
    "ClassifierSettings",
    "ConditionClassifier",
    "FrechetResult",
    "SampleSet",
    "condition_score",
    "condition_scores",
    "frechet_gaussian_distance",
    "median_bandwidth",
    "mmd_squared",
    "mmd_squared_gradient",
    "pairwise_diversity",
    "train_classifier",
)
