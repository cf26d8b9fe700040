"""The held-out condition classifier and the condition score.

Classes:
    ConditionClassifier: A one-hidden-layer tanh MLP producing class logits.

Functions:
    train_classifier: Fit a classifier to labeled samples with Adam.
    condition_score: Mean target log-probability of a sample set.
    condition_scores: Mean log-probability of every class.
"""

from __future__ import annotations

from typing import Mapping, Optional
import logging
import math

import numpy as np
from scipy.special import log_softmax, softmax

from ..errors import ConfigurationError
from ..numerics import Adam, Rng, Tape, Tensor, as_tensor, no_grad, ops
from .distances import Samples, as_points
from .settings import ClassifierSettings

__all__ = (
    "ConditionClassifier",
    "condition_score",
    "condition_scores",
    "train_classifier",
)


class ConditionClassifier:
    """Logits = tanh(x W_h + b_h) W_o + b_o.

    Parameters are named `hidden.weight`, `hidden.bias`, `output.weight` and
    `output.bias`.
    """

    def __init__(
        self,
        data_dim: int,
        num_classes: int,
        hidden: int = 64,
        rng: Optional[Rng] = None,
        parameters: Optional[Mapping[str, np.ndarray]] = None,
    ) -> None:
        self.data_dim = data_dim
        self.num_classes = num_classes
        self.hidden = hidden
        shapes = {
            "hidden.weight": (data_dim, hidden),
            "hidden.bias": (hidden,),
            "output.weight": (hidden, num_classes),
            "output.bias": (num_classes,),
        }
        if parameters is not None:
            self.parameters = {name: Tensor(parameters[name]) for name in shapes}
        else:
            rng = rng or Rng(0)
            self.parameters = {
                name: Tensor(
                    np.zeros(shape)
                    if name.endswith("bias")
                    else rng.normal(shape) / math.sqrt(shape[0])
                )
                for name, shape in shapes.items()
            }

    @classmethod
    def from_parameters(cls, parameters: Mapping[str, np.ndarray]) -> ConditionClassifier:
        data_dim, hidden = parameters["hidden.weight"].shape
        return cls(
            data_dim,
            parameters["output.weight"].shape[1],
            hidden=hidden,
            parameters=parameters,
        )

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: p.numpy() for name, p in self.parameters.items()}

    def logits(self, x: Tensor) -> Tensor:
        x = as_tensor(x)
        h = ops.tanh(
            ops.add(ops.matmul(x, self.parameters["hidden.weight"]), self.parameters["hidden.bias"])
        )
        return ops.add(ops.matmul(h, self.parameters["output.weight"]), self.parameters["output.bias"])

    def log_probs(self, samples: Samples) -> np.ndarray:
        """Return log-softmax class probabilities, shape (n, C)."""
        with no_grad():
            logits = self.logits(Tensor(as_points(samples))).data
        return log_softmax(logits, axis=1)


def train_classifier(
    points: np.ndarray, labels: np.ndarray, cfg: ClassifierSettings
) -> ConditionClassifier:
    """Train a classifier with softmax cross-entropy.

    The cross-entropy gradient (softmax - onehot) / batch is injected at the
    logits.

    Raises:
        ConfigurationError: There are no samples or only one class.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) == 0:
        raise ConfigurationError("classifier training set is empty", key="classifier.samples_per_class")
    num_classes = int(labels.max()) + 1
    if num_classes < 2:
        raise ConfigurationError("the classifier needs at least two classes", key="data.classes")
    rng = Rng(cfg.seed)
    clf = ConditionClassifier(points.shape[1], num_classes, cfg.hidden, rng=rng.spawn())
    for parameter in clf.parameters.values():
        parameter.requires_grad = True
    optimizer = Adam(clf.parameters, cfg.lr)
    logging.info("Training condition classifier for %d steps", cfg.steps)
    for step in range(1, cfg.steps + 1):
        index = rng.integers(len(labels), cfg.batch)
        with Tape() as tape:
            logits = clf.logits(Tensor(points[index]))
        seed = softmax(logits.data, axis=1)
        seed[np.arange(cfg.batch), labels[index]] -= 1.0
        tape.backward(logits, seed / cfg.batch)
        optimizer.step()
        optimizer.zero_grad()
        if step % 500 == 0:
            loss = -log_softmax(logits.data, axis=1)[np.arange(cfg.batch), labels[index]].mean()
            logging.debug("classifier step %d cross-entropy %.6f", step, loss)
    for parameter in clf.parameters.values():
        parameter.requires_grad = False
    return clf


def condition_score(samples: Samples, clf: ConditionClassifier, target: int) -> float:
    """Return the mean log-probability the classifier assigns to `target`."""
    return float(clf.log_probs(samples)[:, target].mean())


def condition_scores(samples: Samples, clf: ConditionClassifier) -> np.ndarray:
    """Return the mean log-probability of every class, shape (C,)."""
    return clf.log_probs(samples).mean(axis=0)
