"""The adaptation loop and its report.

Classes:
    Evaluator: Reference samples, classifier and evaluation latents.
    EvaluationRow: Metrics at one evaluated iteration.
    AdaptationReport: Evaluation rows, the per-step trace and sample
        snapshots of a run.

Functions:
    adapt: Adapt a copy of a generator toward the target condition.
"""

from __future__ import annotations

from typing import Optional, Sequence
import dataclasses
import logging
import math
import time

import numpy as np

from ..diffusion import Critic, NoiseSchedule
from ..errors import ConfigurationError
from ..generator import LatentEncoder, StyleGenerator, snapshot_frozen
from ..metrics import (
    ConditionClassifier,
    condition_score,
    frechet_gaussian_distance,
    pairwise_diversity,
)
from ..numerics import Rng, Tensor, no_grad
from .engine import AdaptationState, StepMetrics, adaptation_step
from .layers import select_layers
from .settings import SDSConfig

__all__ = (
    "AdaptationReport",
    "EvaluationRow",
    "Evaluator",
    "REPORT_COLUMNS",
    "adapt",
)


REPORT_COLUMNS = (
    "iteration",
    "fd_source",
    "fd_target",
    "diversity",
    "cond_score",
    "g_sds",
    "g_dir",
    "g_rec",
)


@dataclasses.dataclass(frozen=True)
class EvaluationRow:
    iteration: int
    fd_source: float
    fd_target: float
    diversity: float
    cond_score: float
    g_sds: float
    g_dir: float
    g_rec: float

    def values(self) -> tuple:
        return tuple(getattr(self, column) for column in REPORT_COLUMNS)


@dataclasses.dataclass(eq=False)
class Evaluator:
    """Evaluates generators against fixed references.

    Every call draws the same latents from `seed`, so rows of one run compare
    the generator on identical inputs.

    Attributes:
        source: Reference samples of the source class.
        target: Reference samples of the target class.
        classifier: The held-out classifier, if any; without one the
            condition score is NaN.
        target_label: The class scored by the classifier.
        samples: Generated samples per evaluation.
        seed: Seed of the evaluation latents.
    """

    source: np.ndarray
    target: np.ndarray
    classifier: Optional[ConditionClassifier] = None
    target_label: int = 1
    samples: int = 512
    seed: int = 12345

    @classmethod
    def for_config(
        cls,
        source: np.ndarray,
        target: np.ndarray,
        classifier: Optional[ConditionClassifier],
        cfg: SDSConfig,
    ) -> Evaluator:
        return cls(source, target, classifier, cfg.target, cfg.eval_samples, cfg.eval_seed)

    def generate(self, gen: StyleGenerator) -> np.ndarray:
        """Return the generator's outputs on the evaluation latents."""
        z = Rng(self.seed).normal((self.samples, gen.settings.z_dim))
        with no_grad():
            return gen(Tensor(z)).data

    def evaluate(
        self, gen: StyleGenerator, iteration: int, norms: Sequence[float] = (0.0, 0.0, 0.0)
    ) -> tuple[EvaluationRow, np.ndarray]:
        x = self.generate(gen)
        score = (
            condition_score(x, self.classifier, self.target_label)
            if self.classifier is not None
            else math.nan
        )
        row = EvaluationRow(
            iteration,
            frechet_gaussian_distance(x, self.source).value,
            frechet_gaussian_distance(x, self.target).value,
            pairwise_diversity(x),
            score,
            *norms,
        )
        return row, x


@dataclasses.dataclass(eq=False)
class AdaptationReport:
    """The record of one adaptation run.

    Attributes:
        rows: Evaluation rows in increasing iteration order.
        steps: Metrics of every step.
        layers: Layers adapted at the end of the run.
        selections: (iteration, layers) for every layer selection.
        snapshots: Generated evaluation samples keyed by iteration, at
            0, 25%, 50% and 100% of the run.
        wall_clock: Seconds spent in the loop.
    """

    rows: list[EvaluationRow] = dataclasses.field(default_factory=list)
    steps: list[StepMetrics] = dataclasses.field(default_factory=list)
    layers: tuple[int, ...] = ()
    selections: list[tuple[int, tuple[int, ...]]] = dataclasses.field(default_factory=list)
    snapshots: dict[int, np.ndarray] = dataclasses.field(default_factory=dict)
    wall_clock: float = 0.0

    def final(self) -> Optional[EvaluationRow]:
        return self.rows[-1] if self.rows else None


def _snapshot_iterations(iters: int) -> tuple[int, ...]:
    return tuple(sorted({0, iters // 4, iters // 2, iters}))


def adapt(
    gen: StyleGenerator,
    critic: Critic,
    encoder: LatentEncoder,
    sched: NoiseSchedule,
    cfg: SDSConfig,
    evaluator: Optional[Evaluator] = None,
    layers: Optional[Sequence[int]] = None,
) -> tuple[StyleGenerator, AdaptationReport]:
    """Adapt a copy of `gen` toward `cfg.target` for `cfg.iters` steps.

    The input generator is never modified. Layers come from `layers` when
    given, all layers when k covers them, and `select_layers` otherwise. With
    an evaluator, rows are written at iteration 0, every `cfg.eval_every`
    iterations and at the final iteration; their gradient norms average the
    steps since the previous row.

    Raises:
        ConfigurationError: t_max exceeds the schedule or k exceeds the
            number of layers.
        NumericError: A parameter became non-finite; names the iteration.
    """
    if cfg.t_max > sched.T:
        raise ConfigurationError(
            f"sds.t_max: {cfg.t_max} exceeds the schedule's {sched.T} timesteps",
            key="sds.t_max",
        )
    k = cfg.layer_count(gen.layers)
    started = time.perf_counter()
    rng = Rng(cfg.seed)
    select_rng = rng.spawn()
    trainable = gen.copy()
    frozen = snapshot_frozen(gen)

    def choose() -> tuple[int, ...]:
        if k == gen.layers:
            return tuple(range(1, gen.layers + 1))
        return select_layers(frozen, critic, encoder, sched, cfg, select_rng).layers

    chosen = tuple(layers) if layers is not None else choose()
    state = AdaptationState.create(trainable, frozen, encoder, critic, sched, cfg, chosen)
    report = AdaptationReport(layers=chosen, selections=[(0, chosen)])
    snapshot_at = _snapshot_iterations(cfg.iters)
    logging.info(
        "Adapting layers %s for %d iterations toward condition %d",
        ", ".join(map(str, chosen)),
        cfg.iters,
        cfg.target,
    )

    def record(iteration: int, pending: list[StepMetrics]) -> None:
        norms = (0.0, 0.0, 0.0)
        if pending:
            norms = tuple(
                float(np.mean([getattr(m, column) for m in pending]))
                for column in ("g_sds", "g_dir", "g_rec")
            )
        row, x = evaluator.evaluate(state.generator, iteration, norms)
        report.rows.append(row)
        if iteration in snapshot_at:
            report.snapshots[iteration] = x
        logging.info(
            "iteration %d: fd_source %.4f fd_target %.4f diversity %.4f cond_score %.4f",
            iteration,
            row.fd_source,
            row.fd_target,
            row.diversity,
            row.cond_score,
        )

    pending: list[StepMetrics] = []
    if evaluator is not None:
        record(0, pending)
    for iteration in range(1, cfg.iters + 1):
        metrics = adaptation_step(state, cfg, rng)
        report.steps.append(metrics)
        pending.append(metrics)
        if cfg.reselect_every and iteration % cfg.reselect_every == 0 and iteration < cfg.iters:
            if k < gen.layers:
                selected = select_layers(
                    snapshot_frozen(state.generator), critic, encoder, sched, cfg, select_rng
                ).layers
                state.select(selected)
                report.selections.append((iteration, selected))
                logging.debug("iteration %d: reselected layers %s", iteration, selected)
        if evaluator is not None and (iteration % cfg.eval_every == 0 or iteration == cfg.iters):
            record(iteration, pending)
            pending = []
        if evaluator is not None and iteration in snapshot_at and iteration not in report.snapshots:
            report.snapshots[iteration] = evaluator.generate(state.generator)
    report.layers = state.layers
    report.wall_clock = time.perf_counter() - started
    state.generator.requires_grad_(False)
    return state.generator, report
