"""Pipeline stages shared by the command-line subcommands.

Functions:
    build_schedule: The noise schedule of a config.
    labeled_data: Draw a labeled dataset from the configured classes.
    train_critic: Train the denoiser and the held-out classifier.
    pretrain: Pretrain a generator on the source class.
    references: Source and target reference samples.
    make_evaluator: The evaluator used for report rows.
    rank_layers: Run layer selection.
    run_adapt: Adapt a generator and write its artifacts.
    run_sweep: Adapt once per value of a setting, concurrently.
    sweep_key: The dotted key a sweep parameter names.
    write_echo: Write the resolved configuration next to outputs.
    write_loss_curve: Write a denoiser loss curve as CSV.
"""

from __future__ import annotations

from concurrent import futures
from typing import Any, Optional, Sequence
import logging
import pathlib

import numpy as np

from . import checkpoint, report
from .diffusion import Denoiser, NoiseSchedule, make_linear_schedule, train_denoiser
from .distributions import LabeledSamples, draw_labeled
from .errors import ConfigurationError
from .generator import LatentEncoder, StyleGenerator, make_encoder, pretrain_generator
from .metrics import ConditionClassifier, train_classifier
from .numerics import Rng
from .sds import AdaptationReport, Evaluator, LayerRanking, adapt, select_layers
from .settings import ExperimentConfig
from .task import create_task

__all__ = (
    "build_schedule",
    "labeled_data",
    "make_evaluator",
    "pretrain",
    "rank_layers",
    "references",
    "run_adapt",
    "run_sweep",
    "sweep_key",
    "train_critic",
    "write_echo",
    "write_loss_curve",
)


def build_schedule(cfg: ExperimentConfig) -> NoiseSchedule:
    s = cfg.schedule
    return make_linear_schedule(s.T, s.beta_start, s.beta_end)


def labeled_data(cfg: ExperimentConfig, per_class: int, seed: int) -> LabeledSamples:
    return draw_labeled(cfg.samplers(), per_class, Rng(seed))


def _encoded(dataset: LabeledSamples, encoder: LatentEncoder) -> LabeledSamples:
    if encoder.q is None:
        return dataset
    return LabeledSamples(dataset.points @ encoder.q.T, dataset.labels)


def train_critic(cfg: ExperimentConfig) -> tuple[Denoiser, ConditionClassifier]:
    """Train the denoiser on encoded class data and the classifier on held-out data."""
    encoder = make_encoder(cfg.generator)
    data = labeled_data(cfg, cfg.denoiser.samples_per_class, cfg.seed)
    den = train_denoiser(_encoded(data, encoder), cfg.denoiser, build_schedule(cfg))
    held_out = labeled_data(cfg, cfg.classifier.samples_per_class, cfg.classifier.seed)
    clf = train_classifier(held_out.points, held_out.labels, cfg.classifier)
    return den, clf


def pretrain(cfg: ExperimentConfig) -> tuple[StyleGenerator, LatentEncoder]:
    sampler = cfg.samplers()[cfg.data.source]
    samples = sampler.sample(Rng(cfg.pretrain.seed), cfg.pretrain.samples)
    gen = pretrain_generator(samples, cfg.pretrain, cfg.generator)
    return gen, make_encoder(cfg.generator)


def references(cfg: ExperimentConfig) -> tuple[np.ndarray, np.ndarray]:
    """Draw `data.reference_samples` points from the source and target classes."""
    rng = Rng(cfg.seed).spawn()
    samplers = cfg.samplers()
    source = samplers[cfg.data.source].sample(rng, cfg.data.reference_samples)
    target = samplers[cfg.sds.target].sample(rng, cfg.data.reference_samples)
    return source, target


def make_evaluator(cfg: ExperimentConfig, clf: Optional[ConditionClassifier]) -> Evaluator:
    source, target = references(cfg)
    return Evaluator.for_config(source, target, clf, cfg.sds)


def rank_layers(
    cfg: ExperimentConfig, gen: StyleGenerator, encoder: LatentEncoder, den: Denoiser
) -> LayerRanking:
    return select_layers(gen, den, encoder, build_schedule(cfg), cfg.sds, Rng(cfg.sds.seed))


def write_echo(cfg: ExperimentConfig, out: pathlib.Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.echo").write_text(cfg.echo())


def write_loss_curve(path: pathlib.Path, den: Denoiser) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["step,loss"] + [f"{step},{report.format_value(loss)}" for step, loss in den.loss_curve]
    path.write_text("\n".join(lines) + "\n")


def run_adapt(
    cfg: ExperimentConfig,
    gen: StyleGenerator,
    encoder: LatentEncoder,
    den: Denoiser,
    clf: Optional[ConditionClassifier],
    out: pathlib.Path,
) -> AdaptationReport:
    """Adapt `gen` and write adapted.ckpt, report.csv and scatter_<iteration>.svg."""
    evaluator = make_evaluator(cfg, clf)
    adapted, result = adapt(gen, den, encoder, build_schedule(cfg), cfg.sds, evaluator)
    out.mkdir(parents=True, exist_ok=True)
    write_echo(cfg, out)
    checkpoint.save_generator(out / "adapted.ckpt", adapted, encoder)
    report.write_report(out / "report.csv", result)
    initial = result.snapshots.get(0)
    for iteration, samples in sorted(result.snapshots.items()):
        report.write_svg(
            out / f"scatter_{iteration}.svg",
            [
                ("source", evaluator.source),
                ("target", evaluator.target),
                ("initial", initial),
                (f"iteration {iteration}", samples),
            ],
            title=f"iteration {iteration}",
        )
    logging.info("Wrote adaptation artifacts to %s (%.1f s)", out, result.wall_clock)
    return result


def sweep_key(param: str) -> str:
    key = param if "." in param else f"sds.{param.lower()}"
    if not key.startswith("sds."):
        raise ConfigurationError(
            f"{param}: only sds.* settings can be swept over a fixed base", key=param
        )
    return key


def run_sweep(
    cfg: ExperimentConfig,
    param: str,
    values: Sequence[Any],
    gen: StyleGenerator,
    encoder: LatentEncoder,
    den: Denoiser,
    clf: Optional[ConditionClassifier],
    out: pathlib.Path,
    jobs: int = 1,
) -> list[tuple[str, AdaptationReport]]:
    """Adapt once per value of `param` and write sweep.csv.

    Each run writes its artifacts to `<out>/<leaf>=<value>`. Runs share the
    base generator, critic and classifier read-only.
    """
    key = sweep_key(param)
    configs = [(str(value), cfg.with_value(key, value)) for value in values]
    leaf = key.split(".", 1)[1]
    jobs = max(1, jobs)
    logging.info("Sweeping %s over %s with %d jobs", key, ", ".join(v for v, _ in configs), jobs)
    pending: list[futures.Future] = []
    with futures.ThreadPoolExecutor(max_workers=jobs) as executor:
        for value, run_cfg in configs:
            create_task(
                executor,
                run_adapt,
                run_cfg,
                gen,
                encoder,
                den,
                clf,
                out / f"{leaf}={value}",
                name=f"{key}={value}",
                siblings=pending,
            )
    runs = [(value, future.result()) for (value, _), future in zip(configs, pending)]
    report.write_sweep(out / "sweep.csv", key, runs)
    write_echo(cfg, out)
    return runs
