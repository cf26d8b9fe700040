#!/usr/bin/env python3
"""
The sdsforge command line: every pipeline stage as a subcommand.

Functions:
    configure_logging: Configure the root logger from the environment.
    build_parser: The argument parser with one subparser per stage.
    main: The entry point; returns the exit status.

Environment Variables:
    SDSFORGE_VERBOSITY: quiet, normal (default), debug or trace.
"""

from __future__ import annotations

from typing import Optional, Sequence
import argparse
import logging
import os
import pathlib
import sys

import yaml

from . import checkpoint, report, runner
from .errors import SdsforgeError
from .sds import AdaptationReport
from .settings import ExperimentConfig, read_config

__all__ = (
    "build_parser",
    "configure_logging",
    "main",
)


VERBOSITY = {
    "quiet": logging.WARNING,
    "normal": logging.INFO,
    "debug": logging.DEBUG,
    "trace": logging.TRACE,
}


def configure_logging() -> None:
    """Configure the root logger with the level named by SDSFORGE_VERBOSITY."""
    name = os.environ.get("SDSFORGE_VERBOSITY", "normal").strip().lower()
    logging.basicConfig(
        level=VERBOSITY.get(name, logging.INFO),
        format="[%(levelname)s] %(message)s",
        force=True,
    )
    if name not in VERBOSITY:
        logging.warning(
            "SDSFORGE_VERBOSITY: unknown value %r, expected one of %s",
            name,
            ", ".join(VERBOSITY),
        )


def _output(cfg: ExperimentConfig, out: Optional[pathlib.Path]) -> pathlib.Path:
    return out if out is not None else pathlib.Path(cfg.out)


def _classifier(path: Optional[pathlib.Path], den: Optional[pathlib.Path]):
    if path is None and den is not None:
        sibling = den.parent / "classifier.ckpt"
        if sibling.exists():
            path = sibling
    if path is None:
        logging.warning("No classifier checkpoint; cond_score will be nan")
        return None
    return checkpoint.load_classifier(path)


def train_denoiser(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    out = _output(cfg, args.out)
    den, clf = runner.train_critic(cfg)
    runner.write_echo(cfg, out)
    checkpoint.save_denoiser(out / "denoiser.ckpt", den)
    checkpoint.save_classifier(out / "classifier.ckpt", clf)
    runner.write_loss_curve(out / "denoiser_loss.csv", den)
    logging.info("Wrote denoiser and classifier to %s", out)


def pretrain_generator(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    out = _output(cfg, args.out)
    gen, encoder = runner.pretrain(cfg)
    runner.write_echo(cfg, out)
    checkpoint.save_generator(out / "generator.ckpt", gen, encoder)
    logging.info("Wrote generator to %s", out)


def select_layers(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    gen, encoder = checkpoint.load_generator(args.gen)
    den = checkpoint.load_denoiser(args.den)
    report.write_ranking(sys.stdout, runner.rank_layers(cfg, gen, encoder, den))


def adapt(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    gen, encoder = checkpoint.load_generator(args.gen)
    den = checkpoint.load_denoiser(args.den)
    clf = _classifier(args.clf, args.den)
    runner.run_adapt(cfg, gen, encoder, den, clf, _output(cfg, args.out))


def evaluate(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    gen, _ = checkpoint.load_generator(args.gen)
    clf = _classifier(args.clf, args.den)
    row, _ = runner.make_evaluator(cfg, clf).evaluate(gen, 0)
    report.write_report(sys.stdout, AdaptationReport(rows=[row]))


def sweep(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    out = _output(cfg, args.out)
    key = runner.sweep_key(args.param)
    values = [yaml.safe_load(v.strip()) for v in args.values.split(",") if v.strip()]
    if args.gen is not None:
        gen, encoder = checkpoint.load_generator(args.gen)
    else:
        logging.info("No --gen given; pretraining a base generator")
        gen, encoder = runner.pretrain(cfg)
        checkpoint.save_generator(out / "generator.ckpt", gen, encoder)
    if args.den is not None:
        den = checkpoint.load_denoiser(args.den)
        clf = _classifier(args.clf, args.den)
    else:
        logging.info("No --den given; training a base denoiser")
        den, clf = runner.train_critic(cfg)
        checkpoint.save_denoiser(out / "denoiser.ckpt", den)
        checkpoint.save_classifier(out / "classifier.ckpt", clf)
    runner.run_sweep(cfg, key, values, gen, encoder, den, clf, out, jobs=args.jobs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdsforge",
        description="Adapt toy style-based generators with a frozen diffusion critic.",
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def command(name: str, handler, help: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help, description=help)
        sub.add_argument("--config", type=pathlib.Path, help="key = value configuration file")
        sub.set_defaults(handler=handler)
        return sub

    def models(sub: argparse.ArgumentParser, required: bool = True) -> None:
        sub.add_argument("--gen", type=pathlib.Path, required=required, help="generator checkpoint")
        sub.add_argument("--den", type=pathlib.Path, required=required, help="denoiser checkpoint")

    def classifier(sub: argparse.ArgumentParser) -> None:
        sub.add_argument(
            "--clf",
            type=pathlib.Path,
            help="classifier checkpoint (default: classifier.ckpt next to --den)",
        )

    def out(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--out", type=pathlib.Path, help="output directory (default: config out)")

    out(command("train-denoiser", train_denoiser, "Train the conditional denoiser and classifier."))
    out(command("pretrain-generator", pretrain_generator, "Pretrain a generator on the source class."))
    models(command("select-layers", select_layers, "Rank synthesis layers as CSV on stdout."))

    sub = command("adapt", adapt, "Adapt a generator toward the target class.")
    models(sub)
    classifier(sub)
    out(sub)

    sub = command("evaluate", evaluate, "Print one metric row for a generator.")
    sub.add_argument("--gen", type=pathlib.Path, required=True, help="generator checkpoint")
    sub.add_argument("--den", type=pathlib.Path, help="denoiser checkpoint, locates the classifier")
    classifier(sub)

    sub = command("sweep", sweep, "Adapt once per value of one sds setting.")
    sub.add_argument("--param", required=True, help="swept key, e.g. t_max or sds.lambda_dir")
    sub.add_argument("--values", required=True, help="comma separated values")
    sub.add_argument("--jobs", type=int, default=1, help="concurrent runs")
    models(sub, required=False)
    classifier(sub)
    out(sub)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit status."""
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = read_config(args.config)
        args.handler(args, cfg)
    except (SdsforgeError, OSError) as e:
        if logging.getLogger().isEnabledFor(logging.DEBUG):
            logging.exception("%s failed", args.command)
        print(f"sdsforge: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
