"""Utilities for managing the experiment configuration.

Configuration files hold one `key = value` line per setting, where keys are
dotted (`sds.t_max = 500`) and `#` starts a comment. Values are read as YAML
flow scalars, lists or mappings and converted to the type of the setting.

Classes:
    ExperimentConfig: Every section of an experiment with defaults applied.

Functions:
    parse_config: Parse configuration text into an ExperimentConfig.
    read_config: Parse a configuration file, or return defaults for None.
"""

from __future__ import annotations

from typing import Any, Mapping, Optional
import dataclasses
import pathlib

import yaml

from .. import distributions
from ..diffusion import DenoiserTrainConfig, ScheduleSettings
from ..errors import ConfigurationError
from ..generator import GeneratorSettings, PretrainSettings
from ..metrics import ClassifierSettings
from ..sds import SDSConfig
from .data import DataSettings

__all__ = (
    "DataSettings",
    "ExperimentConfig",
    "parse_config",
    "read_config",
)


SECTIONS = {
    "classifier": ClassifierSettings,
    "data": DataSettings,
    "denoiser": DenoiserTrainConfig,
    "generator": GeneratorSettings,
    "pretrain": PretrainSettings,
    "schedule": ScheduleSettings,
    "sds": SDSConfig,
}

TOP_LEVEL = {"seed": int, "out": str}


def _plain(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def _render(value: Any) -> str:
    """Render a value so that `yaml.safe_load` and coercion reproduce it."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    text = yaml.safe_dump(
        _plain(value), default_flow_style=True, width=float("inf"), sort_keys=False
    ).strip()
    if text.endswith("..."):
        text = text[:-3].rstrip()
    return text


def _known(key: str) -> bool:
    if key in TOP_LEVEL:
        return True
    section, _, field = key.partition(".")
    cls = SECTIONS.get(section)
    return cls is not None and field.replace("-", "_") in cls.__dataclass_fields__


@dataclasses.dataclass
class ExperimentConfig:
    """The resolved configuration of an experiment.

    Attributes:
        seed: Seed of the labeled data and reference draws.
        out: Default output directory.
        schedule, denoiser, generator, pretrain, classifier, sds, data: The
            section settings.
    """

    seed: int = 0
    out: str = "out"
    schedule: ScheduleSettings = dataclasses.field(default_factory=ScheduleSettings)
    denoiser: DenoiserTrainConfig = dataclasses.field(default_factory=DenoiserTrainConfig)
    generator: GeneratorSettings = dataclasses.field(default_factory=GeneratorSettings)
    pretrain: PretrainSettings = dataclasses.field(default_factory=PretrainSettings)
    classifier: ClassifierSettings = dataclasses.field(default_factory=ClassifierSettings)
    sds: SDSConfig = dataclasses.field(default_factory=SDSConfig)
    data: DataSettings = dataclasses.field(default_factory=DataSettings)

    @classmethod
    def from_flat(
        cls,
        values: Mapping[str, Any],
        lines: Optional[Mapping[str, int]] = None,
        source: Optional[str] = None,
    ) -> ExperimentConfig:
        """Build a config from dotted keys.

        Args:
            values: Parsed values keyed by dotted key.
            lines: The line each key was read from, for error messages.
            source: The name of the configuration file, for error messages.

        Raises:
            ConfigurationError: A key is unknown, a value has the wrong type,
                or a setting or combination of settings is invalid.
        """
        lines = lines or {}
        grouped: dict[str, dict[str, Any]] = {name: {} for name in SECTIONS}
        top: dict[str, Any] = {}
        for key, value in values.items():
            if not _known(key):
                raise ConfigurationError(
                    f"{key}: unknown setting", key=key, line=lines.get(key), source=source
                )
            if key in TOP_LEVEL:
                top[key] = value
            else:
                section, _, field = key.partition(".")
                grouped[section][field] = value
        sections = {}
        for name, settings_cls in SECTIONS.items():
            try:
                sections[name] = settings_cls.from_dict(grouped[name])
            except ConfigurationError as e:
                key = f"{name}.{e.key}" if e.key else name
                message = f"{name}.{e.message}" if e.key else f"{name}: {e.message}"
                raise ConfigurationError(
                    message, key=key, line=lines.get(key), source=source
                ) from None
        try:
            seed = int(top.get("seed", 0))
        except (TypeError, ValueError):
            raise ConfigurationError(
                f"seed: expected an integer, got {top['seed']!r}",
                key="seed",
                line=lines.get("seed"),
                source=source,
            ) from None
        config = cls(seed=seed, out=str(top.get("out", "out")), **sections)
        config.validate(lines, source)
        return config

    def validate(
        self, lines: Optional[Mapping[str, int]] = None, source: Optional[str] = None
    ) -> None:
        """Check settings that span sections.

        Raises:
            ConfigurationError: Names the offending key.
        """
        lines = lines or {}

        def fail(key: str, message: str) -> None:
            raise ConfigurationError(
                f"{key}: {message}", key=key, line=lines.get(key), source=source
            )

        if self.sds.t_max > self.schedule.T:
            fail("sds.t_max", f"{self.sds.t_max} exceeds schedule.T = {self.schedule.T}")
        if self.sds.k is not None and self.sds.k > self.generator.layers:
            fail(
                "sds.k",
                f"cannot select {self.sds.k} of {self.generator.layers} synthesis layers",
            )
        if self.sds.target >= len(self.data.classes):
            fail("sds.target", f"{self.sds.target} is not a class id")
        if self.sds.target == self.data.source:
            fail("sds.target", "the target class must differ from data.source")
        try:
            samplers = self.samplers()
        except ConfigurationError as e:
            fail("data.classes", e.message)
        dims = {sampler.dim for sampler in samplers}
        if dims != {self.generator.out_dim}:
            fail(
                "generator.out_dim",
                f"{self.generator.out_dim} does not match class dimensions {sorted(dims)}",
            )

    def samplers(self) -> list[Any]:
        """Return one distribution sampler per class, in label order."""
        return [distributions.create(spec) for spec in self.data.classes]

    def flat(self) -> dict[str, Any]:
        """Return every setting keyed by its dotted key."""
        values: dict[str, Any] = {"seed": self.seed, "out": self.out}
        for name in SECTIONS:
            for field, value in getattr(self, name).to_dict().items():
                values[f"{name}.{field}"] = value
        return values

    def echo(self) -> str:
        """Render every setting, sorted by key, as parseable configuration text."""
        return "".join(
            f"{key} = {_render(value)}\n" for key, value in sorted(self.flat().items())
        )

    def with_value(self, key: str, value: Any) -> ExperimentConfig:
        """Return a copy with one setting replaced and every check re-run."""
        values = self.flat()
        if not _known(key):
            raise ConfigurationError(f"{key}: unknown setting", key=key)
        values[key] = value
        return ExperimentConfig.from_flat(values)


def parse_config(text: str, source: Optional[str] = None) -> ExperimentConfig:
    """Parse `key = value` lines into a config with defaults for missing keys.

    Raises:
        ConfigurationError: A line is malformed, a key is unknown or repeated,
            a value cannot be parsed or converted, or a setting is invalid.
            The message names the key and line.
    """
    values: dict[str, Any] = {}
    lines: dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        key, sep, value = content.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigurationError(
                f"expected 'key = value', got {content!r}", line=number, source=source
            )
        if not value:
            raise ConfigurationError(f"{key}: missing value", key=key, line=number, source=source)
        if key in values:
            raise ConfigurationError(
                f"{key}: repeated (first set on line {lines[key]})",
                key=key,
                line=number,
                source=source,
            )
        if not _known(key):
            raise ConfigurationError(
                f"{key}: unknown setting", key=key, line=number, source=source
            )
        try:
            values[key] = yaml.safe_load(value)
        except yaml.YAMLError as e:
            problem = getattr(e, "problem", None) or "malformed value"
            raise ConfigurationError(
                f"{key}: cannot parse {value!r} ({problem})", key=key, line=number, source=source
            ) from None
        lines[key] = number
    return ExperimentConfig.from_flat(values, lines, source)


def read_config(path: Optional[pathlib.Path]) -> ExperimentConfig:
    """Read a configuration file; None yields the defaults.

    Raises:
        OSError: The file cannot be read.
        ConfigurationError: The contents are invalid.
    """
    if path is None:
        return ExperimentConfig()
    return parse_config(pathlib.Path(path).read_text(), source=str(path))
