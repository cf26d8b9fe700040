"""Utilities for managing settings dataclasses.

Decorators:
    dataclass: Converts a decorated class into a dataclass and adds a strict
        `from_dict` method that coerces values to the annotated field types and
        rejects unknown keys, plus a `to_dict` method for echoing settings.
"""

from __future__ import annotations

from typing import Any, TypeVar, Union
import dataclasses
import typing

from .errors import ConfigurationError

__all__ = ("dataclass",)


T = TypeVar("T")


def _coerce(key: str, value: Any, hint: Any) -> Any:
    """Convert a parsed configuration value to the annotated type.

    Args:
        key: The name of the field, used in error messages.
        value: The value produced by the configuration parser.
        hint: The resolved type annotation of the field.

    Returns: The value converted to the annotated type.
    """
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    if origin is Union:
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(key, value, inner[0])
    if hint is Any or hint is dict or origin in (dict, list) and not args:
        return value
    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigurationError(
                f"{key}: expected a list, got {value!r}", key=key
            )
        return tuple(_coerce(key, item, args[0]) for item in value)
    if origin is list:
        if not isinstance(value, (list, tuple)):
            raise ConfigurationError(
                f"{key}: expected a list, got {value!r}", key=key
            )
        return [_coerce(key, item, args[0]) for item in value]
    if origin is dict:
        if not isinstance(value, dict):
            raise ConfigurationError(
                f"{key}: expected a mapping, got {value!r}", key=key
            )
        return dict(value)
    if hint is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false"):
            return value.lower() == "true"
        raise ConfigurationError(f"{key}: expected true or false, got {value!r}", key=key)
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise ConfigurationError(f"{key}: expected an integer, got {value!r}", key=key)
        try:
            return int(value)
        except ValueError:
            raise ConfigurationError(
                f"{key}: expected an integer, got {value!r}", key=key
            ) from None
    if hint is float:
        if isinstance(value, bool):
            raise ConfigurationError(f"{key}: expected a number, got {value!r}", key=key)
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigurationError(
                f"{key}: expected a number, got {value!r}", key=key
            ) from None
    if hint is str:
        if not isinstance(value, str):
            raise ConfigurationError(f"{key}: expected a string, got {value!r}", key=key)
        return value
    return value


@classmethod
def from_dict(cls: type[T], source: dict[str, Any]) -> T:
    """A method to be attached to a dataclass that instantiates from a dict.

    Args:
        source: A dictionary containing keys and values that will be used to
            initialize the dataclass. Hyphens in keys are first converted into
            underscores. Values are coerced to the annotated field types.

    Returns: An instance of the dataclass.

    Raises:
        ConfigurationError: A key is not a field of the dataclass or a value
            cannot be converted to the type of its field.
    """
    hints = typing.get_type_hints(cls)
    fields = cls.__dataclass_fields__.keys()
    values = {}
    for k, v in source.items():
        attr = k.replace("-", "_")
        if attr not in fields:
            raise ConfigurationError(f"{k}: unknown setting", key=k)
        values[attr] = _coerce(attr, v, hints[attr])
    return cls(**values)


def to_dict(self) -> dict[str, Any]:
    """Return the fields of the dataclass as a dict in declaration order."""
    return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}


def dataclass(cls: type[T] = None, *, frozen: bool = False) -> type[T]:
    """Converts a class into a dataclass and adds `from_dict` and `to_dict`."""

    def wrap(cls: type[T]) -> type[T]:
        inner = dataclasses.dataclass(cls, frozen=frozen)
        if not hasattr(inner, "from_dict"):
            inner.from_dict = from_dict
        if not hasattr(inner, "to_dict"):
            inner.to_dict = to_dict
        return inner

    return wrap if cls is None else wrap(cls)
