"""Build routers and their configs from a protocol name and flat overrides."""

from __future__ import annotations

import dataclasses
import logging
from typing import Any, Dict, Mapping, Optional, Tuple, Type

from ..core.errors import ConfigError
from .aodv import AodvConfig, AodvRouter
from .base import Router, UniformSource
from .dsdv import DsdvConfig, DsdvRouter
from .dsr import DsrConfig, DsrRouter
from .dymo import DEFAULT_ENERGY, DymoConfig, DymoRouter

logger = logging.getLogger(__name__)

PROTOCOLS: Tuple[str, ...] = ("dymo", "aodv", "dsdv", "dsr")

CONFIG_TYPES: Dict[str, Type[Any]] = {
    "dymo": DymoConfig,
    "aodv": AodvConfig,
    "dsdv": DsdvConfig,
    "dsr": DsrConfig,
}


def _field_types(config_type: Type[Any]) -> Dict[str, type]:
    return {
        item.name: type(item.default)
        for item in dataclasses.fields(config_type)
        if item.default is not dataclasses.MISSING
    }


def known_config_keys() -> set[str]:
    keys: set[str] = set()
    for config_type in CONFIG_TYPES.values():
        keys.update(_field_types(config_type))
    return keys


def validate_overrides(overrides: Mapping[str, Any]) -> None:
    """Reject keys that no protocol understands."""

    unknown = sorted(set(overrides) - known_config_keys())
    if unknown:
        raise ConfigError(f"unknown protocol setting {unknown[0]!r}", field="protocol_config")


def _coerce(key: str, value: Any, target: type) -> Any:
    if target is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in {"true", "yes", "1", "false", "no", "0"}:
            return value.lower() in {"true", "yes", "1"}
        raise ConfigError(f"expected a boolean, got {value!r}", field=key)
    try:
        if target is int:
            number = float(value)
            if not number.is_integer():
                raise ValueError(value)
            return int(number)
        return target(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"expected {target.__name__}, got {value!r}", field=key) from exc


def build_config(protocol: str, overrides: Optional[Mapping[str, Any]] = None) -> Any:
    """Return the protocol's config with the keys it understands applied.

    Keys meant for another protocol are ignored; keys unknown to every
    protocol raise :class:`ConfigError`.
    """

    if protocol not in CONFIG_TYPES:
        raise ConfigError(f"unknown protocol {protocol!r}", field="protocol")
    overrides = overrides or {}
    validate_overrides(overrides)
    config_type = CONFIG_TYPES[protocol]
    types = _field_types(config_type)
    values = {
        key: _coerce(key, value, types[key])
        for key, value in overrides.items()
        if key in types
    }
    return config_type(**values)


def build_router(
    protocol: str,
    node_id: int,
    *,
    overrides: Optional[Mapping[str, Any]] = None,
    energy: float = DEFAULT_ENERGY,
    rng: Optional[UniformSource] = None,
) -> Router:
    config = build_config(protocol, overrides)
    if protocol == "dymo":
        return DymoRouter(node_id, config, energy=energy)
    if protocol == "aodv":
        return AodvRouter(node_id, config, energy=energy, rng=rng)
    if protocol == "dsdv":
        return DsdvRouter(node_id, config, rng=rng)
    return DsrRouter(node_id, config)


__all__ = [
    "PROTOCOLS",
    "CONFIG_TYPES",
    "build_config",
    "build_router",
    "known_config_keys",
    "validate_overrides",
]
