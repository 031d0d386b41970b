"""
JSON configuration files and command-line overrides.

File layout (schema_version 1):

    {
      "schema_version": 1,
      "protocol": "qnn-bb84",
      "n_bits": 100,
      "samples": 10,
      "channel": "bit-flip",
      "strength": 0.2,
      "training": {"optimizer": "derivative-free", "max_iterations": 100},
      "qrl": {"epsilon": 0.01, "mode": "exact"}
    }

Every key is optional; absent keys keep the dataclass defaults.
"""

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from lab.qkd.domain.entities import ExperimentConfig, QrlConfig, TrainingConfig
from lab.qkd.domain.exceptions import ConfigError
from lab.qkd.domain.utils.decorators import logged


SCHEMA_VERSION = 1

_NESTED = {"training": TrainingConfig, "qrl": QrlConfig}
_TUPLE_FIELDS = ("kinds", "grid")


def _field_names(cls) -> set:
    return {f.name for f in dataclasses.fields(cls)}


def _build(cls, data: Mapping[str, Any], where: str):
    unknown = set(data) - _field_names(cls)
    if unknown:
        raise ConfigError(f"Unknown {where} keys: {sorted(unknown)}. Supported: {sorted(_field_names(cls))}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"Invalid {where}: {exc}") from exc


def config_from_dict(data: Mapping[str, Any]) -> ExperimentConfig:
    data = dict(data)
    version = data.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"Unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    for key, cls in _NESTED.items():
        if key in data:
            if not isinstance(data[key], Mapping):
                raise ConfigError(f"'{key}' must be an object")
            data[key] = _build(cls, data[key], key)
    for key in _TUPLE_FIELDS:
        if key in data:
            data[key] = tuple(data[key])
    return _build(ExperimentConfig, data, "config")


@logged(logger_name="qkd.infrastructure.config", level=logging.INFO)
def load_config(path: Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a JSON object")
    return config_from_dict(data)


def config_to_dict(config: ExperimentConfig) -> Dict[str, Any]:
    body = config.to_dict()
    body["schema_version"] = SCHEMA_VERSION
    return body


def config_hash(config: ExperimentConfig) -> str:
    return config.fingerprint()


def merge_overrides(
    config: ExperimentConfig,
    overrides: Mapping[str, Any],
    training: Optional[Mapping[str, Any]] = None,
    qrl: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """
    Replace the fields whose override is not None.
    """
    def pick(values: Optional[Mapping[str, Any]]) -> Dict[str, Any]:
        return {k: v for k, v in (values or {}).items() if v is not None}

    try:
        changes = pick(overrides)
        if pick(training):
            changes["training"] = dataclasses.replace(config.training, **pick(training))
        if pick(qrl):
            changes["qrl"] = dataclasses.replace(config.qrl, **pick(qrl))
        return dataclasses.replace(config, **changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"Invalid override: {exc}") from exc
