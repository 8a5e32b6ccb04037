"""Shared plumbing of the subcommands: config files, snapshots and output."""

import json
import logging
import sys
import tomllib
from pathlib import Path
from typing import Any, ClassVar, Self

from pydantic import BaseModel, ConfigDict, Field

from app.config import get_settings
from app.errors import ConfigurationError


logger = logging.getLogger(__name__)

SNAPSHOT_SUFFIX = ".config.json"


def load_config_file(path: Path, command: str) -> dict[str, Any]:
    """Values from a TOML or JSON file, at top level or under a table named ``command``."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        msg = f"cannot read config file {path}: {exc}"
        raise ConfigurationError(msg) from exc
    try:
        if path.suffix.lower() == ".toml":
            data: Any = tomllib.loads(text)
        else:
            data = json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        msg = f"malformed config file {path}: {exc}"
        raise ConfigurationError(msg) from exc
    if not isinstance(data, dict):
        msg = f"config file {path} must hold a table of values"
        raise ConfigurationError(msg)
    section = data.get(command)
    return dict(section) if isinstance(section, dict) else data


def explicit_values(model: BaseModel) -> dict[str, Any]:
    """Only the fields that were actually given, recursing into nested models."""
    values: dict[str, Any] = {}
    for name in model.model_fields_set:
        value = getattr(model, name)
        values[name] = explicit_values(value) if isinstance(value, BaseModel) else value
    return values


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def snapshot_path(output: Path) -> Path:
    return output.with_name(f"{output.name}{SNAPSHOT_SUFFIX}")


def emit(text: str) -> None:
    """Command results go to stdout, diagnostics to the log."""
    sys.stdout.write(text.rstrip("\n") + "\n")


class Command(BaseModel):
    """Base of every subcommand.

    Flags given on the command line win over ``--config`` values, which win over defaults. The
    resolved values are written next to the primary output and can be fed back via ``--config``.
    """

    model_config = ConfigDict(extra="forbid")

    command_name: ClassVar[str]

    config: Path | None = Field(
        default=None,
        description="TOML or JSON file with values for this command",
    )
    deterministic: bool = Field(
        default=False,
        description="Single-threaded numeric paths and one worker process",
    )

    def resolved(self) -> Self:
        if self.config is None:
            return self
        values = load_config_file(self.config, self.command_name)
        values.pop("config", None)
        merged = _merge(values, explicit_values(self))
        logger.debug("Resolved %s from %s", self.command_name, self.config)
        return type(self).model_validate(merged)

    def required(self, name: str) -> Any:
        value = getattr(self, name)
        if value is None:
            flag = "--" + name.replace("_", "-")
            msg = f"{self.command_name}: {flag} is required"
            raise ConfigurationError(msg)
        return value

    def worker_count(self, requested: int | None) -> int:
        if self.deterministic:
            return 1
        return requested if requested is not None else get_settings().workers

    def write_snapshot(self, output: Path) -> Path:
        path = snapshot_path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2, exclude={"config"}), encoding="utf-8")
        return path

    def cli_cmd(self) -> None:
        command = self.resolved()
        logger.info("Running %s", command.command_name)
        command.run()

    def run(self) -> None:
        raise NotImplementedError
