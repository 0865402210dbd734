"""Experiment configuration: TOML files plus dotted-key overrides."""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigError
from ..templates import HorizonPolicy

ARCADE_TASKS = ("pong", "breakout", "invaders")
TEXT_TASKS = ("bracket_completion", "boolean_eval", "multiple_choice")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs; flat so every field is addressable
    by a single TOML key or a ``--set key=value`` override."""

    task: str
    artifact_init: str = "many_function"  # one_function | many_function | catalog
    template: str = "interactive"  # interactive | batch | episodic
    horizon_mode: str = "one_step"  # one_step | multi_step
    rollout_length: int = 1
    batch_size: int = 1
    total_updates: int = 15
    trials: int = 1
    memory_capacity: int = 5
    seed: int = 0
    seeds: tuple[int, ...] = ()  # per-trial; derived from seed when empty
    backend: str = "null"  # null | scripted | http
    backend_url: str = ""
    backend_model: str = ""
    api_key_env: str = "LOOPLAB_API_KEY"
    stage_table: str = ""  # registry name; defaults to the task's table
    split: str = "fixed"  # fixed | fraction
    train_fraction: float = 0.8
    dataset_size: int = 40
    dataset_seed: int = 0
    train_max_steps: int = 400  # env step cap for training rollouts
    val_episodes: int = 1
    val_max_steps: int = 400
    eval_episodes: int = 10
    eval_max_steps: int = 4000
    action_repeat: int = 4
    sticky_action_prob: float = 0.0
    enemy_speed_cap: int = 2
    fuel_limit: int = 10_000

    def __post_init__(self):
        if self.task not in ARCADE_TASKS + TEXT_TASKS:
            raise ConfigError(f"unknown task: {self.task!r}")
        if self.artifact_init not in ("one_function", "many_function", "catalog"):
            raise ConfigError(f"unknown artifact_init: {self.artifact_init!r}")
        if self.template not in ("interactive", "batch", "episodic"):
            raise ConfigError(f"unknown template: {self.template!r}")
        if self.template == "batch" and self.batch_size < 1:
            raise ConfigError("batch template requires batch_size >= 1")
        if self.template == "episodic" and self.rollout_length < 1:
            raise ConfigError("episodic template requires a positive rollout_length")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.total_updates < 0:
            raise ConfigError("total_updates must be >= 0")
        if self.memory_capacity < 1:
            raise ConfigError("memory_capacity must be >= 1")
        if self.backend not in ("null", "scripted", "http"):
            raise ConfigError(f"unknown backend: {self.backend!r}")
        if self.split not in ("fixed", "fraction"):
            raise ConfigError(f"unknown split protocol: {self.split!r}")
        if self.seeds and len(self.seeds) != self.trials:
            raise ConfigError("seeds, when given, must list one seed per trial")

    @property
    def is_arcade(self) -> bool:
        return self.task in ARCADE_TASKS

    @property
    def horizon(self) -> HorizonPolicy:
        return HorizonPolicy(self.horizon_mode, self.rollout_length)

    def trial_seeds(self) -> tuple[int, ...]:
        if self.seeds:
            return tuple(self.seeds)
        return tuple(self.seed + i for i in range(self.trials))


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _coerce(key: str, value):
    f = _FIELDS[key]
    if f.name == "seeds":
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key} must be a list of integers")
        return tuple(int(v) for v in value)
    if f.type in ("int", int):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return int(value)
    if f.type in ("float", float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return float(value)
    if f.type in ("str", str):
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    return value


def config_from_dict(raw: dict, source: str = "<dict>") -> ExperimentConfig:
    unknown = sorted(set(raw) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"{source}: unknown config keys: {', '.join(unknown)}")
    if "task" not in raw:
        raise ConfigError(f"{source}: missing required key 'task'")
    kwargs = {key: _coerce(key, value) for key, value in raw.items()}
    return ExperimentConfig(**kwargs)


def load_config(path, overrides: Optional[list[str]] = None) -> ExperimentConfig:
    """Parse a TOML experiment file, then apply ``key=value`` overrides.

    Unknown keys are rejected with the file name; overrides are applied in
    order, last one wins.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for item in overrides or []:
        key, value = parse_override(item)
        raw[key] = value
    return config_from_dict(raw, source=str(path))


def parse_override(item: str) -> tuple[str, object]:
    """``key=value`` with the value parsed as a TOML literal when possible."""
    if "=" not in item:
        raise ConfigError(f"override must look like key=value: {item!r}")
    key, text = item.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"override has an empty key: {item!r}")
    try:
        parsed = tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        parsed = text
    return key, parsed


def config_to_toml(config: ExperimentConfig) -> str:
    """Byte-stable TOML rendering of a config, field order fixed."""
    lines = []
    for f in dataclasses.fields(ExperimentConfig):
        value = getattr(config, f.name)
        if isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, (int, float)):
            rendered = repr(value)
        elif isinstance(value, tuple):
            rendered = "[" + ", ".join(repr(v) for v in value) + "]"
        else:
            rendered = '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"
