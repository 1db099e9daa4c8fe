from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.management.exceptions import ConfigError
from src.management.logger import configure_logger
from src.management.settings import get_settings
from src.services.datagen.schemas import MixingConfig
from src.services.model.schemas import ModelConfig
from src.services.train.schemas import TrainConfig

logger = configure_logger("RunConfig", "cyan")

SECTIONS = ("model", "train", "loss", "mixing", "data", "paths")


class DataConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_pairs: int = Field(default=150_000, ge=1)
    image_size: int = Field(default=64, ge=4)
    split_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)


class PathsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    data_dir: Path | None = None
    out_dir: Path | None = None


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=0, ge=0)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    mixing: MixingConfig = Field(default_factory=MixingConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)

    @model_validator(mode="before")
    @classmethod
    def _distribute(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if "loss" in data:
            data["train"] = {**(data.get("train") or {}), "loss": data.pop("loss")}
        if "seed" in data:
            for section in ("train", "mixing"):
                data[section] = {"seed": data["seed"], **(data.get(section) or {})}
        return data

    @model_validator(mode="after")
    def _matching_sizes(self) -> "RunConfig":
        if self.model.image_size != self.data.image_size:
            raise ValueError(
                f"model.image_size ({self.model.image_size}) must match data.image_size ({self.data.image_size})"
            )
        return self

    def with_seed(self, seed: int) -> "RunConfig":
        return self.model_copy(update={
            "seed": seed,
            "train": self.train.model_copy(update={"seed": seed}),
            "mixing": self.mixing.model_copy(update={"seed": seed}),
        })


def _key_lines(text: str) -> dict[tuple[str, ...], int]:
    """1-based line of every mapping key, addressed by its key path."""
    lines: dict[tuple[str, ...], int] = {}

    def walk(node, prefix: tuple[str, ...]) -> None:
        if not isinstance(node, yaml.MappingNode):
            return
        for key_node, value_node in node.value:
            path = (*prefix, str(key_node.value))
            lines[path] = key_node.start_mark.line + 1
            walk(value_node, path)

    walk(yaml.compose(text), ())
    return lines


def _line_for(loc: tuple, lines: dict[tuple[str, ...], int]) -> int | None:
    keys = tuple(str(part) for part in loc if isinstance(part, str))
    candidates = [keys]
    if keys[:2] == ("train", "loss"):
        candidates.insert(0, ("loss", *keys[2:]))
    for candidate in candidates:
        for length in range(len(candidate), 0, -1):
            if candidate[:length] in lines:
                return lines[candidate[:length]]
    return None


def _load_yaml(text: str, source: str) -> dict:
    try:
        loaded = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark is not None else source
        raise ConfigError(f"{where}: {getattr(exc, 'problem', None) or exc}")
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ConfigError(f"{source}: top level must be a mapping of sections")
    return loaded


def _merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if key in SECTIONS and isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = {**merged[key], **value}
        else:
            merged[key] = value
    return merged


def load_defaults() -> dict:
    path = get_settings().defaults_path
    return _load_yaml(Path(path).read_text(), str(path))


def parse_config(path: Path | str | None = None) -> RunConfig:
    """Defaults merged with the sections of an optional YAML run config."""
    text, source = "", "<defaults>"
    if path is not None:
        config_file = Path(path)
        if not config_file.exists():
            raise ConfigError(f"Config file not found: {config_file.resolve()}")
        text, source = config_file.read_text(), str(config_file)

    user = _load_yaml(text, source)
    for key, value in user.items():
        if key in SECTIONS and value is not None and not isinstance(value, dict):
            raise ConfigError(f"{source}:{_line_for((key,), _key_lines(text))}: section '{key}' must be a mapping")

    merged = _merge(load_defaults(), {key: value for key, value in user.items() if value is not None})
    try:
        config = RunConfig.model_validate(merged)
    except ValidationError as exc:
        lines = _key_lines(text) if text.strip() else {}
        problems = []
        for error in exc.errors():
            line = _line_for(error["loc"], lines)
            location = f"{source}:{line}" if line is not None else source
            key = ".".join(str(part) for part in error["loc"]) or "<root>"
            problems.append(f"{location}: {key}: {error['msg']}")
        raise ConfigError("; ".join(problems))

    logger.debug(f"Loaded run config from {source}")
    return config
