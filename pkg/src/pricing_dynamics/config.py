"""Unified configuration for pricing-dynamics runs and experiments.

Sources are merged in the order defaults < YAML file < ``PRICING_*``
environment < CLI overrides. Every field has one rule that casts and
range-checks it, whatever the source.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from threading import RLock
from typing import Any, Callable, Dict, Mapping, MutableMapping, Optional

import yaml  # type: ignore[import-untyped]

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigError(RuntimeError):
    """Raised when configuration sources cannot be parsed or merged."""


@dataclass(frozen=True)
class RunDefaults:
    """Default hyperparameters handed to every dynamic unless overridden."""

    seed: int = 17
    step_c: float = 1.0
    eta: float = 1.0
    epsilon_div: float = 1e-8
    dense_until: int = 1000
    sparse_stride: int = 10


@dataclass(frozen=True)
class ConfigOverrides:
    run: Dict[str, Any] = field(default_factory=dict)
    values: Dict[str, Any] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not self.run and not self.values


@dataclass(frozen=True)
class Config:
    run: RunDefaults = field(default_factory=RunDefaults)
    estimate_tol: float = 1e-10
    estimate_max_iterations: int = 10_000_000
    lower_bound_slack: float = 1e-8
    max_concurrent_runs: int = 4
    record_wall_time: bool = True
    log_level: str = "INFO"

    def apply_overrides(self, overrides: ConfigOverrides) -> "Config":
        if overrides.is_empty():
            return self
        run = replace(self.run, **overrides.run) if overrides.run else self.run
        return replace(self, run=run, **overrides.values)

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "Config":
        return ConfigLoader().build(env=env)

    @classmethod
    def from_yaml(cls, config_path: str | Path, *, env: Mapping[str, str] | None = None) -> "Config":
        return ConfigLoader().build(config_path=config_path, env=env)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def save_to_yaml(self, config_path: str | Path) -> None:
        with open(config_path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(self.to_dict(), fh, default_flow_style=False, sort_keys=False)


def _parse_bool(raw: Any) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in {"1", "true", "yes", "on"}:
        return True
    if text in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_int(raw: Any) -> int:
    if isinstance(raw, bool):
        raise ValueError(f"not an integer: {raw!r}")
    if isinstance(raw, float):
        if not raw.is_integer():
            raise ValueError(f"not an integer: {raw!r}")
        return int(raw)
    return int(str(raw).strip())


def _parse_level(raw: Any) -> str:
    level = str(raw).strip().upper()
    if level not in LOG_LEVELS:
        raise ValueError(f"not a log level: {raw!r}")
    return level


@dataclass(frozen=True)
class FieldRule:
    """Cast and admissible range for one configuration field."""

    env: str
    cast: Callable[[Any], Any]
    requirement: str = ""
    check: Callable[[Any], bool] = lambda value: True
    run: bool = False


FIELD_RULES: Dict[str, FieldRule] = {
    "seed": FieldRule("PRICING_SEED", _parse_int, run=True),
    "step_c": FieldRule("PRICING_STEP_C", float, "must be > 0", lambda v: v > 0, run=True),
    "eta": FieldRule("PRICING_ETA", float, "must be > 0", lambda v: v > 0, run=True),
    "epsilon_div": FieldRule("PRICING_EPSILON_DIV", float, "must be >= 0", lambda v: v >= 0, run=True),
    "dense_until": FieldRule("PRICING_DENSE_UNTIL", _parse_int, "must be >= 0", lambda v: v >= 0, run=True),
    "sparse_stride": FieldRule("PRICING_SPARSE_STRIDE", _parse_int, "must be >= 1", lambda v: v >= 1, run=True),
    "estimate_tol": FieldRule("PRICING_ESTIMATE_TOL", float, "must be > 0", lambda v: v > 0),
    "estimate_max_iterations": FieldRule(
        "PRICING_ESTIMATE_MAX_ITERATIONS", _parse_int, "must be >= 1", lambda v: v >= 1
    ),
    "lower_bound_slack": FieldRule("PRICING_LOWER_BOUND_SLACK", float, "must be >= 0", lambda v: v >= 0),
    "max_concurrent_runs": FieldRule("PRICING_MAX_CONCURRENT_RUNS", _parse_int, "must be >= 1", lambda v: v >= 1),
    "record_wall_time": FieldRule("PRICING_RECORD_WALL_TIME", _parse_bool),
    "log_level": FieldRule("PRICING_LOG_LEVEL", _parse_level),
}


class ConfigLoader:
    """Reads each source into validated ``ConfigOverrides`` and merges them."""

    def __init__(self, rules: Mapping[str, FieldRule] = FIELD_RULES) -> None:
        self.rules = dict(rules)

    def build(
        self,
        *,
        config_path: str | Path | None = None,
        env: Mapping[str, str] | None = None,
        cli_overrides: Mapping[str, Any] | None = None,
    ) -> Config:
        config = Config()
        if config_path:
            config = config.apply_overrides(self.overrides_from_file(Path(config_path)))
        config = config.apply_overrides(self.overrides_from_env(os.environ if env is None else env))
        if cli_overrides:
            config = config.apply_overrides(self.normalize(cli_overrides, source="CLI overrides"))
        return config

    def overrides_from_env(self, env: Mapping[str, str]) -> ConfigOverrides:
        candidates = {name: env[rule.env] for name, rule in self.rules.items() if env.get(rule.env, "") != ""}
        return self.normalize(candidates, source="environment")

    def overrides_from_file(self, path: Path) -> ConfigOverrides:
        source = f"file {path}"
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except OSError as exc:
            raise ConfigError(f"Cannot read configuration {source}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"Failed to parse configuration {source}") from exc

        if not isinstance(data, MutableMapping):
            raise ConfigError(f"Configuration {source} must contain a mapping at the root")
        run_data = data.pop("run", None) or {}
        if not isinstance(run_data, MutableMapping):
            raise ConfigError("The 'run' section must be a mapping")

        run_fields = {name for name, rule in self.rules.items() if rule.run}
        unknown = sorted(set(run_data) - run_fields) + sorted(set(data) - (set(self.rules) - run_fields))
        if unknown:
            raise ConfigError(f"Unknown configuration keys in {source}: {', '.join(map(str, unknown))}")
        return self.normalize({**run_data, **data}, source=source)

    def normalize(self, values: Mapping[str, Any], *, source: str) -> ConfigOverrides:
        """Cast and check known fields; ``None`` values and unknown keys are skipped."""
        overrides = ConfigOverrides()
        for name, raw in values.items():
            rule = self.rules.get(name)
            if rule is None or raw is None:
                continue
            try:
                value = rule.cast(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"Invalid value for {name} from {source}: {raw!r}") from exc
            if not rule.check(value):
                raise ConfigError(f"Invalid value for {name} from {source}: {raw!r} ({rule.requirement})")
            (overrides.run if rule.run else overrides.values)[name] = value
        return overrides


class ConfigManager:
    """Process-wide configuration behind a lock."""

    def __init__(self, loader: ConfigLoader | None = None) -> None:
        self._loader = loader or ConfigLoader()
        self._lock = RLock()
        self._config: Config | None = None

    def get(self) -> Config:
        with self._lock:
            if self._config is None:
                self._config = self._loader.build()
            return self._config

    def set(self, config: Config) -> None:
        if not isinstance(config, Config):
            raise TypeError("config must be an instance of Config")
        with self._lock:
            self._config = config

    def load(
        self,
        *,
        config_path: str | Path | None = None,
        env: Mapping[str, str] | None = None,
        cli_overrides: Mapping[str, Any] | None = None,
    ) -> Config:
        config = self._loader.build(config_path=config_path, env=env, cli_overrides=cli_overrides)
        self.set(config)
        return config

    def apply(self, values: Mapping[str, Any], *, source: str) -> Config:
        overrides = self._loader.normalize(values, source=source)
        with self._lock:
            self._config = self.get().apply_overrides(overrides)
            return self._config


_CONFIG_MANAGER = ConfigManager()


def get_config() -> Config:
    return _CONFIG_MANAGER.get()


def set_config(config: Config) -> None:
    _CONFIG_MANAGER.set(config)


def load_config(
    *,
    config_path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    cli_overrides: Mapping[str, Optional[Any]] | None = None,
) -> Config:
    return _CONFIG_MANAGER.load(config_path=config_path, env=env, cli_overrides=cli_overrides)


def apply_config_overrides(**values: Any) -> Config:
    """Update the process-wide configuration in place, e.g. ``apply_config_overrides(seed=3)``."""
    return _CONFIG_MANAGER.apply(values, source="runtime overrides")
